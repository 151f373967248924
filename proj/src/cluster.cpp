#include "feedmine/cluster.hpp"

#include "feedmine/csv.hpp"
#include "feedmine/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>

namespace feedmine {

std::string_view to_string(MarginAxis axis) {
    switch (axis) {
    case MarginAxis::BIPOC: return "BIPOC";
    case MarginAxis::WomenAFAB: return "WomenAFAB";
    case MarginAxis::LGBTQIA: return "LGBTQIA";
    case MarginAxis::LowSES: return "LowSES";
    case MarginAxis::GlobalSouth: return "GlobalSouth";
    case MarginAxis::PhysicalHealth: return "PhysicalHealth";
    case MarginAxis::MentalHealth: return "MentalHealth";
    }
    return "?";
}

std::string_view axis_column(MarginAxis axis) {
    switch (axis) {
    case MarginAxis::BIPOC: return "bipoc";
    case MarginAxis::WomenAFAB: return "women_afab";
    case MarginAxis::LGBTQIA: return "lgbtqia";
    case MarginAxis::LowSES: return "low_ses";
    case MarginAxis::GlobalSouth: return "global_south";
    case MarginAxis::PhysicalHealth: return "physical_health";
    case MarginAxis::MentalHealth: return "mental_health";
    }
    return "?";
}

std::string_view to_string(Linkage l) {
    switch (l) {
    case Linkage::average: return "average";
    case Linkage::complete: return "complete";
    case Linkage::single: return "single";
    }
    return "?";
}

Linkage linkage_from_string(std::string_view s) {
    if (s == "average")
        return Linkage::average;
    if (s == "complete")
        return Linkage::complete;
    if (s == "single")
        return Linkage::single;
    throw ConfigError("unknown linkage '" + std::string(s) + "' (average|complete|single)");
}

MembershipFile parse_memberships(std::string_view csv_content) {
    const csv::TableData table = csv::read(csv_content);
    MembershipFile out;
    const int sub_col = table.require_column("subreddit");
    int cols[kAxisCount];
    for (int a = 0; a < kAxisCount; ++a)
        cols[a] = table.require_column(axis_column(static_cast<MarginAxis>(a)));
    for (const auto &row : table.rows) {
        MembershipVector v;
        v.subreddit = row[sub_col];
        for (int a = 0; a < kAxisCount; ++a) {
            const std::string &cell = row[cols[a]];
            if (cell != "0" && cell != "1")
                throw ParseError("membership cell for '" + v.subreddit + "' must be 0 or 1, got '" +
                                 cell + "'");
            v.bits[a] = cell == "1" ? 1 : 0;
        }
        if (v.popcount() < 2)
            out.warnings.push_back("subreddit '" + v.subreddit +
                                   "' has fewer than two axes set; not intersectional");
        out.vectors.push_back(std::move(v));
    }
    return out;
}

MembershipFile load_memberships(const std::string &csv_path) {
    std::ifstream in(csv_path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open membership CSV: " + csv_path);
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_memberships(content);
}

namespace {

double euclidean(const MembershipVector &a, const MembershipVector &b) {
    int sum = 0;
    for (int i = 0; i < kAxisCount; ++i) {
        const int d = static_cast<int>(a.bits[i]) - static_cast<int>(b.bits[i]);
        sum += d * d;
    }
    return std::sqrt(static_cast<double>(sum));
}

} // namespace

Dendrogram agglomerate(const std::vector<MembershipVector> &vectors, Linkage linkage) {
    const int n = static_cast<int>(vectors.size());
    if (n < 2)
        throw ConfigError("clustering needs at least two membership vectors");

    Dendrogram d;
    d.leaves.reserve(vectors.size());
    for (const auto &v : vectors)
        d.leaves.push_back(v.subreddit);

    const int total = 2 * n - 1; // node ids: leaves 0..n-1, merges n..2n-2
    std::vector<std::vector<double>> dist(total, std::vector<double>(total, 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            dist[i][j] = dist[j][i] = euclidean(vectors[i], vectors[j]);

    std::vector<int> active(n);
    std::iota(active.begin(), active.end(), 0);
    std::vector<int> size(total, 1);

    for (int m = 0; m < n - 1; ++m) {
        int best_a = -1, best_b = -1;
        double best = 0.0;
        for (std::size_t x = 0; x < active.size(); ++x) {
            for (std::size_t y = x + 1; y < active.size(); ++y) {
                const int a = std::min(active[x], active[y]);
                const int b = std::max(active[x], active[y]);
                const double dv = dist[a][b];
                if (best_a < 0 || dv < best ||
                    (dv == best && (a < best_a || (a == best_a && b < best_b)))) {
                    best = dv;
                    best_a = a;
                    best_b = b;
                }
            }
        }
        const int merged = n + m;
        d.merges.push_back({best_a, best_b, best});
        size[merged] = size[best_a] + size[best_b];

        active.erase(std::remove_if(active.begin(), active.end(),
                                    [&](int id) { return id == best_a || id == best_b; }),
                     active.end());
        for (int other : active) {
            const double da = dist[std::min(best_a, other)][std::max(best_a, other)];
            const double db = dist[std::min(best_b, other)][std::max(best_b, other)];
            double nd = 0.0;
            switch (linkage) {
            case Linkage::average:
                nd = (size[best_a] * da + size[best_b] * db) / size[merged];
                break;
            case Linkage::complete: nd = std::max(da, db); break;
            case Linkage::single: nd = std::min(da, db); break;
            }
            dist[merged][other] = dist[other][merged] = nd;
        }
        active.push_back(merged);
    }
    return d;
}

std::vector<CommunityCluster> cut_at_gap(const Dendrogram &d,
                                         const std::vector<MembershipVector> &vectors,
                                         double gap_factor) {
    const int n = static_cast<int>(d.leaves.size());
    const int m = static_cast<int>(d.merges.size());
    int cut = m - 1; // fallback: stop before the last merge
    for (int i = 1; i < m; ++i) {
        if (d.merges[i].height > gap_factor * d.merges[i - 1].height) {
            cut = i;
            break;
        }
    }

    // Apply merges 0..cut-1 and collect leaves per surviving root.
    std::vector<int> parent(n + m, -1);
    for (int i = 0; i < cut; ++i) {
        parent[d.merges[i].left] = n + i;
        parent[d.merges[i].right] = n + i;
    }
    auto root_of = [&](int id) {
        while (parent[id] >= 0)
            id = parent[id];
        return id;
    };

    std::vector<std::vector<int>> groups(n + m);
    for (int leaf = 0; leaf < n; ++leaf)
        groups[root_of(leaf)].push_back(leaf);

    std::vector<CommunityCluster> clusters;
    for (const auto &g : groups) {
        if (g.empty())
            continue;
        CommunityCluster c;
        for (int leaf : g)
            c.members.push_back(d.leaves[leaf]);
        std::sort(c.members.begin(), c.members.end());
        for (int a = 0; a < kAxisCount; ++a) {
            int set = 0;
            for (int leaf : g)
                set += vectors[leaf].bits[a] != 0;
            c.profile[a] = static_cast<double>(set) / static_cast<double>(g.size());
        }
        clusters.push_back(std::move(c));
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const CommunityCluster &a, const CommunityCluster &b) {
                  return a.members.front() < b.members.front();
              });
    return clusters;
}

void name_clusters(std::vector<CommunityCluster> &clusters) {
    for (CommunityCluster &c : clusters) {
        std::string name;
        for (int a = 0; a < kAxisCount; ++a) {
            if (c.profile[a] > 0.5) {
                if (!name.empty())
                    name += " x ";
                name += to_string(static_cast<MarginAxis>(a));
            }
        }
        c.name = name.empty() ? "Mixed" : name;
    }
}

std::string dendrogram_dot(const Dendrogram &d) {
    std::string out = "digraph dendrogram {\n  rankdir=BT;\n  node [shape=box];\n";
    const int n = static_cast<int>(d.leaves.size());
    for (int i = 0; i < n; ++i)
        out += "  n" + std::to_string(i) + " [label=\"" + d.leaves[i] + "\"];\n";
    for (std::size_t m = 0; m < d.merges.size(); ++m) {
        const int id = n + static_cast<int>(m);
        out += "  n" + std::to_string(id) + " [label=\"h=" + csv::fmt(d.merges[m].height, 4) +
               "\" shape=ellipse];\n";
        out += "  n" + std::to_string(d.merges[m].left) + " -> n" + std::to_string(id) + ";\n";
        out += "  n" + std::to_string(d.merges[m].right) + " -> n" + std::to_string(id) + ";\n";
    }
    out += "}\n";
    return out;
}

std::string clusters_json(const std::vector<CommunityCluster> &clusters) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const CommunityCluster &c : clusters) {
        nlohmann::ordered_json j;
        j["name"] = c.name;
        j["members"] = c.members;
        nlohmann::ordered_json profile;
        for (int a = 0; a < kAxisCount; ++a)
            profile[std::string(to_string(static_cast<MarginAxis>(a)))] = c.profile[a];
        j["profile"] = profile;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

} // namespace feedmine
