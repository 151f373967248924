#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace feedmine {

enum class MarginAxis {
    BIPOC,
    WomenAFAB,
    LGBTQIA,
    LowSES,
    GlobalSouth,
    PhysicalHealth,
    MentalHealth
};
inline constexpr int kAxisCount = 7;

std::string_view to_string(MarginAxis axis);
/// Column name used in the membership CSV ("bipoc", "women_afab", ...).
std::string_view axis_column(MarginAxis axis);

/// Binary marginalization encoding of one subreddit.
struct MembershipVector {
    std::string subreddit;
    std::array<std::uint8_t, kAxisCount> bits{};

    int popcount() const {
        int n = 0;
        for (auto b : bits)
            n += b != 0;
        return n;
    }
};

struct MembershipFile {
    std::vector<MembershipVector> vectors;
    std::vector<std::string> warnings; // e.g. fewer than two axes set
};

/// Merge entry: node ids are 0..n-1 for leaves, n+i for the cluster created
/// by merge i. Heights are non-decreasing.
struct Merge {
    int left = 0;
    int right = 0;
    double height = 0.0;
};

struct Dendrogram {
    std::vector<std::string> leaves;
    std::vector<Merge> merges;
};

struct CommunityCluster {
    std::string name;
    std::vector<std::string> members;
    std::array<double, kAxisCount> profile{}; // per-axis member fraction
};

enum class Linkage { average, complete, single };
std::string_view to_string(Linkage l);
Linkage linkage_from_string(std::string_view s);

MembershipFile load_memberships(const std::string &csv_path);
MembershipFile parse_memberships(std::string_view csv_content);

/// Agglomerative clustering on Euclidean distance between bit vectors.
/// Deterministic: equal-distance ties merge the lexicographically smallest
/// pair of node ids.
Dendrogram agglomerate(const std::vector<MembershipVector> &vectors, Linkage linkage);

/// Cuts immediately below the first merge whose height exceeds gap_factor
/// times the previous merge's height; without such a gap, cuts below the last
/// merge. Clusters are ordered by smallest member name; profiles are filled,
/// names are not (see name_clusters).
std::vector<CommunityCluster> cut_at_gap(const Dendrogram &d,
                                         const std::vector<MembershipVector> &vectors,
                                         double gap_factor = 2.0);

/// Names each cluster after the axes whose member fraction strictly exceeds
/// one half, joined with " x " in fixed axis order; "Mixed" when no axis has
/// a majority.
void name_clusters(std::vector<CommunityCluster> &clusters);

std::string dendrogram_dot(const Dendrogram &d);
std::string clusters_json(const std::vector<CommunityCluster> &clusters);

} // namespace feedmine
