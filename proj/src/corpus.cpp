#include "feedmine/corpus.hpp"

#include "feedmine/errors.hpp"
#include "feedmine/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

namespace feedmine {

namespace {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

std::int64_t require_int(const json &j, const char *field, std::int64_t min_value) {
    const auto &v = j.at(field);
    if (!v.is_number_integer())
        throw ParseError(std::string("field '") + field + "' is not an integer");
    std::int64_t x = v.get<std::int64_t>();
    if (x < min_value)
        throw ParseError(std::string("field '") + field + "' below " + std::to_string(min_value));
    return x;
}

RawPost post_from_json(const json &j) {
    for (const char *field : {"id", "subreddit", "created_utc", "title", "body", "upvotes",
                              "upvote_ratio", "num_comments"})
        if (!j.contains(field))
            throw ParseError(std::string("missing required field '") + field + "'");
    RawPost p;
    p.id = j.at("id").get<std::string>();
    if (p.id.empty())
        throw ParseError("field 'id' is empty");
    p.subreddit = j.at("subreddit").get<std::string>();
    p.created_utc = require_int(j, "created_utc", 1);
    p.title = j.at("title").get<std::string>();
    p.body = j.at("body").get<std::string>();
    p.upvotes = require_int(j, "upvotes", 0);
    p.num_comments = require_int(j, "num_comments", 0);
    const auto &ratio = j.at("upvote_ratio");
    if (!ratio.is_number())
        throw ParseError("field 'upvote_ratio' is not a number");
    p.upvote_ratio = ratio.get<double>();
    if (p.upvote_ratio < 0.0 || p.upvote_ratio > 1.0)
        throw ParseError("field 'upvote_ratio' outside [0, 1]");
    return p;
}

} // namespace

std::string_view to_string(AppDomain d) {
    switch (d) {
    case AppDomain::business: return "business";
    case AppDomain::entertainment: return "entertainment";
    case AppDomain::shopping: return "shopping";
    case AppDomain::social_media: return "social_media";
    case AppDomain::utility_productivity: return "utility_productivity";
    }
    return "?";
}

std::optional<AppDomain> app_domain_from_string(std::string_view s) {
    for (AppDomain d : kAppDomains)
        if (to_string(d) == s)
            return d;
    return std::nullopt;
}

AppCatalog AppCatalog::load(const std::string &toml_path) {
    return from_table(toml::parse_file(toml_path));
}

AppCatalog AppCatalog::from_table(const toml::Table &root) {
    AppCatalog cat;
    const toml::Table &apps = root.table("apps");
    std::unordered_set<std::string> seen_aliases;
    for (const std::string &name : apps.keys()) {
        const toml::Table &t = apps.table(name);
        AppEntry e;
        e.canonical = name;
        const std::string domain = t.get_string("domain");
        auto d = app_domain_from_string(domain);
        if (!d)
            throw ConfigError("app '" + name + "': unknown domain '" + domain + "'");
        e.domain = *d;
        e.aliases = t.get_string_array("aliases");
        if (e.aliases.empty())
            throw ConfigError("app '" + name + "': empty alias list");
        for (const std::string &a : e.aliases) {
            const std::string key = text::to_lower(a);
            if (!seen_aliases.insert(key).second)
                throw ConfigError("alias '" + a + "' maps to more than one app");
        }
        cat.entries_.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < cat.entries_.size(); ++i)
        for (const std::string &a : cat.entries_[i].aliases)
            cat.aliases_.push_back({text::tokenize(a), i});
    std::sort(cat.aliases_.begin(), cat.aliases_.end(), [](const AliasSeq &a, const AliasSeq &b) {
        if (a.words.size() != b.words.size())
            return a.words.size() > b.words.size();
        return a.words < b.words;
    });
    return cat;
}

const AppEntry *AppCatalog::find(std::string_view name) const {
    for (const AppEntry &e : entries_)
        if (e.canonical == name)
            return &e;
    const std::string lower = text::to_lower(name);
    for (const AppEntry &e : entries_) {
        if (text::to_lower(e.canonical) == lower)
            return &e;
        for (const std::string &a : e.aliases)
            if (text::to_lower(a) == lower)
                return &e;
    }
    return nullptr;
}

std::vector<const AppEntry *> AppCatalog::mentions(const std::vector<std::string> &tokens) const {
    std::vector<const AppEntry *> out;
    std::unordered_set<std::size_t> seen;
    for (std::size_t i = 0; i < tokens.size();) {
        bool matched = false;
        for (const AliasSeq &alias : aliases_) {
            const std::size_t len = alias.words.size();
            if (i + len > tokens.size())
                continue;
            bool hit = true;
            for (std::size_t j = 0; j < len; ++j) {
                if (tokens[i + j] != alias.words[j]) {
                    hit = false;
                    break;
                }
            }
            if (hit) {
                if (seen.insert(alias.entry).second)
                    out.push_back(&entries_[alias.entry]);
                i += len;
                matched = true;
                break;
            }
        }
        if (!matched)
            ++i;
    }
    return out;
}

Corpus parse_posts(std::string_view stream) {
    Corpus corpus;
    std::unordered_set<std::string> ids;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= stream.size()) {
        const std::size_t nl = stream.find('\n', pos);
        std::string_view line = stream.substr(pos, nl == std::string_view::npos ? std::string_view::npos
                                                                                : nl - pos);
        pos = nl == std::string_view::npos ? stream.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        try {
            if (!text::is_valid_utf8(line))
                throw ParseError("line is not valid UTF-8");
            RawPost p = post_from_json(json::parse(line));
            if (!ids.insert(p.id).second)
                throw ParseError("duplicate post id '" + p.id + "'");
            corpus.posts.push_back(std::move(p));
        } catch (const std::exception &e) {
            corpus.errors.push_back({line_no, e.what()});
        }
    }
    return corpus;
}

Corpus parse_posts_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open posts file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_posts(ss.str());
}

std::string serialize_posts(const Corpus &corpus) {
    std::string out;
    for (const RawPost &p : corpus.posts) {
        ordered j;
        j["id"] = p.id;
        j["subreddit"] = p.subreddit;
        j["created_utc"] = p.created_utc;
        j["title"] = p.title;
        j["body"] = p.body;
        j["upvotes"] = p.upvotes;
        j["upvote_ratio"] = p.upvote_ratio;
        j["num_comments"] = p.num_comments;
        out += j.dump();
        out += '\n';
    }
    return out;
}

WindowedText window_text(const RawPost &post, std::string_view keyword, std::size_t radius) {
    const std::vector<char32_t> cps = text::decode_utf8(post.full_text());
    const auto match = text::find_word(cps, keyword);
    if (!match)
        throw NotFoundError("keyword '" + std::string(keyword) + "' not found in post " + post.id);
    const std::size_t begin = match->begin >= radius ? match->begin - radius : 0;
    const std::size_t end = std::min(cps.size(), match->end + radius);
    return WindowedText{post.id, std::string(keyword), text::encode_utf8(cps, begin, end)};
}

Corpus filter_corpus(const Corpus &corpus, const AppCatalog &catalog,
                     const std::vector<std::string> &app_allowlist, const dates::Date &min_date) {
    std::set<std::string> allowed;
    for (const std::string &name : app_allowlist) {
        const AppEntry *e = catalog.find(name);
        if (!e)
            throw ConfigError("allowlist app '" + name + "' is not in the catalog");
        allowed.insert(e->canonical);
    }
    const std::int64_t min_epoch = dates::days_from_civil(min_date) * 86400;
    Corpus out;
    for (const RawPost &p : corpus.posts) {
        if (p.created_utc < min_epoch)
            continue;
        bool hit = false;
        for (const AppEntry *e : catalog.mentions(text::tokenize(p.full_text())))
            if (allowed.count(e->canonical)) {
                hit = true;
                break;
            }
        if (hit)
            out.posts.push_back(p);
    }
    return out;
}

SampleReport stratified_sample(const Corpus &corpus,
                               const std::map<std::string, StratumKey> &strata,
                               std::int64_t per_stratum, std::uint64_t seed) {
    if (per_stratum < 1)
        throw ConfigError("per_stratum must be at least 1");

    // Corpus positions per stratum, in corpus order; communities sorted by
    // name, domains in declaration order, so RNG consumption is well-defined.
    std::map<std::string, std::vector<std::vector<std::size_t>>> by_community;
    for (std::size_t i = 0; i < corpus.posts.size(); ++i) {
        auto it = strata.find(corpus.posts[i].id);
        if (it == strata.end())
            continue;
        auto &doms = by_community[it->second.community];
        if (doms.empty())
            doms.resize(kAppDomainCount);
        doms[static_cast<int>(it->second.domain)].push_back(i);
    }

    Rng rng(seed);
    SampleReport report;
    std::vector<char> chosen(corpus.posts.size(), 0);

    for (auto &[community, doms] : by_community) {
        std::int64_t missing_total = 0;
        for (int d = 0; d < kAppDomainCount; ++d) {
            auto &idx = doms[d];
            const std::int64_t n = static_cast<std::int64_t>(idx.size());
            if (n <= per_stratum) {
                for (std::size_t pos : idx)
                    chosen[pos] = 1;
                if (n < per_stratum) {
                    report.shortfalls.push_back({community, kAppDomains[d], per_stratum - n});
                    missing_total += per_stratum - n;
                }
            } else {
                // Partial Fisher-Yates over the stratum's corpus positions.
                for (std::int64_t t = 0; t < per_stratum; ++t) {
                    const std::uint64_t j =
                        static_cast<std::uint64_t>(t) + rng.next_below(static_cast<std::uint64_t>(n - t));
                    std::swap(idx[static_cast<std::size_t>(t)], idx[j]);
                    chosen[idx[static_cast<std::size_t>(t)]] = 1;
                }
            }
        }
        // Refill round-robin across the community's domains; a domain that was
        // itself short has no unchosen posts left, so it is skipped naturally.
        while (missing_total > 0) {
            bool any = false;
            for (int d = 0; d < kAppDomainCount && missing_total > 0; ++d) {
                std::vector<std::size_t> remaining;
                for (std::size_t pos : doms[d])
                    if (!chosen[pos])
                        remaining.push_back(pos);
                if (remaining.empty())
                    continue;
                // The Fisher-Yates pass reordered the stratum vector; restore
                // corpus order so the uniform pick below is well-defined.
                std::sort(remaining.begin(), remaining.end());
                chosen[remaining[rng.next_below(remaining.size())]] = 1;
                --missing_total;
                any = true;
            }
            if (!any)
                break;
        }
        if (missing_total > 0)
            report.unfilled.emplace_back(community, missing_total);
    }

    for (std::size_t i = 0; i < corpus.posts.size(); ++i)
        if (chosen[i])
            report.sample.posts.push_back(corpus.posts[i]);
    return report;
}

} // namespace feedmine
