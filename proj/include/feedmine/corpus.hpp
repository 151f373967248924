#pragma once

#include "feedmine/dates.hpp"
#include "feedmine/rng.hpp"
#include "feedmine/toml_lite.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace feedmine {

/// One forum post with engagement metadata; the atom of the pipeline.
struct RawPost {
    std::string id;
    std::string subreddit;
    std::int64_t created_utc = 0; // seconds since 1970-01-01T00:00:00Z
    std::string title;
    std::string body;
    std::int64_t upvotes = 0;
    double upvote_ratio = 0.0; // in [0, 1]
    std::int64_t num_comments = 0;

    std::string full_text() const { return title + "\n" + body; }
};

struct ParseIssue {
    std::size_t line = 0; // 1-based input line
    std::string message;
};

struct Corpus {
    std::vector<RawPost> posts;
    std::vector<ParseIssue> errors;
};

enum class AppDomain { business, entertainment, shopping, social_media, utility_productivity };
inline constexpr int kAppDomainCount = 5;
inline constexpr AppDomain kAppDomains[kAppDomainCount] = {
    AppDomain::business, AppDomain::entertainment, AppDomain::shopping, AppDomain::social_media,
    AppDomain::utility_productivity};

std::string_view to_string(AppDomain d);
std::optional<AppDomain> app_domain_from_string(std::string_view s);

struct AppEntry {
    std::string canonical;
    AppDomain domain = AppDomain::social_media;
    std::vector<std::string> aliases;
};

/// Catalog of known applications. Aliases match case-insensitively as whole
/// words; multi-word aliases match contiguous token runs, longest alias wins.
class AppCatalog {
  public:
    static AppCatalog load(const std::string &toml_path);
    static AppCatalog from_table(const toml::Table &root);

    const std::vector<AppEntry> &entries() const { return entries_; }
    /// Exact canonical name lookup, or case-insensitive alias lookup.
    const AppEntry *find(std::string_view name) const;

    /// Apps mentioned in the token stream, ordered by first occurrence.
    std::vector<const AppEntry *> mentions(const std::vector<std::string> &tokens) const;

  private:
    struct AliasSeq {
        std::vector<std::string> words;
        std::size_t entry = 0;
    };
    std::vector<AppEntry> entries_;
    std::vector<AliasSeq> aliases_; // sorted by word count descending
};

struct WindowedText {
    std::string post_id;
    std::string keyword;
    std::string text;
};

struct StratumKey {
    std::string community;
    AppDomain domain = AppDomain::social_media;
    friend auto operator<=>(const StratumKey &, const StratumKey &) = default;
};

struct SampleReport {
    Corpus sample;
    struct Shortfall {
        std::string community;
        AppDomain domain = AppDomain::social_media;
        std::int64_t missing = 0; // before the refill pass
    };
    std::vector<Shortfall> shortfalls;
    // Posts still missing per community after refilling from sibling domains.
    std::vector<std::pair<std::string, std::int64_t>> unfilled;
};

/// Parses line-delimited JSON posts. Malformed lines are collected with line
/// numbers and never silently dropped; duplicate ids keep the first post.
Corpus parse_posts(std::string_view stream);
Corpus parse_posts_file(const std::string &path);

/// JSONL round-trip companion to parse_posts (fixed field order).
std::string serialize_posts(const Corpus &corpus);

/// First case-insensitive occurrence of `keyword` in title+"\n"+body, with
/// `radius` characters (Unicode scalar values) of context on both sides.
WindowedText window_text(const RawPost &post, std::string_view keyword, std::size_t radius = 300);

/// Posts dated `min_date` or later that mention at least one allowlisted app.
Corpus filter_corpus(const Corpus &corpus, const AppCatalog &catalog,
                     const std::vector<std::string> &app_allowlist, const dates::Date &min_date);

/// Deterministic stratified sample: each (community, domain) stratum
/// contributes min(per_stratum, available) posts; shortfalls are refilled
/// round-robin from the community's other domains, randomly within a domain.
/// Posts absent from `strata` are ignored. Output preserves corpus order.
SampleReport stratified_sample(const Corpus &corpus,
                               const std::map<std::string, StratumKey> &strata,
                               std::int64_t per_stratum, std::uint64_t seed);

} // namespace feedmine
