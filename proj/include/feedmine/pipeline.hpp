#pragma once

#include "feedmine/cluster.hpp"
#include "feedmine/grid_search.hpp"
#include "feedmine/http_clients.hpp"
#include "feedmine/priority.hpp"
#include "feedmine/timeline.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace feedmine {

inline constexpr const char *kToolVersion = "1.0.0";

enum class Stage {
    Ingest,
    Cluster,
    Detect,
    Categorize,
    Themes,
    Sentiment,
    Features,
    Tune,
    Prioritize,
    Eval,
    Timeline,
    Events,
    Report
};
inline constexpr int kStageCount = 13;

std::string_view to_string(Stage s);
std::optional<Stage> stage_from_string(std::string_view name);

enum class ClientKind { Stub, Http };

/// Everything a run needs, loaded from one TOML file. Relative paths resolve
/// against the config file's directory.
struct PipelineConfig {
    // [inputs]
    std::string posts_path;
    std::string memberships_path;
    std::string truth_path;  // optional; required by tune/eval
    std::string events_path; // optional; required by events

    // [data]
    std::string apps_path = "data/apps.toml";
    std::string taxonomy_path = "data/taxonomy.toml";
    std::string theme_lexicon_path = "data/theme_lexicon.toml";
    std::string stub_detector_path = "data/stub_detector.toml";
    std::string stub_categorizer_path = "data/stub_categorizer.toml";
    std::string toxicity_stub_path = "data/toxicity_stub.toml";
    std::string valence_lexicon_path = "data/valence_lexicon.tsv";
    std::string holidays_path = "data/holidays.toml";

    // [filter]
    dates::Date min_date{1970, 1, 1};
    std::vector<std::string> app_allowlist; // empty = every catalog app

    // [sample]
    std::int64_t per_stratum = 0; // 0 = no sampling

    // [priority]
    FeatureOptions feature_options;
    std::string weights_path; // optional fixed weights

    // [tune]
    bool tune_enabled = false;
    GridSearchOptions tuning;

    // [cluster]
    Linkage linkage = Linkage::average;
    double gap_factor = 2.0;
    bool stem_topics = false;

    // [timeline]
    int fourier_order = kFourierOrder;
    int max_ar_order = 5;
    OrderCriterion criterion = OrderCriterion::Bic;
    int event_threshold = 8;

    // [client]
    ClientKind client = ClientKind::Stub;
    HttpClientConfig http;

    std::uint64_t seed = 7;
    std::string out_dir = "out";

    static PipelineConfig load(const std::string &path);
    static PipelineConfig from_table(const toml::Table &root, const std::string &base_dir);
};

struct StageRecord {
    Stage stage = Stage::Ingest;
    bool ran = false;
    std::string status; // "ok" or the failure message
};

/// Deterministic run record: no timings, no cache-hit counters, so reruns
/// with identical inputs reproduce it byte for byte. Timings go to a
/// separate timings.log sidecar that the manifest does not reference.
struct RunManifest {
    std::string tool_version;
    std::uint64_t seed = 0;
    std::string config_hash;
    std::map<std::string, std::string> input_hashes;  // path -> sha256
    std::vector<StageRecord> stages;
    std::map<std::string, std::string> output_hashes; // out-relative -> sha256

    std::string to_json() const;
};

struct PipelineResult {
    RunManifest manifest;
    std::vector<std::string> warnings;
    bool ok = true;
};

/// Runs the requested stages plus everything they depend on, writes each
/// stage's outputs under config.out_dir, and writes manifest.json last (via
/// atomic rename). A stage failure records a partial manifest and rethrows.
PipelineResult run_pipeline(const PipelineConfig &config, const std::vector<Stage> &stages);

/// Stage closure in execution order (dependencies included, deduplicated).
std::vector<Stage> resolve_stages(const std::vector<Stage> &requested,
                                  const PipelineConfig &config);

/// Every stage the config makes applicable (what the `run` command executes).
std::vector<Stage> default_stages(const PipelineConfig &config);

} // namespace feedmine
