#include "feedmine/pipeline.hpp"

#include "feedmine/errors.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

using namespace feedmine;

int main(int argc, char **argv) {
    CLI::App app{"feedmine: prioritize and analyze ethical-concern posts about software"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::int64_t seed = 0;
    std::string out_dir;
    std::string client_kind;
    app.add_option("--config", config_path, "pipeline configuration TOML");
    auto *seed_opt = app.add_option("--seed", seed, "RNG seed (overrides config)");
    auto *out_opt = app.add_option("--out", out_dir, "output directory (overrides config)");
    auto *client_opt = app.add_option("--client", client_kind, "client backend")
                           ->check(CLI::IsMember({"stub", "http"}));

    // ingest
    auto *ingest = app.add_subcommand("ingest", "parse, filter and sample the post corpus");
    std::string input_path, catalog_path, min_date;
    std::vector<std::string> apps;
    ingest->add_option("--input", input_path, "posts JSONL");
    ingest->add_option("--catalog", catalog_path, "app catalog TOML");
    ingest->add_option("--min-date", min_date, "earliest post date, YYYY-MM-DD");
    ingest->add_option("--apps", apps, "app allowlist")->delimiter(',');

    // cluster
    auto *cluster = app.add_subcommand("cluster", "cluster subreddit memberships");
    std::string memberships_path, linkage;
    double gap_factor = 0.0;
    cluster->add_option("--memberships", memberships_path, "membership CSV");
    cluster->add_option("--linkage", linkage, "linkage criterion")
        ->check(CLI::IsMember({"average", "complete", "single"}));
    auto *gap_opt = cluster->add_option("--gap-factor", gap_factor, "dendrogram cut ratio");

    app.add_subcommand("detect", "label posts as ethical concerns");
    app.add_subcommand("categorize", "assign concern categories");
    app.add_subcommand("themes", "score posts on the priority themes");
    app.add_subcommand("sentiment", "toxicity attributes and valence per post");

    // prioritize
    auto *prioritize = app.add_subcommand("prioritize", "rank posts by priority score");
    std::string weights_path;
    prioritize->add_option("--weights", weights_path, "priority weights TOML");

    // tune
    auto *tune = app.add_subcommand("tune", "grid-search priority weights");
    std::string truth_path;
    std::int64_t k = 0, folds = 0;
    tune->add_option("--truth", truth_path, "rated ground-truth CSV");
    auto *k_opt = tune->add_option("--k", k, "ranking cutoff");
    auto *folds_opt = tune->add_option("--folds", folds, "cross-validation folds");

    // eval
    auto *eval = app.add_subcommand("eval", "precision/recall of the current ranking");
    std::string eval_truth;
    std::int64_t eval_k = 0;
    eval->add_option("--truth", eval_truth, "rated ground-truth CSV");
    auto *eval_k_opt = eval->add_option("--k", eval_k, "ranking cutoff");

    // timeline
    auto *timeline = app.add_subcommand("timeline", "weekly frequencies, fits and outliers");
    std::int64_t fourier = 0, max_order = 0;
    std::string criterion;
    auto *fourier_opt = timeline->add_option("--fourier-order", fourier, "harmonic pairs");
    auto *order_opt = timeline->add_option("--max-order", max_order, "max AR order");
    timeline->add_option("--criterion", criterion, "AR order criterion")
        ->check(CLI::IsMember({"aic", "bic"}));

    // events
    auto *events = app.add_subcommand("events", "rank and align world events");
    std::string events_path;
    std::int64_t event_threshold = 0;
    events->add_option("--events", events_path, "events CSV");
    auto *threshold_opt = events->add_option("--event-threshold", event_threshold,
                                             "rater-total cutoff");

    app.add_subcommand("report", "frequency tables and charts");
    app.add_subcommand("run", "every configured stage");

    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig cfg =
            config_path.empty() ? PipelineConfig{} : PipelineConfig::load(config_path);
        if (seed_opt->count()) {
            cfg.seed = static_cast<std::uint64_t>(seed);
            cfg.tuning.seed = cfg.seed;
        }
        if (out_opt->count())
            cfg.out_dir = out_dir;
        if (client_opt->count())
            cfg.client = client_kind == "http" ? ClientKind::Http : ClientKind::Stub;

        if (!input_path.empty())
            cfg.posts_path = input_path;
        if (!catalog_path.empty())
            cfg.apps_path = catalog_path;
        if (!min_date.empty())
            cfg.min_date = dates::parse_iso_date(min_date);
        if (!apps.empty())
            cfg.app_allowlist = apps;
        if (!memberships_path.empty())
            cfg.memberships_path = memberships_path;
        if (!linkage.empty())
            cfg.linkage = linkage_from_string(linkage);
        if (gap_opt->count())
            cfg.gap_factor = gap_factor;
        if (!weights_path.empty())
            cfg.weights_path = weights_path;
        if (!truth_path.empty())
            cfg.truth_path = truth_path;
        if (!eval_truth.empty())
            cfg.truth_path = eval_truth;
        if (k_opt->count())
            cfg.tuning.k = static_cast<int>(k);
        if (eval_k_opt->count())
            cfg.tuning.k = static_cast<int>(eval_k);
        if (folds_opt->count())
            cfg.tuning.folds = static_cast<int>(folds);
        if (fourier_opt->count())
            cfg.fourier_order = static_cast<int>(fourier);
        if (order_opt->count())
            cfg.max_ar_order = static_cast<int>(max_order);
        if (!criterion.empty())
            cfg.criterion = criterion == "aic" ? OrderCriterion::Aic : OrderCriterion::Bic;
        if (!events_path.empty())
            cfg.events_path = events_path;
        if (threshold_opt->count())
            cfg.event_threshold = static_cast<int>(event_threshold);

        std::vector<Stage> stages;
        const std::string command = app.get_subcommands().front()->get_name();
        if (command == "run") {
            stages = default_stages(cfg);
        } else if (command == "tune") {
            cfg.tune_enabled = true;
            stages = {Stage::Tune};
        } else {
            const auto stage = stage_from_string(command);
            if (!stage)
                throw ConfigError("unknown command: " + command);
            stages = {*stage};
        }

        const PipelineResult result = run_pipeline(cfg, stages);
        for (const std::string &warning : result.warnings)
            std::cerr << "warning: " << warning << "\n";
        std::cout << "wrote " << cfg.out_dir << "/manifest.json ("
                  << result.manifest.output_hashes.size() << " outputs)\n";
        return 0;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
