#include "feedmine/pipeline.hpp"

#include "feedmine/classify.hpp"
#include "feedmine/cluster.hpp"
#include "feedmine/csv.hpp"
#include "feedmine/errors.hpp"
#include "feedmine/hash.hpp"
#include "feedmine/report.hpp"
#include "feedmine/sentiment.hpp"
#include "feedmine/text.hpp"
#include "feedmine/themes.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

namespace fs = std::filesystem;

namespace feedmine {

namespace {

constexpr Stage kExecutionOrder[kStageCount] = {
    Stage::Cluster, Stage::Ingest,     Stage::Detect, Stage::Categorize, Stage::Themes,
    Stage::Sentiment, Stage::Features, Stage::Tune,   Stage::Prioritize, Stage::Eval,
    Stage::Timeline, Stage::Events,    Stage::Report};

constexpr const char *kStageNames[kStageCount] = {
    "ingest",     "cluster", "detect",     "categorize", "themes", "sentiment", "features",
    "tune",       "prioritize", "eval",    "timeline",   "events", "report"};

int exec_rank(Stage s) {
    for (int i = 0; i < kStageCount; ++i)
        if (kExecutionOrder[i] == s)
            return i;
    return kStageCount;
}

std::string resolve_path(const std::string &base, const std::string &p) {
    if (p.empty() || fs::path(p).is_absolute())
        return p;
    return (fs::path(base) / p).lexically_normal().string();
}

void write_file(const fs::path &path, const std::string &content) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw ConfigError("cannot write " + path.string());
    out << content;
    out.close();
    if (!out)
        throw ConfigError("short write to " + path.string());
}

/// Index-parallel loop; worker exceptions surface on the calling thread.
void parallel_map(std::size_t count, int threads, const std::function<void(std::size_t)> &fn) {
    threads = std::max(1, std::min<int>(threads, static_cast<int>(count)));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!first_error)
                        first_error = std::current_exception();
                    return;
                }
            }
        });
    for (std::thread &t : pool)
        t.join();
    if (first_error)
        std::rethrow_exception(first_error);
}

int client_threads(const PipelineConfig &cfg, int client_max) {
    const int hw = std::max(1u, std::thread::hardware_concurrency());
    const int requested = cfg.client == ClientKind::Http ? cfg.http.parallelism : hw;
    return std::max(1, std::min(client_max, requested));
}

struct CacheEntry {
    std::string key;
    std::string post_id;
    bool is_concern = false;
    std::string category; // empty on detect entries
    std::string source;
};

struct ClientFailure {
    std::string post_id;
    std::string stage;
    std::string message;
};

struct Ctx {
    const PipelineConfig &cfg;
    std::vector<std::string> warnings;
    std::map<std::string, std::string> inputs_used; // path -> sha256
    std::map<std::string, std::string> outputs;     // out-relative -> sha256

    AppCatalog catalog;
    bool have_catalog = false;

    Corpus corpus; // the working set after filter (and sampling, if any)
    MembershipFile memberships;
    Dendrogram dendrogram;
    std::vector<CommunityCluster> clusters;

    std::vector<WindowedText> windows;          // corpus order
    std::vector<ConcernDetection> detections;   // corpus order
    std::map<std::string, bool> is_concern;
    std::map<std::string, Category> categories; // every post; None when not a concern
    std::map<std::string, std::string> category_source;
    std::vector<ClientFailure> failures;
    std::map<std::string, CacheEntry> cache;    // key -> entry
    std::vector<std::string> cache_order;       // keys in write order

    std::vector<ThemeScores> themes;
    std::vector<ToxicityAttributes> tox;
    std::vector<ValenceScore> valence;
    FeatureMatrix features;

    PriorityWeights weights;
    bool have_tuned = false;
    GridSearchResult tuned;
    RankingResult ranking;

    std::vector<WeeklyPoint> weekly;
    SeasonalModel seasonal;
    BaselineModel baseline;
    bool have_baseline = false;
    std::vector<OutlierFlag> flags;
    std::vector<WorldEvent> selected_events;
    std::vector<EventAnnotation> annotations;
};

void note_input(Ctx &ctx, const std::string &path) {
    if (!path.empty() && !ctx.inputs_used.count(path))
        ctx.inputs_used[path] = hash::sha256_file_hex(path);
}

void emit(Ctx &ctx, const std::string &relative, const std::string &content) {
    write_file(fs::path(ctx.cfg.out_dir) / relative, content);
    ctx.outputs[relative] = hash::sha256_hex(content);
}

const AppCatalog &catalog(Ctx &ctx) {
    if (!ctx.have_catalog) {
        note_input(ctx, ctx.cfg.apps_path);
        ctx.catalog = AppCatalog::load(ctx.cfg.apps_path);
        ctx.have_catalog = true;
    }
    return ctx.catalog;
}

// ---- stage bodies ---------------------------------------------------------

void run_cluster(Ctx &ctx) {
    note_input(ctx, ctx.cfg.memberships_path);
    ctx.memberships = load_memberships(ctx.cfg.memberships_path);
    for (const std::string &w : ctx.memberships.warnings)
        ctx.warnings.push_back("memberships: " + w);
    ctx.dendrogram = agglomerate(ctx.memberships.vectors, ctx.cfg.linkage);
    ctx.clusters = cut_at_gap(ctx.dendrogram, ctx.memberships.vectors, ctx.cfg.gap_factor);
    name_clusters(ctx.clusters);
    emit(ctx, "clusters.json", clusters_json(ctx.clusters));
    emit(ctx, "dendrogram.dot", dendrogram_dot(ctx.dendrogram));
}

void run_ingest(Ctx &ctx) {
    note_input(ctx, ctx.cfg.posts_path);
    Corpus parsed = parse_posts_file(ctx.cfg.posts_path);
    if (!parsed.errors.empty()) {
        csv::Writer w;
        w.row({"line", "message"});
        for (const ParseIssue &issue : parsed.errors)
            w.row({std::to_string(issue.line), issue.message});
        emit(ctx, "ingest_errors.csv", w.str());
        ctx.warnings.push_back("ingest: " + std::to_string(parsed.errors.size()) +
                               " malformed input lines (see ingest_errors.csv)");
    }

    std::vector<std::string> allowlist = ctx.cfg.app_allowlist;
    if (allowlist.empty())
        for (const AppEntry &e : catalog(ctx).entries())
            allowlist.push_back(e.canonical);
    ctx.corpus = filter_corpus(parsed, catalog(ctx), allowlist, ctx.cfg.min_date);
    if (ctx.corpus.posts.empty())
        throw ConfigError("no posts survive the date/app filter");

    if (ctx.cfg.per_stratum > 0) {
        std::map<std::string, std::string> community_of; // subreddit -> cluster name
        for (const CommunityCluster &c : ctx.clusters)
            for (const std::string &member : c.members)
                community_of[member] = c.name;
        std::map<std::string, StratumKey> strata; // post id -> stratum
        for (const RawPost &p : ctx.corpus.posts) {
            const auto community = community_of.find(p.subreddit);
            if (community == community_of.end())
                continue; // unclustered subreddits fall outside the sample
            const auto mentioned = catalog(ctx).mentions(text::tokenize(p.full_text()));
            if (mentioned.empty())
                continue;
            strata[p.id] = StratumKey{community->second, mentioned.front()->domain};
        }
        SampleReport report =
            stratified_sample(ctx.corpus, strata, ctx.cfg.per_stratum, ctx.cfg.seed);
        for (const auto &s : report.shortfalls)
            ctx.warnings.push_back("sample: stratum (" + s.community + ", " +
                                   std::string(to_string(s.domain)) + ") short by " +
                                   std::to_string(s.missing));
        for (const auto &[community, missing] : report.unfilled)
            ctx.warnings.push_back("sample: community " + community + " still short by " +
                                   std::to_string(missing) + " after refill");
        ctx.corpus = std::move(report.sample);
        if (ctx.corpus.posts.empty())
            throw ConfigError("stratified sample is empty");
    }
    emit(ctx, "corpus.jsonl", serialize_posts(ctx.corpus));
}

/// Window around the first mentioned app; aliases are tried in catalog order
/// because token-run matches (e.g. hyphenated text) can defeat a plain word
/// search for the multi-word alias.
WindowedText make_window(const RawPost &post, const AppCatalog &catalog) {
    const auto mentioned = catalog.mentions(text::tokenize(post.full_text()));
    if (mentioned.empty())
        throw NotFoundError("post mentions no catalog app: " + post.id);
    const AppEntry *app = mentioned.front();
    std::string last_error = "no alias of " + app->canonical + " found in post " + post.id;
    for (const std::string &alias : app->aliases) {
        try {
            return window_text(post, alias);
        } catch (const NotFoundError &e) {
            last_error = e.what();
        }
    }
    throw NotFoundError(last_error);
}

std::string cache_path(const Ctx &ctx) {
    return (fs::path(ctx.cfg.out_dir) / "cache" / "labels.jsonl").string();
}

void load_cache(Ctx &ctx) {
    std::ifstream in(cache_path(ctx), std::ios::binary);
    if (!in)
        return; // first run
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        try {
            const auto j = nlohmann::json::parse(line);
            CacheEntry e;
            e.key = j.at("key").get<std::string>();
            e.post_id = j.at("post_id").get<std::string>();
            e.is_concern = j.at("is_concern").get<bool>();
            e.category = j.at("category").get<std::string>();
            e.source = j.at("source").get<std::string>();
            ctx.cache[e.key] = std::move(e);
        } catch (const std::exception &) {
            ctx.warnings.push_back("cache: corrupt entry at labels.jsonl line " +
                                   std::to_string(line_no) + "; recomputing");
        }
    }
}

void save_cache(Ctx &ctx) {
    std::string out;
    std::set<std::string> written; // identical texts share one cache entry
    for (const std::string &key : ctx.cache_order) {
        if (!written.insert(key).second)
            continue;
        const CacheEntry &e = ctx.cache.at(key);
        nlohmann::ordered_json j;
        j["key"] = e.key;
        j["post_id"] = e.post_id;
        j["is_concern"] = e.is_concern;
        j["category"] = e.category;
        j["source"] = e.source;
        out += j.dump();
        out += '\n';
    }
    write_file(cache_path(ctx), out); // internal state, not a manifest output
}

std::unique_ptr<DetectorClient> make_detector(Ctx &ctx) {
    if (ctx.cfg.client == ClientKind::Http)
        return std::make_unique<HttpDetector>(ctx.cfg.http);
    note_input(ctx, ctx.cfg.stub_detector_path);
    return std::make_unique<StubDetector>(StubDetector::load(ctx.cfg.stub_detector_path));
}

std::unique_ptr<CategorizerClient> make_categorizer(Ctx &ctx) {
    if (ctx.cfg.client == ClientKind::Http)
        return std::make_unique<HttpCategorizer>(ctx.cfg.http);
    note_input(ctx, ctx.cfg.stub_categorizer_path);
    return std::make_unique<StubCategorizer>(StubCategorizer::load(ctx.cfg.stub_categorizer_path));
}

std::unique_ptr<ToxicityProvider> make_toxicity(Ctx &ctx) {
    if (ctx.cfg.client == ClientKind::Http)
        return std::make_unique<HttpToxicity>(ctx.cfg.http);
    note_input(ctx, ctx.cfg.toxicity_stub_path);
    return std::make_unique<StubToxicity>(StubToxicity::load(ctx.cfg.toxicity_stub_path));
}

void run_detect(Ctx &ctx) {
    load_cache(ctx);
    const std::size_t n = ctx.corpus.posts.size();
    ctx.windows.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        ctx.windows[i] = make_window(ctx.corpus.posts[i], catalog(ctx));

    auto client = make_detector(ctx);
    ctx.detections.assign(n, ConcernDetection{});
    std::vector<std::string> keys(n);
    std::vector<char> miss(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        keys[i] = hash::sha256_hex("detect\n" + client->name() + "\n" + ctx.windows[i].text);
        const auto hit = ctx.cache.find(keys[i]);
        if (hit != ctx.cache.end()) {
            ctx.detections[i] = ConcernDetection{ctx.corpus.posts[i].id, hit->second.is_concern,
                                                 hit->second.is_concern ? 1.0 : 0.0,
                                                 hit->second.source};
        } else {
            miss[i] = 1;
        }
    }

    std::vector<std::string> errors(n);
    parallel_map(n, client_threads(ctx.cfg, client->max_parallelism()), [&](std::size_t i) {
        if (!miss[i])
            return;
        try {
            ctx.detections[i] = detect_concern(ctx.windows[i], *client);
        } catch (const RetryableError &e) {
            errors[i] = e.what();
            ctx.detections[i] = ConcernDetection{ctx.corpus.posts[i].id, false, 0.0, "failed"};
        }
    });

    csv::Writer w;
    w.row({"post_id", "keyword", "is_concern", "confidence", "source"});
    for (std::size_t i = 0; i < n; ++i) {
        const ConcernDetection &d = ctx.detections[i];
        ctx.is_concern[d.post_id] = d.is_concern;
        if (!errors[i].empty())
            ctx.failures.push_back({ctx.corpus.posts[i].id, "detect", errors[i]});
        else if (miss[i])
            ctx.cache[keys[i]] = CacheEntry{keys[i], d.post_id, d.is_concern, "", d.source};
        if (ctx.cache.count(keys[i])) // failed posts stay uncached
            ctx.cache_order.push_back(keys[i]);
        w.row({d.post_id, ctx.windows[i].keyword, d.is_concern ? "true" : "false",
               csv::fmt_exact(d.confidence), d.source});
    }
    emit(ctx, "detections.csv", w.str());
}

void run_categorize(Ctx &ctx) {
    note_input(ctx, ctx.cfg.taxonomy_path);
    const Taxonomy taxonomy = Taxonomy::load(ctx.cfg.taxonomy_path);
    auto client = make_categorizer(ctx);

    const std::size_t n = ctx.corpus.posts.size();
    std::vector<Category> labels(n, Category::NoneLabel);
    std::vector<std::string> sources(n, "none");
    std::vector<std::string> keys(n);
    std::vector<char> miss(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!ctx.detections[i].is_concern)
            continue;
        const PromptText prompt = assemble_category_prompt(ctx.windows[i], taxonomy);
        keys[i] = hash::sha256_hex("categorize\n" + client->name() + "\n" + prompt.full());
        const auto hit = ctx.cache.find(keys[i]);
        if (hit != ctx.cache.end()) {
            const auto parsed = category_from_string(hit->second.category);
            if (parsed) {
                labels[i] = *parsed;
                sources[i] = hit->second.source;
                continue;
            }
            ctx.warnings.push_back("cache: unreadable category for post " +
                                   ctx.corpus.posts[i].id + "; recomputing");
        }
        miss[i] = 1;
    }

    std::vector<std::string> errors(n);
    parallel_map(n, client_threads(ctx.cfg, client->max_parallelism()), [&](std::size_t i) {
        if (!miss[i])
            return;
        try {
            labels[i] = categorize(ctx.windows[i], *client, taxonomy);
            sources[i] = client->name();
        } catch (const RetryableError &e) {
            errors[i] = e.what();
            sources[i] = "failed";
        }
    });

    csv::Writer w;
    w.row({"post_id", "category", "source"});
    for (std::size_t i = 0; i < n; ++i) {
        const std::string &id = ctx.corpus.posts[i].id;
        ctx.categories[id] = labels[i];
        ctx.category_source[id] = sources[i];
        if (!errors[i].empty())
            ctx.failures.push_back({id, "categorize", errors[i]});
        else if (miss[i]) {
            const std::string label(labels[i] == Category::NoneLabel
                                        ? "None"
                                        : to_string(labels[i]));
            ctx.cache[keys[i]] = CacheEntry{keys[i], id, true, label, sources[i]};
            ctx.cache_order.push_back(keys[i]);
        } else if (!keys[i].empty() && ctx.cache.count(keys[i])) {
            ctx.cache_order.push_back(keys[i]);
        }
        w.row({id,
               labels[i] == Category::NoneLabel ? "None" : std::string(to_string(labels[i])),
               sources[i]});
    }
    emit(ctx, "categories.csv", w.str());
    save_cache(ctx);

    if (!ctx.failures.empty()) {
        csv::Writer fw;
        fw.row({"post_id", "stage", "message"});
        for (const ClientFailure &f : ctx.failures)
            fw.row({f.post_id, f.stage, f.message});
        emit(ctx, "client_failures.csv", fw.str());
        ctx.warnings.push_back("clients: " + std::to_string(ctx.failures.size()) +
                               " posts failed after retries (see client_failures.csv)");
    }
}

void run_themes(Ctx &ctx) {
    note_input(ctx, ctx.cfg.theme_lexicon_path);
    const TopicLexicon lexicon = TopicLexicon::load(ctx.cfg.theme_lexicon_path,
                                                    ctx.cfg.stem_topics);
    ctx.themes.clear();
    ctx.themes.reserve(ctx.corpus.posts.size());
    for (const RawPost &p : ctx.corpus.posts)
        ctx.themes.push_back(lexicon.score(p.id, p.full_text()));

    csv::Writer w;
    w.row({"post_id", "harm", "negativity", "children"});
    for (const ThemeScores &t : ctx.themes)
        w.row({t.post_id, csv::fmt_exact(t.harm), csv::fmt_exact(t.negativity),
               csv::fmt_exact(t.children)});
    emit(ctx, "themes.csv", w.str());
}

void run_sentiment(Ctx &ctx) {
    note_input(ctx, ctx.cfg.valence_lexicon_path);
    const ValenceLexicon vlex = ValenceLexicon::load(ctx.cfg.valence_lexicon_path);
    auto provider = make_toxicity(ctx);

    const std::size_t n = ctx.corpus.posts.size();
    ctx.tox.assign(n, ToxicityAttributes{});
    ctx.valence.assign(n, ValenceScore{});
    std::vector<std::string> errors(n);
    parallel_map(n, client_threads(ctx.cfg, provider->max_parallelism()), [&](std::size_t i) {
        const RawPost &p = ctx.corpus.posts[i];
        const std::string full = p.full_text();
        try {
            ctx.tox[i] = toxicity(p.id, full, *provider);
        } catch (const RetryableError &e) {
            errors[i] = e.what();
        }
        ctx.valence[i] = vlex.score(full);
    });
    for (std::size_t i = 0; i < n; ++i)
        if (!errors[i].empty())
            ctx.failures.push_back({ctx.corpus.posts[i].id, "toxicity", errors[i]});

    csv::Writer w;
    w.row({"post_id", "toxicity", "severe_toxicity", "insult", "profanity", "threat",
           "identity_attack", "compound"});
    for (std::size_t i = 0; i < n; ++i) {
        const ToxicityAttributes &a = ctx.tox[i];
        w.row({ctx.corpus.posts[i].id, csv::fmt_exact(a.toxicity),
               csv::fmt_exact(a.severe_toxicity), csv::fmt_exact(a.insult),
               csv::fmt_exact(a.profanity), csv::fmt_exact(a.threat),
               csv::fmt_exact(a.identity_attack), csv::fmt_exact(ctx.valence[i].compound)});
    }
    emit(ctx, "sentiment.csv", w.str());
}

void run_features(Ctx &ctx) {
    ctx.features = FeatureMatrix::build(ctx.corpus.posts, ctx.themes, ctx.tox, ctx.valence,
                                        ctx.cfg.feature_options);
    csv::Writer w;
    std::vector<std::string> header{"post_id", "created_utc"};
    for (const char *name : kFeatureNames)
        header.push_back(name);
    w.row(header);
    for (std::size_t i = 0; i < ctx.features.size(); ++i) {
        std::vector<std::string> row{ctx.features.ids()[i],
                                     std::to_string(ctx.features.created()[i])};
        for (int f = 0; f < kNumPriorityFeatures; ++f)
            row.push_back(csv::fmt_exact(ctx.features.column(f)[i]));
        w.row(row);
    }
    emit(ctx, "features.csv", w.str());
}

void run_tune(Ctx &ctx) {
    note_input(ctx, ctx.cfg.truth_path);
    const GroundTruth truth = GroundTruth::load(ctx.cfg.truth_path);
    GridSearchOptions options = ctx.cfg.tuning;
    ctx.tuned = grid_search(ctx.features, truth, options);
    ctx.have_tuned = true;

    emit(ctx, "weights.toml", ctx.tuned.best.to_toml());
    csv::Writer w;
    std::vector<std::string> header{"fold", "precision", "recall", "k", "zero_relevant"};
    const char *weight_names[] = {"w_a", "w_b", "w_c", "w_d", "w_e",
                                  "w_f", "w_g", "w_h", "w_i", "w_j"};
    for (const char *name : weight_names)
        header.push_back(name);
    w.row(header);
    for (const FoldMetrics &fold : ctx.tuned.metrics.per_fold) {
        std::vector<std::string> row{std::to_string(fold.fold), csv::fmt_exact(fold.precision),
                                     csv::fmt_exact(fold.recall), std::to_string(fold.k),
                                     fold.zero_relevant ? "true" : "false"};
        for (double v : fold.selected.as_array())
            row.push_back(csv::fmt_exact(v));
        w.row(row);
    }
    emit(ctx, "tuning.csv", w.str());
}

void run_prioritize(Ctx &ctx) {
    if (ctx.have_tuned) {
        ctx.weights = ctx.tuned.best;
    } else if (!ctx.cfg.weights_path.empty()) {
        note_input(ctx, ctx.cfg.weights_path);
        ctx.weights = PriorityWeights::load(ctx.cfg.weights_path);
    } else {
        ctx.weights = PriorityWeights{};
    }
    ctx.ranking = rank_and_aggregate(ctx.features, ctx.weights, ctx.categories);

    csv::Writer w;
    w.row({"rank", "post_id", "priority", "category", "sentiment", "entropy", "recency",
           "popularity"});
    for (const RankedPost &p : ctx.ranking.posts)
        w.row({std::to_string(p.rank), p.post_id, csv::fmt_exact(p.priority),
               p.category == Category::NoneLabel ? "None" : std::string(to_string(p.category)),
               csv::fmt_exact(p.sent), csv::fmt_exact(p.entropy), csv::fmt_exact(p.recency),
               csv::fmt_exact(p.popularity)});
    emit(ctx, "ranked.csv", w.str());

    csv::Writer cw;
    cw.row({"category", "count", "mean_priority"});
    for (const CategoryPriority &c : ctx.ranking.category_means)
        cw.row({c.category == Category::NoneLabel ? "None" : std::string(to_string(c.category)),
                std::to_string(c.count), csv::fmt_exact(c.mean_priority)});
    emit(ctx, "category_priority.csv", cw.str());
}

void run_eval(Ctx &ctx) {
    note_input(ctx, ctx.cfg.truth_path);
    const GroundTruth truth = GroundTruth::load(ctx.cfg.truth_path);
    std::vector<std::string> ranked;
    ranked.reserve(ctx.ranking.posts.size());
    for (const RankedPost &p : ctx.ranking.posts)
        if (truth.ratings.count(p.post_id))
            ranked.push_back(p.post_id);
    const EvalMetrics metrics = precision_recall_at_k(ranked, truth, ctx.cfg.tuning.k,
                                                      ctx.cfg.tuning.relevance_threshold);
    csv::Writer w;
    w.row({"metric", "value"});
    w.row({"precision_at_k", csv::fmt_exact(metrics.precision_at_k)});
    w.row({"recall_at_k", csv::fmt_exact(metrics.recall_at_k)});
    w.row({"k", std::to_string(metrics.k)});
    emit(ctx, "metrics.csv", w.str());
}

void run_timeline(Ctx &ctx) {
    std::int64_t lo = ctx.corpus.posts.front().created_utc;
    std::int64_t hi = lo;
    for (const RawPost &p : ctx.corpus.posts) {
        lo = std::min(lo, p.created_utc);
        hi = std::max(hi, p.created_utc);
    }
    ctx.weekly = weekly_frequencies(ctx.corpus.posts, ctx.is_concern, dates::day_of_epoch(lo),
                                    dates::day_of_epoch(hi));

    note_input(ctx, ctx.cfg.holidays_path);
    const HolidayCalendar holidays = HolidayCalendar::load(ctx.cfg.holidays_path);
    ctx.seasonal = fit_seasonal(ctx.weekly, holidays, ctx.cfg.fourier_order);
    for (const std::string &warning : ctx.seasonal.warnings)
        ctx.warnings.push_back("seasonal: " + warning);
    ctx.flags = classify_outliers(ctx.weekly, ctx.seasonal.forecasts);

    try {
        ctx.baseline = fit_baseline(ctx.weekly, ctx.cfg.max_ar_order, ctx.cfg.criterion);
        ctx.have_baseline = true;
    } catch (const FitError &e) {
        ctx.warnings.push_back(std::string("baseline: ") + e.what());
    }

    csv::Writer w;
    w.row({"week_start", "ethical_count", "total_count", "frequency"});
    for (const WeeklyPoint &p : ctx.weekly)
        w.row({dates::format_iso(p.week_start), std::to_string(p.ethical_count),
               std::to_string(p.total_count),
               p.has_frequency() ? csv::fmt_exact(p.frequency()) : ""});
    emit(ctx, "weekly.csv", w.str());

    const auto forecast_csv = [](const std::vector<ForecastPoint> &pts) {
        csv::Writer fw;
        fw.row({"week_start", "yhat", "lo85", "hi85", "lo95", "hi95", "trend", "seasonal",
                "holiday"});
        for (const ForecastPoint &p : pts)
            fw.row({dates::format_iso(p.week_start), csv::fmt_exact(p.yhat),
                    csv::fmt_exact(p.lo85), csv::fmt_exact(p.hi85), csv::fmt_exact(p.lo95),
                    csv::fmt_exact(p.hi95), csv::fmt_exact(p.trend), csv::fmt_exact(p.seasonal),
                    csv::fmt_exact(p.holiday)});
        return fw.str();
    };
    emit(ctx, "forecast.csv", forecast_csv(ctx.seasonal.forecasts));
    if (ctx.have_baseline)
        emit(ctx, "baseline.csv", forecast_csv(ctx.baseline.forecasts));

    csv::Writer ow;
    ow.row({"week_start", "class", "magnitude"});
    for (const OutlierFlag &f : ctx.flags)
        if (f.flag != OutlierClass::None)
            ow.row({dates::format_iso(f.week_start), to_string(f.flag),
                    csv::fmt_exact(f.magnitude)});
    emit(ctx, "outliers.csv", ow.str());

    csv::Writer mw;
    mw.row({"model", "parameter", "value"});
    mw.row({"seasonal", "seasonal_enabled", ctx.seasonal.seasonal_enabled ? "true" : "false"});
    mw.row({"seasonal", "intercept", csv::fmt_exact(ctx.seasonal.intercept)});
    mw.row({"seasonal", "slope", csv::fmt_exact(ctx.seasonal.slope)});
    for (std::size_t k = 0; k < ctx.seasonal.sin_coef.size(); ++k) {
        mw.row({"seasonal", "sin_" + std::to_string(k + 1),
                csv::fmt_exact(ctx.seasonal.sin_coef[k])});
        mw.row({"seasonal", "cos_" + std::to_string(k + 1),
                csv::fmt_exact(ctx.seasonal.cos_coef[k])});
    }
    for (std::size_t h = 0; h < ctx.seasonal.holiday_names.size(); ++h)
        mw.row({"seasonal", "holiday_" + ctx.seasonal.holiday_names[h],
                csv::fmt_exact(ctx.seasonal.holiday_coef[h])});
    mw.row({"seasonal", "sigma", csv::fmt_exact(ctx.seasonal.sigma)});
    if (ctx.have_baseline) {
        mw.row({"baseline", "order", std::to_string(ctx.baseline.order)});
        mw.row({"baseline", "criterion",
                ctx.baseline.criterion == OrderCriterion::Aic ? "aic" : "bic"});
        mw.row({"baseline", "intercept", csv::fmt_exact(ctx.baseline.intercept)});
        for (std::size_t i = 0; i < ctx.baseline.ar_coef.size(); ++i)
            mw.row({"baseline", "phi_" + std::to_string(i + 1),
                    csv::fmt_exact(ctx.baseline.ar_coef[i])});
        mw.row({"baseline", "sigma", csv::fmt_exact(ctx.baseline.sigma)});
    }
    emit(ctx, "model_summary.csv", mw.str());
}

void run_events(Ctx &ctx) {
    note_input(ctx, ctx.cfg.events_path);
    const std::vector<WorldEvent> all = load_events(ctx.cfg.events_path);
    ctx.selected_events = rank_events(all, ctx.cfg.event_threshold);
    ctx.annotations = align_events(ctx.weekly, ctx.flags, ctx.selected_events);

    csv::Writer w;
    w.row({"name", "date", "total", "selected"});
    std::vector<const WorldEvent *> sorted;
    for (const WorldEvent &e : all)
        sorted.push_back(&e);
    std::sort(sorted.begin(), sorted.end(), [](const WorldEvent *a, const WorldEvent *b) {
        if (a->date != b->date)
            return a->date < b->date;
        return a->name < b->name;
    });
    std::vector<std::string> kept;
    for (const WorldEvent &e : ctx.selected_events)
        kept.push_back(e.name);
    for (const WorldEvent *e : sorted)
        w.row({e->name, dates::format_iso(e->date), std::to_string(e->total),
               std::count(kept.begin(), kept.end(), e->name) ? "true" : "false"});
    emit(ctx, "events_ranked.csv", w.str());

    csv::Writer aw;
    aw.row({"name", "event_week", "in_span", "outlier_week", "outlier_class"});
    for (const EventAnnotation &a : ctx.annotations)
        aw.row({a.event.name, dates::format_iso(a.event_week), a.in_span ? "true" : "false",
                a.has_outlier ? dates::format_iso(a.outlier_week) : "",
                a.has_outlier ? to_string(a.outlier_class) : ""});
    emit(ctx, "event_annotations.csv", aw.str());
}

void run_report(Ctx &ctx) {
    std::map<std::string, Category> concern_only;
    for (const auto &[id, concern] : ctx.is_concern)
        if (concern)
            concern_only[id] = ctx.categories.at(id);
    if (!concern_only.empty())
        emit(ctx, "frequency_by_category.csv", frequency_csv(frequency_by_category(concern_only)));
    else
        ctx.warnings.push_back("report: no concern posts, category table skipped");

    emit(ctx, "frequency_by_app.csv",
         frequency_csv(frequency_by_app(ctx.corpus.posts, catalog(ctx), ctx.is_concern)));

    if (!ctx.clusters.empty()) {
        emit(ctx, "frequency_by_community.csv",
             frequency_csv(frequency_by_community(ctx.corpus.posts, ctx.clusters,
                                                  ctx.categories)));
    }

    emit(ctx, "timeline.svg",
         render_timeline_svg(ctx.weekly, ctx.seasonal.forecasts, ctx.flags, ctx.annotations));
    emit(ctx, "priority_bar.svg", render_category_bar_svg(ctx.ranking.category_means));
}

// ---- orchestration --------------------------------------------------------

std::vector<Stage> deps_of(Stage s, const PipelineConfig &cfg) {
    switch (s) {
    case Stage::Ingest:
        return cfg.per_stratum > 0 ? std::vector<Stage>{Stage::Cluster} : std::vector<Stage>{};
    case Stage::Cluster:
        return {};
    case Stage::Detect:
        return {Stage::Ingest};
    case Stage::Categorize:
        return {Stage::Detect};
    case Stage::Themes:
    case Stage::Sentiment:
        return {Stage::Ingest};
    case Stage::Features:
        return {Stage::Ingest, Stage::Themes, Stage::Sentiment};
    case Stage::Tune:
        return {Stage::Features};
    case Stage::Prioritize:
        return cfg.tune_enabled
                   ? std::vector<Stage>{Stage::Features, Stage::Categorize, Stage::Tune}
                   : std::vector<Stage>{Stage::Features, Stage::Categorize};
    case Stage::Eval:
        return {Stage::Prioritize};
    case Stage::Timeline:
        return {Stage::Detect};
    case Stage::Events:
        return {Stage::Timeline};
    case Stage::Report: {
        std::vector<Stage> deps{Stage::Categorize, Stage::Prioritize, Stage::Timeline};
        if (!cfg.memberships_path.empty())
            deps.push_back(Stage::Cluster);
        if (!cfg.events_path.empty())
            deps.push_back(Stage::Events);
        return deps;
    }
    }
    return {};
}

void validate_inputs(const PipelineConfig &cfg, const std::vector<Stage> &stages) {
    const auto needs = [&](Stage s) {
        return std::find(stages.begin(), stages.end(), s) != stages.end();
    };
    const auto require = [](const std::string &path, const char *what) {
        if (path.empty())
            throw ConfigError(std::string(what) + " path not configured");
        if (!fs::exists(path))
            throw ConfigError(std::string(what) + " file missing: " + path);
    };
    if (needs(Stage::Ingest))
        require(cfg.posts_path, "posts input");
    if (needs(Stage::Cluster))
        require(cfg.memberships_path, "memberships input");
    if (needs(Stage::Tune) || needs(Stage::Eval))
        require(cfg.truth_path, "ground-truth input");
    if (needs(Stage::Events))
        require(cfg.events_path, "events input");
}

void run_stage(Ctx &ctx, Stage s) {
    switch (s) {
    case Stage::Ingest: run_ingest(ctx); break;
    case Stage::Cluster: run_cluster(ctx); break;
    case Stage::Detect: run_detect(ctx); break;
    case Stage::Categorize: run_categorize(ctx); break;
    case Stage::Themes: run_themes(ctx); break;
    case Stage::Sentiment: run_sentiment(ctx); break;
    case Stage::Features: run_features(ctx); break;
    case Stage::Tune: run_tune(ctx); break;
    case Stage::Prioritize: run_prioritize(ctx); break;
    case Stage::Eval: run_eval(ctx); break;
    case Stage::Timeline: run_timeline(ctx); break;
    case Stage::Events: run_events(ctx); break;
    case Stage::Report: run_report(ctx); break;
    }
}

std::string canonical_config(const PipelineConfig &cfg) {
    std::string s;
    const auto kv = [&s](const char *key, const std::string &value) {
        s += key;
        s += '=';
        s += value;
        s += '\n';
    };
    kv("posts", cfg.posts_path);
    kv("memberships", cfg.memberships_path);
    kv("truth", cfg.truth_path);
    kv("events", cfg.events_path);
    kv("apps", cfg.apps_path);
    kv("taxonomy", cfg.taxonomy_path);
    kv("theme_lexicon", cfg.theme_lexicon_path);
    kv("stub_detector", cfg.stub_detector_path);
    kv("stub_categorizer", cfg.stub_categorizer_path);
    kv("toxicity_stub", cfg.toxicity_stub_path);
    kv("valence_lexicon", cfg.valence_lexicon_path);
    kv("holidays", cfg.holidays_path);
    kv("min_date", dates::format_iso(cfg.min_date));
    kv("apps_allowlist", text::join(cfg.app_allowlist, ","));
    kv("per_stratum", std::to_string(cfg.per_stratum));
    kv("bin_count", std::to_string(cfg.feature_options.bin_count));
    kv("surprisal", cfg.feature_options.surprisal ? "true" : "false");
    kv("normalize_identity", cfg.feature_options.normalize_identity ? "true" : "false");
    kv("weights", cfg.weights_path);
    kv("tune_enabled", cfg.tune_enabled ? "true" : "false");
    std::string grid;
    for (double v : cfg.tuning.grid)
        grid += (grid.empty() ? "" : ",") + csv::fmt_exact(v);
    kv("tune_grid", grid);
    kv("tune_k", std::to_string(cfg.tuning.k));
    kv("tune_folds", std::to_string(cfg.tuning.folds));
    kv("tune_threshold", csv::fmt_exact(cfg.tuning.relevance_threshold));
    kv("linkage", std::string(to_string(cfg.linkage)));
    kv("gap_factor", csv::fmt_exact(cfg.gap_factor));
    kv("stem_topics", cfg.stem_topics ? "true" : "false");
    kv("fourier_order", std::to_string(cfg.fourier_order));
    kv("max_ar_order", std::to_string(cfg.max_ar_order));
    kv("criterion", cfg.criterion == OrderCriterion::Aic ? "aic" : "bic");
    kv("event_threshold", std::to_string(cfg.event_threshold));
    kv("client", cfg.client == ClientKind::Http ? "http" : "stub");
    kv("base_url", cfg.http.base_url);
    kv("seed", std::to_string(cfg.seed));
    return s;
}

} // namespace

std::string_view to_string(Stage s) { return kStageNames[static_cast<int>(s)]; }

std::optional<Stage> stage_from_string(std::string_view name) {
    for (int i = 0; i < kStageCount; ++i)
        if (name == kStageNames[i])
            return static_cast<Stage>(i);
    return std::nullopt;
}

PipelineConfig PipelineConfig::load(const std::string &path) {
    const std::string base = fs::path(path).parent_path().string();
    return from_table(toml::parse_file(path), base.empty() ? "." : base);
}

PipelineConfig PipelineConfig::from_table(const toml::Table &root, const std::string &base_dir) {
    PipelineConfig cfg;
    const auto path_or = [&](std::string_view key, const std::string &fallback) {
        return resolve_path(base_dir, root.get_string_or(key, fallback));
    };
    cfg.posts_path = path_or("inputs.posts", "");
    cfg.memberships_path = path_or("inputs.memberships", "");
    cfg.truth_path = path_or("inputs.truth", "");
    cfg.events_path = path_or("inputs.events", "");

    cfg.apps_path = path_or("data.apps", cfg.apps_path);
    cfg.taxonomy_path = path_or("data.taxonomy", cfg.taxonomy_path);
    cfg.theme_lexicon_path = path_or("data.theme_lexicon", cfg.theme_lexicon_path);
    cfg.stub_detector_path = path_or("data.stub_detector", cfg.stub_detector_path);
    cfg.stub_categorizer_path = path_or("data.stub_categorizer", cfg.stub_categorizer_path);
    cfg.toxicity_stub_path = path_or("data.toxicity_stub", cfg.toxicity_stub_path);
    cfg.valence_lexicon_path = path_or("data.valence_lexicon", cfg.valence_lexicon_path);
    cfg.holidays_path = path_or("data.holidays", cfg.holidays_path);

    if (root.has("filter.min_date"))
        cfg.min_date = dates::parse_iso_date(root.get_string("filter.min_date"));
    if (root.has("filter.apps"))
        cfg.app_allowlist = root.get_string_array("filter.apps");
    cfg.per_stratum = root.get_int_or("sample.per_stratum", cfg.per_stratum);

    cfg.feature_options.bin_count =
        static_cast<int>(root.get_int_or("priority.bin_count", cfg.feature_options.bin_count));
    cfg.feature_options.surprisal =
        root.get_bool_or("priority.surprisal", cfg.feature_options.surprisal);
    cfg.feature_options.normalize_identity = root.get_bool_or(
        "priority.normalize_identity", cfg.feature_options.normalize_identity);
    cfg.weights_path = path_or("priority.weights", "");

    cfg.tune_enabled = root.get_bool_or("tune.enabled", false);
    if (root.has("tune.grid"))
        cfg.tuning.grid = root.get_double_array("tune.grid");
    cfg.tuning.k = static_cast<int>(root.get_int_or("tune.k", cfg.tuning.k));
    cfg.tuning.folds = static_cast<int>(root.get_int_or("tune.folds", cfg.tuning.folds));
    cfg.tuning.relevance_threshold =
        root.get_double_or("tune.relevance_threshold", cfg.tuning.relevance_threshold);
    cfg.tuning.threads = static_cast<int>(root.get_int_or("tune.threads", cfg.tuning.threads));

    if (root.has("cluster.linkage"))
        cfg.linkage = linkage_from_string(root.get_string("cluster.linkage"));
    cfg.gap_factor = root.get_double_or("cluster.gap_factor", cfg.gap_factor);
    cfg.stem_topics = root.get_bool_or("themes.stem", false);

    cfg.fourier_order = static_cast<int>(root.get_int_or("timeline.fourier_order",
                                                         cfg.fourier_order));
    cfg.max_ar_order = static_cast<int>(root.get_int_or("timeline.max_order", cfg.max_ar_order));
    const std::string criterion = root.get_string_or("timeline.criterion", "bic");
    if (criterion == "aic")
        cfg.criterion = OrderCriterion::Aic;
    else if (criterion == "bic")
        cfg.criterion = OrderCriterion::Bic;
    else
        throw ConfigError("timeline.criterion must be \"aic\" or \"bic\", got \"" + criterion +
                          "\"");
    cfg.event_threshold = static_cast<int>(root.get_int_or("timeline.event_threshold",
                                                           cfg.event_threshold));

    const std::string client = root.get_string_or("client.kind", "stub");
    if (client == "stub")
        cfg.client = ClientKind::Stub;
    else if (client == "http")
        cfg.client = ClientKind::Http;
    else
        throw ConfigError("client.kind must be \"stub\" or \"http\", got \"" + client + "\"");
    cfg.http.base_url = root.get_string_or("client.base_url", "");
    cfg.http.detect_path = root.get_string_or("client.detect_path", cfg.http.detect_path);
    cfg.http.categorize_path =
        root.get_string_or("client.categorize_path", cfg.http.categorize_path);
    cfg.http.toxicity_path = root.get_string_or("client.toxicity_path", cfg.http.toxicity_path);
    cfg.http.timeout_seconds =
        static_cast<int>(root.get_int_or("client.timeout_seconds", cfg.http.timeout_seconds));
    cfg.http.max_attempts =
        static_cast<int>(root.get_int_or("client.max_attempts", cfg.http.max_attempts));
    cfg.http.parallelism =
        static_cast<int>(root.get_int_or("client.parallelism", cfg.http.parallelism));

    cfg.seed = static_cast<std::uint64_t>(root.get_int_or("seed", 7));
    cfg.tuning.seed = cfg.seed;
    cfg.out_dir = resolve_path(base_dir, root.get_string_or("out", "out"));
    return cfg;
}

std::vector<Stage> resolve_stages(const std::vector<Stage> &requested,
                                  const PipelineConfig &config) {
    std::array<bool, kStageCount> selected{};
    std::vector<Stage> frontier = requested;
    while (!frontier.empty()) {
        const Stage s = frontier.back();
        frontier.pop_back();
        if (selected[static_cast<int>(s)])
            continue;
        selected[static_cast<int>(s)] = true;
        for (Stage d : deps_of(s, config))
            frontier.push_back(d);
    }
    std::vector<Stage> out;
    for (Stage s : kExecutionOrder)
        if (selected[static_cast<int>(s)])
            out.push_back(s);
    return out;
}

std::vector<Stage> default_stages(const PipelineConfig &config) {
    std::vector<Stage> stages{Stage::Ingest, Stage::Detect,     Stage::Categorize,
                              Stage::Themes, Stage::Sentiment,  Stage::Features,
                              Stage::Prioritize, Stage::Timeline, Stage::Report};
    if (!config.memberships_path.empty())
        stages.push_back(Stage::Cluster);
    if (config.tune_enabled)
        stages.push_back(Stage::Tune);
    if (!config.truth_path.empty())
        stages.push_back(Stage::Eval);
    if (!config.events_path.empty())
        stages.push_back(Stage::Events);
    return resolve_stages(stages, config);
}

std::string RunManifest::to_json() const {
    nlohmann::ordered_json j;
    j["tool"] = "feedmine";
    j["version"] = tool_version;
    j["seed"] = seed;
    j["config_hash"] = config_hash;
    j["inputs"] = nlohmann::ordered_json::object();
    for (const auto &[path, digest] : input_hashes)
        j["inputs"][path] = digest;
    j["stages"] = nlohmann::ordered_json::array();
    for (const StageRecord &r : stages)
        j["stages"].push_back({{"stage", std::string(to_string(r.stage))},
                               {"status", r.status}});
    j["outputs"] = nlohmann::ordered_json::object();
    for (const auto &[path, digest] : output_hashes)
        j["outputs"][path] = digest;
    return j.dump(2) + "\n";
}

PipelineResult run_pipeline(const PipelineConfig &config, const std::vector<Stage> &stages) {
    const std::vector<Stage> plan = resolve_stages(stages, config);
    validate_inputs(config, plan);
    fs::create_directories(config.out_dir);

    Ctx ctx{.cfg = config};
    PipelineResult result;
    result.manifest.tool_version = kToolVersion;
    result.manifest.seed = config.seed;
    result.manifest.config_hash = hash::sha256_hex(canonical_config(config));

    std::vector<std::pair<std::string, double>> timings;
    std::exception_ptr failure;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        StageRecord record;
        record.stage = plan[i];
        if (failure) {
            record.status = "skipped";
            result.manifest.stages.push_back(record);
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        try {
            run_stage(ctx, plan[i]);
            record.ran = true;
            record.status = "ok";
        } catch (const std::exception &e) {
            record.status = std::string("failed: ") + e.what();
            failure = std::current_exception();
            result.ok = false;
        }
        const auto elapsed = std::chrono::duration<double, std::milli>(
            std::chrono::steady_clock::now() - start);
        timings.emplace_back(std::string(to_string(plan[i])), elapsed.count());
        result.manifest.stages.push_back(record);
    }

    result.manifest.input_hashes = ctx.inputs_used;
    result.manifest.output_hashes = ctx.outputs;
    result.warnings = ctx.warnings;

    // Manifest last, via rename, so readers never observe a partial file.
    const fs::path manifest_path = fs::path(config.out_dir) / "manifest.json";
    const fs::path tmp_path = fs::path(config.out_dir) / "manifest.json.tmp";
    write_file(tmp_path, result.manifest.to_json());
    fs::rename(tmp_path, manifest_path);

    // Sidecar diagnostics: wall-clock numbers change run to run, so they stay
    // out of the manifest and out of the determinism contract.
    std::string log;
    for (const auto &[stage, ms] : timings)
        log += stage + " " + csv::fmt(ms, 3) + " ms\n";
    for (const std::string &w : ctx.warnings)
        log += "warning: " + w + "\n";
    write_file(fs::path(config.out_dir) / "timings.log", log);

    if (failure)
        std::rethrow_exception(failure);
    return result;
}

} // namespace feedmine
