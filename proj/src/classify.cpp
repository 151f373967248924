#include "feedmine/classify.hpp"

#include "feedmine/errors.hpp"

#include <algorithm>
#include <map>

namespace feedmine {

namespace {

constexpr std::string_view kDisplayNames[kCategoryCount] = {
    "Addiction",     "Censorship", "Cyberbullying",         "Discrimination",
    "Harmful Advertising",         "Inappropriate Content", "Misinformation",
    "Privacy",       "Safety",     "Scam",                  "Social Isolation"};

constexpr std::string_view kKeys[kCategoryCount] = {
    "addiction",     "censorship", "cyberbullying",         "discrimination",
    "harmful_advertising",         "inappropriate_content", "misinformation",
    "privacy",       "safety",     "scam",                  "social_isolation"};

const std::string kTaskInstructions =
    "You are labeling a user post about a software application. Decide which "
    "ethical concern the post expresses, using the definitions listed after "
    "the post. Choose exactly one label: a single name from the list, or None "
    "if no definition fits. Respond with the label only.";

} // namespace

std::string_view to_string(Category c) {
    if (c == Category::NoneLabel)
        return "None";
    return kDisplayNames[static_cast<int>(c)];
}

std::string_view category_key(Category c) {
    if (c == Category::NoneLabel)
        return "none";
    return kKeys[static_cast<int>(c)];
}

std::optional<Category> category_from_string(std::string_view s) {
    const std::string lower = text::to_lower(s);
    if (lower == "none")
        return Category::NoneLabel;
    for (int i = 0; i < kCategoryCount; ++i) {
        if (lower == text::to_lower(kDisplayNames[i]) || lower == kKeys[i])
            return static_cast<Category>(i);
    }
    return std::nullopt;
}

Taxonomy Taxonomy::load(const std::string &toml_path) {
    return from_table(toml::parse_file(toml_path));
}

Taxonomy Taxonomy::from_table(const toml::Table &root) {
    Taxonomy t;
    const toml::Table &cats = root.table("categories");
    for (int i = 0; i < kCategoryCount; ++i) {
        const std::string key(kKeys[i]);
        if (!cats.has(key))
            throw ConfigError("taxonomy is missing the definition of '" +
                              std::string(kDisplayNames[i]) + "'");
        t.definitions_[i] = cats.get_string(key);
    }
    return t;
}

const std::string &Taxonomy::definition(Category c) const {
    if (c == Category::NoneLabel)
        throw ConfigError("None has no definition");
    return definitions_[static_cast<int>(c)];
}

std::string PromptText::full() const {
    return task_instructions + "\n\n" + windowed_post + "\n\n" + category_definitions;
}

StubDetector::StubDetector(const std::vector<std::string> &terms) {
    std::vector<std::pair<std::string, double>> weighted;
    weighted.reserve(terms.size());
    for (const std::string &t : terms)
        weighted.emplace_back(t, 1.0);
    matcher_ = text::TermMatcher(weighted);
}

StubDetector StubDetector::load(const std::string &toml_path) {
    const toml::Table root = toml::parse_file(toml_path);
    return StubDetector(root.table("detector").get_string_array("concern_terms"));
}

ConcernDetection StubDetector::detect(const WindowedText &windowed) {
    const bool hit = matcher_.match_count(text::tokenize(windowed.text)) > 0;
    return {windowed.post_id, hit, hit ? 1.0 : 0.0, name()};
}

StubCategorizer StubCategorizer::load(const std::string &toml_path) {
    const toml::Table root = toml::parse_file(toml_path);
    const toml::Table &rules = root.table("rules");
    StubCategorizer c;
    for (int i = 0; i < kCategoryCount; ++i) {
        const std::string key(kKeys[i]);
        if (!rules.has(key))
            throw ConfigError("categorizer stub is missing rules for '" + key + "'");
        std::vector<std::pair<std::string, double>> weighted;
        for (const std::string &t : rules.get_string_array(key))
            weighted.emplace_back(t, 1.0);
        c.matchers_[i] = text::TermMatcher(weighted);
    }
    return c;
}

Category StubCategorizer::categorize(const WindowedText &windowed, const Taxonomy &) {
    const std::vector<std::string> tokens = text::tokenize(windowed.text);
    int best = -1;
    std::size_t best_hits = 0;
    for (int i = 0; i < kCategoryCount; ++i) {
        const std::size_t hits = matchers_[i].match_count(tokens);
        if (hits > best_hits) { // ties keep the earlier category
            best_hits = hits;
            best = i;
        }
    }
    return best < 0 ? Category::NoneLabel : static_cast<Category>(best);
}

ConcernDetection detect_concern(const WindowedText &windowed, DetectorClient &client) {
    ConcernDetection d = client.detect(windowed);
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0))
        throw ProtocolError("detector '" + client.name() + "' returned confidence " +
                            std::to_string(d.confidence) + " outside [0, 1] for post " +
                            windowed.post_id);
    return d;
}

PromptText assemble_category_prompt(const WindowedText &windowed, const Taxonomy &taxonomy) {
    PromptText p;
    p.task_instructions = kTaskInstructions;
    p.windowed_post = windowed.text;
    std::string defs = "Categories and their definitions:\n";
    for (int i = 0; i < kCategoryCount; ++i) {
        const Category c = static_cast<Category>(i);
        defs += "- ";
        defs += to_string(c);
        defs += ": ";
        defs += taxonomy.definition(c);
        defs += '\n';
    }
    defs += "Answer None if the post matches no definition.";
    p.category_definitions = std::move(defs);
    return p;
}

Category categorize(const WindowedText &windowed, CategorizerClient &client,
                    const Taxonomy &taxonomy) {
    return client.categorize(windowed, taxonomy);
}

Category parse_category_response(std::string_view reply) {
    std::string_view s = reply;
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\n' ||
                          s.front() == '\r' || s.front() == '"'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\n' ||
                          s.back() == '\r' || s.back() == '.' || s.back() == '"'))
        s.remove_suffix(1);
    if (auto c = category_from_string(s))
        return *c;
    throw ProtocolError("reply '" + std::string(reply) +
                        "' is not a single category label");
}

AgreementReport cohens_kappa(const std::vector<int> &labels_a, const std::vector<int> &labels_b) {
    if (labels_a.size() != labels_b.size())
        throw ConfigError("kappa label lists differ in length");
    if (labels_a.empty())
        throw ConfigError("kappa needs at least one label pair");

    const double n = static_cast<double>(labels_a.size());
    std::size_t agree = 0;
    std::map<int, std::size_t> count_a, count_b;
    for (std::size_t i = 0; i < labels_a.size(); ++i) {
        agree += labels_a[i] == labels_b[i];
        ++count_a[labels_a[i]];
        ++count_b[labels_b[i]];
    }
    AgreementReport r;
    r.n = labels_a.size();
    r.observed_agreement = static_cast<double>(agree) / n;
    double pe = 0.0;
    for (const auto &[label, ca] : count_a) {
        auto it = count_b.find(label);
        if (it != count_b.end())
            pe += (static_cast<double>(ca) / n) * (static_cast<double>(it->second) / n);
    }
    r.expected_agreement = pe;
    // pe can only reach 1 when both raters use a single shared label, which
    // forces po = 1; perfect agreement is reported as kappa 1.
    r.kappa = pe >= 1.0 ? 1.0 : (r.observed_agreement - pe) / (1.0 - pe);
    return r;
}

AgreementReport cohens_kappa(const std::vector<Category> &labels_a,
                             const std::vector<Category> &labels_b) {
    std::vector<int> a, b;
    a.reserve(labels_a.size());
    b.reserve(labels_b.size());
    for (Category c : labels_a)
        a.push_back(static_cast<int>(c));
    for (Category c : labels_b)
        b.push_back(static_cast<int>(c));
    return cohens_kappa(a, b);
}

std::vector<Category>
evaluate_category_labels(const std::vector<std::pair<Category, bool>> &judgments,
                         int per_category_n, int keep_threshold) {
    std::map<Category, std::pair<int, int>> tally; // category -> (total, valid)
    for (const auto &[category, valid] : judgments) {
        auto &t = tally[category];
        ++t.first;
        t.second += valid ? 1 : 0;
    }
    std::vector<Category> kept;
    for (const auto &[category, t] : tally) {
        if (t.first != per_category_n)
            throw ConfigError("category '" + std::string(to_string(category)) + "' has " +
                              std::to_string(t.first) + " judgments, expected " +
                              std::to_string(per_category_n));
        if (t.second >= keep_threshold)
            kept.push_back(category);
    }
    return kept;
}

} // namespace feedmine
