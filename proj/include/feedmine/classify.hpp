#pragma once

#include "feedmine/corpus.hpp"
#include "feedmine/text.hpp"
#include "feedmine/toml_lite.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace feedmine {

enum class Category {
    Addiction,
    Censorship,
    Cyberbullying,
    Discrimination,
    HarmfulAdvertising,
    InappropriateContent,
    Misinformation,
    Privacy,
    Safety,
    Scam,
    SocialIsolation,
    NoneLabel
};
inline constexpr int kCategoryCount = 11; // NoneLabel excluded

std::string_view to_string(Category c);   // display name, e.g. "Harmful Advertising"
std::string_view category_key(Category c); // config key, e.g. "harmful_advertising"
std::optional<Category> category_from_string(std::string_view s); // either form, case-insensitive

/// Category definitions, loaded from the taxonomy file. All eleven must be
/// present.
class Taxonomy {
  public:
    static Taxonomy load(const std::string &toml_path);
    static Taxonomy from_table(const toml::Table &root);

    const std::string &definition(Category c) const;

  private:
    std::array<std::string, kCategoryCount> definitions_{};
};

struct ConcernDetection {
    std::string post_id;
    bool is_concern = false;
    double confidence = 0.0; // in [0, 1]
    std::string source;
};

struct PromptText {
    std::string task_instructions;
    std::string category_definitions;
    std::string windowed_post;

    /// task + post + definitions with fixed separators; byte-deterministic.
    std::string full() const;
};

class DetectorClient {
  public:
    virtual ~DetectorClient() = default;
    virtual std::string name() const = 0;
    /// Must be safe for concurrent calls when max_parallelism() > 1.
    virtual ConcernDetection detect(const WindowedText &windowed) = 0;
    virtual int max_parallelism() const { return 1; }
};

class CategorizerClient {
  public:
    virtual ~CategorizerClient() = default;
    virtual std::string name() const = 0;
    virtual Category categorize(const WindowedText &windowed, const Taxonomy &taxonomy) = 0;
    virtual int max_parallelism() const { return 1; }
};

/// Deterministic keyword-rule detector: any whole-word hit on the configured
/// term list flags the post (confidence 1.0, otherwise 0.0).
class StubDetector : public DetectorClient {
  public:
    static StubDetector load(const std::string &toml_path);
    explicit StubDetector(const std::vector<std::string> &terms);

    std::string name() const override { return "stub"; }
    ConcernDetection detect(const WindowedText &windowed) override;
    int max_parallelism() const override { return 64; } // pure function

  private:
    text::TermMatcher matcher_;
};

/// Deterministic keyword-rule categorizer: the category with the most term
/// hits wins; ties resolve to taxonomy order; zero hits means NoneLabel.
class StubCategorizer : public CategorizerClient {
  public:
    static StubCategorizer load(const std::string &toml_path);

    std::string name() const override { return "stub"; }
    Category categorize(const WindowedText &windowed, const Taxonomy &taxonomy) override;
    int max_parallelism() const override { return 64; }

  private:
    std::array<text::TermMatcher, kCategoryCount> matchers_;
};

/// Wraps a client verdict with range checks (confidence outside [0,1] is a
/// protocol violation regardless of the client implementation).
ConcernDetection detect_concern(const WindowedText &windowed, DetectorClient &client);

PromptText assemble_category_prompt(const WindowedText &windowed, const Taxonomy &taxonomy);

Category categorize(const WindowedText &windowed, CategorizerClient &client,
                    const Taxonomy &taxonomy);

/// Single-label contract for text replies: trims whitespace and a trailing
/// period, matches one category name case-insensitively ("None" allowed);
/// anything else is a protocol error.
Category parse_category_response(std::string_view reply);

struct AgreementReport {
    double kappa = 0.0;
    double observed_agreement = 0.0;
    double expected_agreement = 0.0;
    std::size_t n = 0;
};

AgreementReport cohens_kappa(const std::vector<int> &labels_a, const std::vector<int> &labels_b);
AgreementReport cohens_kappa(const std::vector<Category> &labels_a,
                             const std::vector<Category> &labels_b);

/// Keeps the categories whose valid-judgment count reaches keep_threshold.
/// Every judged category must carry exactly per_category_n judgments.
std::vector<Category>
evaluate_category_labels(const std::vector<std::pair<Category, bool>> &judgments,
                         int per_category_n = 10, int keep_threshold = 8);

} // namespace feedmine
