#pragma once

#include "feedmine/text.hpp"
#include "feedmine/toml_lite.hpp"

#include <string>
#include <utility>
#include <vector>

namespace feedmine {

enum class PriorityTheme { Harm, Negativity, Children };

inline constexpr PriorityTheme kPriorityThemes[] = {
    PriorityTheme::Harm, PriorityTheme::Negativity, PriorityTheme::Children};

const char *to_string(PriorityTheme theme);

struct ThemeScores {
    std::string post_id;
    double harm = 0.0;
    double negativity = 0.0;
    double children = 0.0;

    double get(PriorityTheme theme) const;
};

/// "term" or "term:weight" list entries; weight defaults to 1.
std::pair<std::string, double> parse_weighted_term(const std::string &entry);

/// Topic term lists plus the binding of each priority theme to its topics.
/// Scores are normalized weighted lexicon counts: matched term weight per
/// token of the scored text.
class TopicLexicon {
  public:
    static TopicLexicon load(const std::string &path, bool stem = false);
    static TopicLexicon from_table(const toml::Table &table, bool stem = false);

    const std::vector<std::string> &topic_names() const { return topic_names_; }
    const std::vector<std::string> &theme_topics(PriorityTheme theme) const;

    double topic_score(const std::vector<std::string> &tokens, const std::string &topic) const;
    double theme_score(const std::vector<std::string> &tokens, PriorityTheme theme) const;

    /// All three theme scores for one post's full text.
    ThemeScores score(const std::string &post_id, const std::string &full_text) const;

    bool stemming() const { return stem_; }

  private:
    std::vector<std::string> topic_names_;
    std::vector<text::TermMatcher> matchers_; // parallel to topic_names_
    std::vector<std::string> theme_topics_[3];
    bool stem_ = false;

    std::size_t topic_index(const std::string &topic) const;
    double score_tokens(const std::vector<std::string> &tokens, std::size_t topic_idx) const;
};

} // namespace feedmine
