#include "feedmine/themes.hpp"

#include "feedmine/errors.hpp"

#include <algorithm>
#include <cstdlib>

namespace feedmine {

namespace {

constexpr const char *kThemeKeys[] = {"harm", "negativity", "children"};

// Light plural stemming used only when the lexicon enables it: drops a
// trailing "s" from longer words ("ads" stays two-letter "ad"-less).
std::string stem_word(const std::string &w) {
    if (w.size() > 3 && w.back() == 's' && w[w.size() - 2] != 's')
        return w.substr(0, w.size() - 1);
    return w;
}

std::vector<std::string> stem_all(std::vector<std::string> tokens) {
    for (auto &t : tokens)
        t = stem_word(t);
    return tokens;
}

} // namespace

const char *to_string(PriorityTheme theme) {
    return kThemeKeys[static_cast<int>(theme)];
}

double ThemeScores::get(PriorityTheme theme) const {
    switch (theme) {
    case PriorityTheme::Harm: return harm;
    case PriorityTheme::Negativity: return negativity;
    case PriorityTheme::Children: return children;
    }
    return 0.0;
}

std::pair<std::string, double> parse_weighted_term(const std::string &entry) {
    const auto pos = entry.rfind(':');
    if (pos == std::string::npos)
        return {entry, 1.0};
    const std::string term = entry.substr(0, pos);
    const std::string w = entry.substr(pos + 1);
    char *end = nullptr;
    const double weight = std::strtod(w.c_str(), &end);
    if (end == w.c_str() || *end != '\0')
        throw ConfigError("bad term weight in lexicon entry: " + entry);
    return {term, weight};
}

TopicLexicon TopicLexicon::load(const std::string &path, bool stem) {
    return from_table(toml::parse_file(path), stem);
}

TopicLexicon TopicLexicon::from_table(const toml::Table &table, bool stem) {
    TopicLexicon lex;
    lex.stem_ = stem;
    if (!table.has("topics"))
        throw ConfigError("theme lexicon lacks a [topics] table");
    const toml::Table &topics = table.table("topics");
    for (const std::string &name : topics.keys()) {
        std::vector<std::pair<std::string, double>> weighted;
        for (const std::string &entry : topics.get_string_array(name)) {
            auto [term, weight] = parse_weighted_term(entry);
            if (stem) {
                std::string stemmed;
                for (const auto &w : stem_all(text::tokenize(term))) {
                    if (!stemmed.empty())
                        stemmed += ' ';
                    stemmed += w;
                }
                term = stemmed;
            }
            weighted.emplace_back(term, weight);
        }
        if (weighted.empty())
            throw ConfigError("topic has no terms: " + name);
        lex.topic_names_.push_back(name);
        lex.matchers_.emplace_back(weighted);
    }

    if (!table.has("themes"))
        throw ConfigError("theme lexicon lacks a [themes] table");
    const toml::Table &themes = table.table("themes");
    std::vector<std::string> seen;
    for (int t = 0; t < 3; ++t) {
        const char *key = kThemeKeys[t];
        if (!themes.has(key))
            throw ConfigError(std::string("theme lexicon lacks theme: ") + key);
        auto topic_list = themes.get_string_array(key);
        if (topic_list.empty())
            throw ConfigError(std::string("theme has no topics: ") + key);
        for (const auto &topic : topic_list) {
            lex.topic_index(topic); // throws on unknown topics
            if (std::find(seen.begin(), seen.end(), topic) != seen.end())
                throw ConfigError("topic bound to more than one theme: " + topic);
            seen.push_back(topic);
        }
        lex.theme_topics_[t] = std::move(topic_list);
    }
    return lex;
}

const std::vector<std::string> &TopicLexicon::theme_topics(PriorityTheme theme) const {
    return theme_topics_[static_cast<int>(theme)];
}

std::size_t TopicLexicon::topic_index(const std::string &topic) const {
    const auto it = std::find(topic_names_.begin(), topic_names_.end(), topic);
    if (it == topic_names_.end())
        throw NotFoundError("unknown topic: " + topic);
    return static_cast<std::size_t>(it - topic_names_.begin());
}

double TopicLexicon::score_tokens(const std::vector<std::string> &tokens,
                                  std::size_t topic_idx) const {
    if (tokens.empty())
        return 0.0;
    return matchers_[topic_idx].match_weight(tokens) / static_cast<double>(tokens.size());
}

double TopicLexicon::topic_score(const std::vector<std::string> &tokens,
                                 const std::string &topic) const {
    if (!stem_)
        return score_tokens(tokens, topic_index(topic));
    return score_tokens(stem_all(tokens), topic_index(topic));
}

double TopicLexicon::theme_score(const std::vector<std::string> &tokens,
                                 PriorityTheme theme) const {
    std::vector<std::string> stemmed;
    const std::vector<std::string> *use = &tokens;
    if (stem_) {
        stemmed = stem_all(tokens);
        use = &stemmed;
    }
    double total = 0.0;
    for (const auto &topic : theme_topics_[static_cast<int>(theme)])
        total += score_tokens(*use, topic_index(topic));
    return total;
}

ThemeScores TopicLexicon::score(const std::string &post_id, const std::string &full_text) const {
    const auto tokens = text::tokenize(full_text);
    ThemeScores s;
    s.post_id = post_id;
    s.harm = theme_score(tokens, PriorityTheme::Harm);
    s.negativity = theme_score(tokens, PriorityTheme::Negativity);
    s.children = theme_score(tokens, PriorityTheme::Children);
    return s;
}

} // namespace feedmine
