#include "doctest.h"

#include "feedmine/errors.hpp"
#include "feedmine/themes.hpp"
#include "feedmine/text.hpp"
#include "feedmine/toml_lite.hpp"

#include "fixtures/equations_expected.hpp"
#include "test_support.hpp"

#include <cmath>
#include <string>

using namespace feedmine;

TEST_CASE("parse_weighted_term splits optional weights") {
    CHECK(parse_weighted_term("massacre:2") == std::pair<std::string, double>{"massacre", 2.0});
    CHECK(parse_weighted_term("kill") == std::pair<std::string, double>{"kill", 1.0});
    CHECK(parse_weighted_term("half:0.5").second == 0.5);
    CHECK_THROWS_AS(parse_weighted_term("oops:notanumber"), ConfigError);
}

TEST_CASE("shipped lexicon loads with the three theme bundles") {
    const TopicLexicon lex = TopicLexicon::load(testsup::data_path("theme_lexicon.toml"));
    CHECK_FALSE(lex.topic_names().empty());
    for (PriorityTheme theme : kPriorityThemes)
        CHECK_FALSE(lex.theme_topics(theme).empty());
    CHECK_FALSE(lex.stemming());
}

TEST_CASE("theme scores match the hand-scored sentence") {
    const TopicLexicon lex = TopicLexicon::load(testsup::data_path("theme_lexicon.toml"));
    const ThemeScores s =
        lex.score("s1", "he threatened to kill her, the violence was terrifying");
    CHECK(s.post_id == "s1");
    CHECK(std::abs(s.harm - expected::kSentenceTheme[0]) < 1e-12);
    CHECK(std::abs(s.negativity - expected::kSentenceTheme[1]) < 1e-12);
    CHECK(std::abs(s.children - expected::kSentenceTheme[2]) < 1e-12);
}

TEST_CASE("topic scores are match weight over token count") {
    const toml::Table t = toml::parse(
        "[topics]\n"
        "violence = [\"kill\", \"massacre:2\"]\n"
        "calm = [\"peace\"]\n"
        "kids = [\"child\"]\n"
        "[themes]\n"
        "harm = [\"violence\"]\n"
        "negativity = [\"calm\"]\n"
        "children = [\"kids\"]\n");
    const TopicLexicon lex = TopicLexicon::from_table(t);
    const auto tokens = text::tokenize("they kill and kill after the massacre");
    // 7 tokens; kill twice (weight 1) plus massacre once (weight 2)
    CHECK(lex.topic_score(tokens, "violence") == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
    CHECK(lex.topic_score(tokens, "calm") == 0.0);
    CHECK(lex.theme_score(tokens, PriorityTheme::Harm) ==
          doctest::Approx(4.0 / 7.0).epsilon(1e-12));
    CHECK_THROWS_AS(lex.topic_score(tokens, "nosuchtopic"), NotFoundError);
}

TEST_CASE("stemming folds plural forms on both sides") {
    const std::string src =
        "[topics]\n"
        "violence = [\"threat\"]\n"
        "calm = [\"peace\"]\n"
        "kids = [\"child\"]\n"
        "[themes]\n"
        "harm = [\"violence\"]\n"
        "negativity = [\"calm\"]\n"
        "children = [\"kids\"]\n";
    const TopicLexicon plain = TopicLexicon::from_table(toml::parse(src), false);
    const TopicLexicon stemmed = TopicLexicon::from_table(toml::parse(src), true);
    CHECK(stemmed.stemming());

    const auto tokens = text::tokenize("the threats continue");
    CHECK(plain.topic_score(tokens, "violence") == 0.0);
    CHECK(stemmed.topic_score(tokens, "violence") ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("lexicon validation rejects malformed tables") {
    CHECK_THROWS_AS(TopicLexicon::from_table(toml::parse("[topics]\n")), ConfigError);
    CHECK_THROWS_AS(TopicLexicon::from_table(toml::parse(
                        "[topics]\nviolence = [\"kill\"]\n[themes]\nharm = [\"violence\"]\n")),
                    ConfigError); // negativity and children bundles missing
    CHECK_THROWS_AS(
        TopicLexicon::from_table(toml::parse("[topics]\nviolence = [\"kill\"]\n"
                                             "[themes]\nharm = [\"unknown\"]\n"
                                             "negativity = [\"violence\"]\n"
                                             "children = [\"violence\"]\n")),
        NotFoundError); // theme references a topic that does not exist
}
