#include "feedmine/sentiment.hpp"

#include "feedmine/errors.hpp"
#include "feedmine/text.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace feedmine {

namespace {

constexpr double kIntensifierBoost = 0.293;
constexpr double kNegationScale = -0.74;
constexpr std::size_t kNegationWindow = 3;
constexpr double kAlpha = 15.0;

const std::unordered_set<std::string> kNegators = {
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
    "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
    "never", "none", "nope", "nor", "not", "nothing", "nowhere", "oughtnt",
    "shant", "shouldnt", "wasnt", "werent", "wont", "wouldnt", "rarely",
    "seldom", "hardly", "scarcely",
};

const std::unordered_set<std::string> kIntensifiers = {
    "absolutely", "amazingly", "completely", "considerably", "decidedly",
    "deeply", "enormously", "entirely", "especially", "exceptionally",
    "extremely", "fabulously", "fully", "greatly", "highly", "hugely",
    "incredibly", "intensely", "majorly", "more", "most", "particularly",
    "purely", "quite", "really", "remarkably", "so", "substantially",
    "thoroughly", "totally", "tremendously", "unbelievably", "unusually",
    "utterly", "very",
};

// Contractions must survive tokenization as single words ("don't" -> "dont"),
// so apostrophes (ASCII and U+2019) are removed before splitting.
std::string strip_apostrophes(const std::string &text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size();) {
        if (text[i] == '\'') {
            ++i;
            continue;
        }
        if (i + 2 < text.size() && static_cast<unsigned char>(text[i]) == 0xE2 &&
            static_cast<unsigned char>(text[i + 1]) == 0x80 &&
            static_cast<unsigned char>(text[i + 2]) == 0x99) {
            i += 3;
            continue;
        }
        out.push_back(text[i]);
        ++i;
    }
    return out;
}

} // namespace

ValenceLexicon ValenceLexicon::load(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open valence lexicon: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return from_text(buf.str());
}

ValenceLexicon ValenceLexicon::from_text(const std::string &tsv) {
    ValenceLexicon lex;
    std::istringstream in(tsv);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0)
            throw ConfigError("valence lexicon line " + std::to_string(lineno) +
                              ": expected token<TAB>valence");
        const std::string token = line.substr(0, tab);
        auto rest = line.substr(tab + 1);
        const auto tab2 = rest.find('\t');
        if (tab2 != std::string::npos)
            rest = rest.substr(0, tab2);
        char *end = nullptr;
        const double v = std::strtod(rest.c_str(), &end);
        if (end == rest.c_str())
            throw ConfigError("valence lexicon line " + std::to_string(lineno) +
                              ": bad valence for token " + token);
        lex.table_[token] = v;
    }
    return lex;
}

ValenceScore ValenceLexicon::score(const std::string &text) const {
    const auto tokens = text::tokenize(strip_apostrophes(text));
    double s = 0.0;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string &tok = tokens[i];
        if (kIntensifiers.count(tok))
            continue;
        const auto it = table_.find(tok);
        if (it == table_.end())
            continue;
        double v = it->second;
        if (i > 0 && kIntensifiers.count(tokens[i - 1])) {
            if (v > 0)
                v += kIntensifierBoost;
            else if (v < 0)
                v -= kIntensifierBoost;
        }
        const std::size_t lo = i >= kNegationWindow ? i - kNegationWindow : 0;
        for (std::size_t j = lo; j < i; ++j) {
            if (kNegators.count(tokens[j])) {
                v *= kNegationScale;
                break;
            }
        }
        s += v;
    }
    if (s == 0.0)
        return {0.0};
    return {s / std::sqrt(s * s + kAlpha)};
}

struct StubToxicity::Impl {
    text::TermMatcher matchers[6];
};

StubToxicity StubToxicity::load(const std::string &path) {
    return from_table(toml::parse_file(path));
}

StubToxicity StubToxicity::from_table(const toml::Table &table) {
    StubToxicity stub;
    stub.impl_ = std::make_shared<Impl>();
    if (!table.has("attributes"))
        throw ConfigError("toxicity stub lacks an [attributes] table");
    const toml::Table &attrs = table.table("attributes");
    for (int a = 0; a < 6; ++a) {
        const char *key = kToxicityAttributeNames[a];
        if (!attrs.has(key))
            throw ConfigError(std::string("toxicity stub lacks attribute: ") + key);
        std::vector<std::pair<std::string, double>> terms;
        for (const auto &t : attrs.get_string_array(key))
            terms.emplace_back(t, 1.0);
        if (terms.empty())
            throw ConfigError(std::string("toxicity stub attribute has no terms: ") + key);
        stub.impl_->matchers[a] = text::TermMatcher(terms);
    }
    return stub;
}

ToxicityAttributes StubToxicity::score(const std::string &, const std::string &text) {
    const auto tokens = text::tokenize(text);
    double vals[6];
    for (int a = 0; a < 6; ++a) {
        const double hits = static_cast<double>(impl_->matchers[a].match_count(tokens));
        vals[a] = std::min(1.0, hits / 5.0);
    }
    return {vals[0], vals[1], vals[2], vals[3], vals[4], vals[5]};
}

ToxicityAttributes toxicity(const std::string &post_id, const std::string &text,
                            ToxicityProvider &provider) {
    const ToxicityAttributes attrs = provider.score(post_id, text);
    const double vals[6] = {attrs.toxicity, attrs.severe_toxicity, attrs.insult,
                            attrs.profanity, attrs.threat,         attrs.identity_attack};
    for (int a = 0; a < 6; ++a) {
        if (!(vals[a] >= 0.0 && vals[a] <= 1.0))
            throw ProtocolError("post " + post_id + ": toxicity attribute " +
                                kToxicityAttributeNames[a] + " out of [0,1]: " +
                                std::to_string(vals[a]));
    }
    return attrs;
}

double normalize_value(double v, double lo, double hi) {
    if (hi == lo)
        return 0.0;
    return (v - lo) / (hi - lo);
}

double aggregate_sentiment(const ToxicityAttributes &attrs, const ValenceScore &vad,
                           const SentimentWeights &weights, const SentimentNorms &norms,
                           bool normalize_identity) {
    const double ide = normalize_identity
                           ? normalize_value(attrs.identity_attack, norms.ide_min, norms.ide_max)
                           : attrs.identity_attack;
    const double terms[7] = {
        normalize_value(attrs.toxicity, norms.tox_min, norms.tox_max),
        normalize_value(attrs.severe_toxicity, norms.sev_min, norms.sev_max),
        normalize_value(attrs.insult, norms.ins_min, norms.ins_max),
        normalize_value(attrs.profanity, norms.pro_min, norms.pro_max),
        normalize_value(attrs.threat, norms.thr_min, norms.thr_max),
        ide,
        normalize_value(-vad.compound, norms.vad_min, norms.vad_max),
    };
    const double w[7] = {weights.w_a, weights.w_b, weights.w_c, weights.w_d,
                         weights.w_e, weights.w_f, weights.w_g};
    double acc = 0.0;
    for (int k = 0; k < 7; ++k)
        acc = acc + w[k] * terms[k];
    return acc;
}

} // namespace feedmine
