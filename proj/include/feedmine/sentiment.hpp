#pragma once

#include "feedmine/toml_lite.hpp"

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

namespace feedmine {

struct ToxicityAttributes {
    double toxicity = 0.0;
    double severe_toxicity = 0.0;
    double insult = 0.0;
    double profanity = 0.0;
    double threat = 0.0;
    double identity_attack = 0.0;
};

/// Attribute keys in aggregation (weight a..f) order.
inline constexpr const char *kToxicityAttributeNames[] = {
    "toxicity", "severe_toxicity", "insult", "profanity", "threat", "identity_attack"};

struct ValenceScore {
    double compound = 0.0; // in [-1, 1]; positive for positive text
};

struct SentimentWeights {
    double w_a = 1.0; // toxicity
    double w_b = 1.0; // severe_toxicity
    double w_c = 1.0; // insult
    double w_d = 1.0; // profanity
    double w_e = 1.0; // threat
    double w_f = 1.0; // identity_attack (enters un-normalized)
    double w_g = 1.0; // negated valence
};

/// Token-valence table in the usual sentiment-lexicon TSV layout:
/// token <tab> mean valence <tab> anything else (ignored).
class ValenceLexicon {
  public:
    static ValenceLexicon load(const std::string &path);
    static ValenceLexicon from_text(const std::string &tsv);

    std::size_t size() const { return table_.size(); }
    bool contains(const std::string &token) const { return table_.count(token) != 0; }

    /// Rule-based compound score: lexicon token valences, an immediately
    /// preceding intensifier pushes the value 0.293 away from zero, a negator
    /// within the 3 preceding tokens then scales it by -0.74; the sum S maps
    /// to S/sqrt(S^2+15). Empty or hit-free text scores 0.
    ValenceScore score(const std::string &text) const;

  private:
    std::unordered_map<std::string, double> table_;
};

class ToxicityProvider {
  public:
    virtual ~ToxicityProvider() = default;
    virtual std::string name() const = 0;
    virtual ToxicityAttributes score(const std::string &post_id, const std::string &text) = 0;
    virtual int max_parallelism() const { return 1; }
};

/// Deterministic offline provider: each attribute is min(1, hits/5) over its
/// configured term list.
class StubToxicity : public ToxicityProvider {
  public:
    static StubToxicity load(const std::string &path);
    static StubToxicity from_table(const toml::Table &table);

    std::string name() const override { return "stub"; }
    ToxicityAttributes score(const std::string &post_id, const std::string &text) override;
    int max_parallelism() const override { return 8; }

  private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

/// Runs the provider and range-checks its reply; out-of-range attributes are
/// a protocol error naming the post.
ToxicityAttributes toxicity(const std::string &post_id, const std::string &text,
                            ToxicityProvider &provider);

struct SentimentNorms {
    // min/max per normalized column; vad covers the negated compound values.
    double tox_min = 0.0, tox_max = 0.0;
    double sev_min = 0.0, sev_max = 0.0;
    double ins_min = 0.0, ins_max = 0.0;
    double pro_min = 0.0, pro_max = 0.0;
    double thr_min = 0.0, thr_max = 0.0;
    double vad_min = 0.0, vad_max = 0.0;
    double ide_min = 0.0, ide_max = 0.0; // used only when normalize_identity
};

/// (v - lo) / (hi - lo); 0 when the range is degenerate.
double normalize_value(double v, double lo, double hi);

/// Weighted sum of the seven sentiment terms, accumulated in a..g order.
/// identity_attack enters raw unless normalize_identity is set.
double aggregate_sentiment(const ToxicityAttributes &attrs, const ValenceScore &vad,
                           const SentimentWeights &weights, const SentimentNorms &norms,
                           bool normalize_identity = false);

} // namespace feedmine
