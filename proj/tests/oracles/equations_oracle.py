"""Spreadsheet-style oracle for the scoring equations.

Reads the 10-post fixture and the shipped lexicons, recomputes every scoring
quantity independently of the C++ implementation, and freezes the expected
values into tests/fixtures/equations_expected.hpp. Run from anywhere:

    python3 tests/oracles/equations_oracle.py
"""

import json
import math
import os
import sys

import tomli

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
from textmatch import TermMatcher, parse_weighted_term, tokenize  # noqa: E402
from xoshiro import Xoshiro  # noqa: E402

ROOT = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
DATA = os.path.join(ROOT, "data")
FIXTURES = os.path.join(ROOT, "tests", "fixtures")

EPSILON = 1e-9
BIN_COUNT = 10

# Valence rule constants (reduced VADER): see sentiment scorer design notes.
INTENSIFIER_BOOST = 0.293
NEGATION_SCALE = -0.74
NEGATION_WINDOW = 3
ALPHA = 15.0

NEGATORS = {
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
    "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
    "never", "none", "nope", "nor", "not", "nothing", "nowhere", "oughtnt",
    "shant", "shouldnt", "wasnt", "werent", "wont", "wouldnt", "rarely",
    "seldom", "hardly", "scarcely",
}

INTENSIFIERS = {
    "absolutely", "amazingly", "completely", "considerably", "decidedly",
    "deeply", "enormously", "entirely", "especially", "exceptionally",
    "extremely", "fabulously", "fully", "greatly", "highly", "hugely",
    "incredibly", "intensely", "majorly", "more", "most", "particularly",
    "purely", "quite", "really", "remarkably", "so", "substantially",
    "thoroughly", "totally", "tremendously", "unbelievably", "unusually",
    "utterly", "very",
}

THEMES = ("harm", "negativity", "children")
TOX_ATTRS = ("toxicity", "severe_toxicity", "insult", "profanity", "threat",
             "identity_attack")


def load_toml(path):
    with open(path, "rb") as f:
        return tomli.load(f)


def strip_weights(entries):
    return [parse_weighted_term(e) for e in entries]


def valence_tokens(text):
    return tokenize(text.replace("'", "").replace("’", ""))


def compound_valence(text, lexicon):
    tokens = valence_tokens(text)
    s = 0.0
    for i, tok in enumerate(tokens):
        if tok in INTENSIFIERS or tok not in lexicon:
            continue
        v = lexicon[tok]
        if i > 0 and tokens[i - 1] in INTENSIFIERS:
            if v > 0:
                v += INTENSIFIER_BOOST
            elif v < 0:
                v -= INTENSIFIER_BOOST
        lo = max(0, i - NEGATION_WINDOW)
        if any(t in NEGATORS for t in tokens[lo:i]):
            v *= NEGATION_SCALE
        s += v
    if s == 0.0:
        return 0.0
    return s / math.sqrt(s * s + ALPHA)


def histogram_phi(values, bin_count):
    lo, hi = min(values), max(values)
    if hi == lo:
        return [1.0], [0] * len(values), lo, hi
    width = (hi - lo) / bin_count
    counts = [0] * bin_count
    idx = []
    for v in values:
        b = min(bin_count - 1, int((v - lo) / width))
        counts[b] += 1
        idx.append(b)
    n = len(values)
    floored = [max(c / n, EPSILON) for c in counts]
    total = sum(floored)
    phi = [max(x / total, EPSILON) for x in floored]
    return phi, idx, lo, hi


def entropy_term(phi):
    return -(phi * math.log2(phi))


def normalize(values):
    lo, hi = min(values), max(values)
    if hi == lo:
        return [0.0] * len(values)
    rng = hi - lo
    return [(v - lo) / rng for v in values]


def weighted_chain(weights, feats):
    s = 0.0
    for w, v in zip(weights, feats):
        s = s + w * v
    return s


def fmt(x):
    return repr(float(x))


def main():
    theme_cfg = load_toml(os.path.join(DATA, "theme_lexicon.toml"))
    tox_cfg = load_toml(os.path.join(DATA, "toxicity_stub.toml"))

    topic_matchers = {
        name: TermMatcher(strip_weights(terms))
        for name, terms in theme_cfg["topics"].items()
    }
    theme_topics = theme_cfg["themes"]
    tox_matchers = {
        attr: TermMatcher([(t, 1.0) for t in terms])
        for attr, terms in tox_cfg["attributes"].items()
    }

    vlex = {}
    with open(os.path.join(DATA, "valence_lexicon.tsv")) as f:
        for line in f:
            parts = line.rstrip("\n").split("\t")
            if len(parts) >= 2 and parts[0]:
                vlex[parts[0]] = float(parts[1])
    assert vlex["good"] == 1.9

    posts = []
    with open(os.path.join(FIXTURES, "posts10.jsonl")) as f:
        for line in f:
            posts.append(json.loads(line))

    ids = [p["id"] for p in posts]
    texts = [p["title"] + "\n" + p["body"] for p in posts]
    token_lists = [tokenize(t) for t in texts]

    # Theme scores (per-topic normalized counts summed per theme).
    theme_scores = {th: [] for th in THEMES}
    for tokens in token_lists:
        n = len(tokens)
        for th in THEMES:
            total = 0.0
            for topic in theme_topics[th]:
                total += topic_matchers[topic].match_weight(tokens) / n if n else 0.0
            theme_scores[th].append(total)

    # Histogram distribution and per-post total entropy.
    phi_by_theme, bin_by_theme = {}, {}
    for th in THEMES:
        phi, idx, _, _ = histogram_phi(theme_scores[th], BIN_COUNT)
        phi_by_theme[th] = phi
        bin_by_theme[th] = idx
    ent_total = []
    for i in range(len(posts)):
        h = 0.0
        for th in THEMES:
            h += entropy_term(phi_by_theme[th][bin_by_theme[th][i]])
        ent_total.append(h)

    # Recency and popularity.
    rec = [float(p["created_utc"] // 86400) for p in posts]
    max_up = max(p["upvotes"] for p in posts)
    max_com = max(p["num_comments"] for p in posts)
    pop = []
    for p in posts:
        a = p["upvotes"] / max_up if max_up > 0 else 0.0
        b = p["num_comments"] / max_com if max_com > 0 else 0.0
        pop.append(a + p["upvote_ratio"] + b)

    # Toxicity stub attributes: min(1, hits/5).
    tox = {attr: [] for attr in TOX_ATTRS}
    for tokens in token_lists:
        for attr in TOX_ATTRS:
            hits = tox_matchers[attr].match_count(tokens)
            tox[attr].append(min(1.0, hits / 5.0))

    vad = [compound_valence(t, vlex) for t in texts]

    # Feature columns in weight order a..j; identity_attack stays raw, the
    # valence column normalizes the negated compound.
    cols = [
        normalize(tox["toxicity"]),
        normalize(tox["severe_toxicity"]),
        normalize(tox["insult"]),
        normalize(tox["profanity"]),
        normalize(tox["threat"]),
        tox["identity_attack"],
        normalize([-v for v in vad]),
        normalize(ent_total),
        normalize(rec),
        normalize(pop),
    ]

    ones = [1.0] * 10
    tuned = [1.0, 1.0, 1.0, 1.0, 1.0, 10.0, 1.0, 5.0, 2.0, 5.0]

    def scores(weights, ncols):
        return [
            weighted_chain(weights[:ncols], [cols[c][i] for c in range(ncols)])
            for i in range(len(posts))
        ]

    sent_ones = scores(ones, 7)
    sent_tuned = scores(tuned, 7)
    prio_ones = scores(ones, 10)
    prio_tuned = scores(tuned, 10)

    # Single-sentence theme fixture.
    sent_tokens = tokenize("he threatened to kill her, the violence was terrifying")
    sent_theme = {}
    for th in THEMES:
        total = 0.0
        for topic in theme_topics[th]:
            total += topic_matchers[topic].match_weight(sent_tokens) / len(sent_tokens)
        sent_theme[th] = total

    # Eight-score, two-bin histogram fixture for the entropy path.
    hist8_scores = [0.0, 0.0, 0.0, 0.0, 0.1, 0.1, 0.4, 0.5]
    phi8, idx8, _, _ = histogram_phi(hist8_scores, 2)
    ent8 = [entropy_term(phi8[b]) for b in idx8]

    # Valence rule spot checks from the scorer's contract.
    single = 2.0 / math.sqrt(2.0 * 2.0 + ALPHA)
    assert abs(single - 0.4588) < 5e-5
    ng = compound_valence("not good", vlex)
    s_ng = 1.9 * NEGATION_SCALE
    assert abs(s_ng - (-1.406)) < 1e-12
    assert abs(ng - (-0.3412)) < 5e-5

    # Stratified-sample refill enumeration: one community, domain "business"
    # holds 1 post, domain "entertainment" holds 10; per_stratum 3, seed 0.
    # Pass 1: short stratum keeps its post (no RNG); the full stratum picks 3
    # by partial Fisher-Yates. Pass 2 refills 2 round-robin (only one other
    # domain) picking uniformly among unchosen posts in corpus order.
    rng = Xoshiro(0)
    b_ids = [f"b{i:02d}" for i in range(1, 11)]
    idx = list(range(10))
    for t in range(3):
        j = t + rng.next_below(10 - t)
        idx[t], idx[j] = idx[j], idx[t]
    chosen_b = {idx[t] for t in range(3)}
    refill = []
    for _ in range(2):
        remaining = [i for i in range(10) if i not in chosen_b]
        pick = remaining[rng.next_below(len(remaining))]
        chosen_b.add(pick)
        refill.append(pick)
    sample_ids = ["a01"] + [b_ids[i] for i in sorted(chosen_b)]

    out = []
    out.append("// Generated by tests/oracles/equations_oracle.py — do not edit.")
    out.append("#pragma once")
    out.append("")
    out.append("namespace expected {")
    out.append("")
    out.append(f"inline constexpr int kPostCount = {len(posts)};")
    out.append("inline constexpr const char *kIds[] = {"
               + ", ".join(f'"{i}"' for i in ids) + "};")

    def emit(name, vals):
        out.append(f"inline constexpr double {name}[] = {{"
                   + ", ".join(fmt(v) for v in vals) + "};")

    emit("kHarm", theme_scores["harm"])
    emit("kNegativity", theme_scores["negativity"])
    emit("kChildren", theme_scores["children"])
    emit("kEntTotal", ent_total)
    emit("kRec", rec)
    emit("kPop", pop)
    emit("kTox", tox["toxicity"])
    emit("kSev", tox["severe_toxicity"])
    emit("kIns", tox["insult"])
    emit("kPro", tox["profanity"])
    emit("kThr", tox["threat"])
    emit("kIde", tox["identity_attack"])
    emit("kVad", vad)
    for i, name in enumerate(["kNorTox", "kNorSev", "kNorIns", "kNorPro",
                              "kNorThr", "kIdeRaw", "kNorVad", "kNorEnt",
                              "kNorRec", "kNorPop"]):
        emit(name, cols[i])
    emit("kSentOnes", sent_ones)
    emit("kSentTuned", sent_tuned)
    emit("kPrioOnes", prio_ones)
    emit("kPrioTuned", prio_tuned)
    out.append("")
    emit("kSentenceTheme", [sent_theme[t] for t in THEMES])
    out.append("")
    emit("kHist8Phi", phi8)
    out.append("inline constexpr int kHist8Bin[] = {"
               + ", ".join(str(b) for b in idx8) + "};")
    emit("kHist8Entropy", ent8)
    out.append("")
    emit("kValenceChecks", [single, ng])
    out.append("")
    out.append("inline constexpr const char *kStratifiedSample[] = {"
               + ", ".join(f'"{i}"' for i in sample_ids) + "};")
    out.append(f"inline constexpr int kStratifiedSampleCount = {len(sample_ids)};")
    out.append("")
    out.append("} // namespace expected")
    out.append("")

    dest = os.path.join(FIXTURES, "equations_expected.hpp")
    with open(dest, "w") as f:
        f.write("\n".join(out))
    print(f"wrote {dest}")
    print("prio_ones:", [round(v, 4) for v in prio_ones])
    print("prio_tuned:", [round(v, 4) for v in prio_tuned])
    print("sample:", sample_ids)


if __name__ == "__main__":
    main()
