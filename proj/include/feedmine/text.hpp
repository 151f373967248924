#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace feedmine::text {

/// Decodes UTF-8 into Unicode scalar values. Throws ParseError on malformed
/// input. Offsets elsewhere in this project count scalar values, not bytes.
std::vector<char32_t> decode_utf8(std::string_view s);

std::string encode_utf8(const std::vector<char32_t> &cps, std::size_t begin, std::size_t end);

bool is_valid_utf8(std::string_view s);

/// ASCII-only lowercase; non-ASCII scalar values pass through unchanged.
std::string to_lower(std::string_view s);
char32_t to_lower(char32_t c);

bool is_word_char(char32_t c);

/// Lowercased tokens split on non-alphanumeric scalar values.
std::vector<std::string> tokenize(std::string_view s);

struct WordMatch {
    std::size_t begin = 0; // scalar-value offset of first matched character
    std::size_t end = 0;   // one past the last matched character
};

/// First case-insensitive occurrence of `needle` in `haystack` whose ends lie
/// on word boundaries (neighbouring characters are non-word or text edges).
/// Offsets are in scalar values.
std::optional<WordMatch> find_word(const std::vector<char32_t> &haystack, std::string_view needle);

/// Multi-word lexicon terms are matched as contiguous token runs.
struct TermMatcher {
    explicit TermMatcher(const std::vector<std::pair<std::string, double>> &weighted_terms);
    TermMatcher() = default;

    /// Sum of weights of matched occurrences in the token stream. Longer
    /// terms win at a given position; matches do not overlap.
    double match_weight(const std::vector<std::string> &tokens) const;
    /// Number of matched occurrences (weights ignored).
    std::size_t match_count(const std::vector<std::string> &tokens) const;

  private:
    struct Term {
        std::vector<std::string> words;
        double weight = 1.0;
    };
    std::vector<Term> terms_; // sorted by word count descending
    std::size_t max_len_ = 0;
    double walk(const std::vector<std::string> &tokens, bool weighted) const;
};

std::string join(const std::vector<std::string> &parts, std::string_view sep);

} // namespace feedmine::text
