#include "feedmine/text.hpp"

#include "feedmine/errors.hpp"

#include <algorithm>

namespace feedmine::text {

namespace {

// Returns the scalar value starting at s[i] and advances i, or throws.
char32_t next_codepoint(std::string_view s, std::size_t &i) {
    const auto byte = [&](std::size_t k) { return static_cast<std::uint8_t>(s[k]); };
    std::uint8_t b0 = byte(i);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        throw ParseError("invalid UTF-8 lead byte at offset " + std::to_string(i));
    }
    if (i + len > s.size())
        throw ParseError("truncated UTF-8 sequence at offset " + std::to_string(i));
    for (int k = 1; k < len; ++k) {
        std::uint8_t b = byte(i + k);
        if ((b & 0xC0) != 0x80)
            throw ParseError("invalid UTF-8 continuation at offset " + std::to_string(i + k));
        cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))
        throw ParseError("invalid UTF-8 scalar value at offset " + std::to_string(i));
    i += len;
    return cp;
}

void append_utf8(std::string &out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

} // namespace

std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size())
        out.push_back(next_codepoint(s, i));
    return out;
}

std::string encode_utf8(const std::vector<char32_t> &cps, std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end && i < cps.size(); ++i)
        append_utf8(out, cps[i]);
    return out;
}

bool is_valid_utf8(std::string_view s) {
    try {
        std::size_t i = 0;
        while (i < s.size())
            next_codepoint(s, i);
        return true;
    } catch (const ParseError &) {
        return false;
    }
}

char32_t to_lower(char32_t c) {
    if (c >= U'A' && c <= U'Z')
        return c + (U'a' - U'A');
    return c;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    for (char &c : out)
        if (c >= 'A' && c <= 'Z')
            c += 'a' - 'A';
    return out;
}

bool is_word_char(char32_t c) {
    return (c >= U'0' && c <= U'9') || (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') ||
           c > 0x7F; // non-ASCII letters count as word characters
}

std::vector<std::string> tokenize(std::string_view s) {
    std::vector<std::string> tokens;
    std::string cur;
    std::size_t i = 0;
    while (i < s.size()) {
        char32_t cp = next_codepoint(s, i);
        if (is_word_char(cp)) {
            append_utf8(cur, to_lower(cp));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty())
        tokens.push_back(std::move(cur));
    return tokens;
}

std::optional<WordMatch> find_word(const std::vector<char32_t> &haystack, std::string_view needle) {
    const std::vector<char32_t> pat = decode_utf8(std::string(needle));
    if (pat.empty() || haystack.size() < pat.size())
        return std::nullopt;
    const std::size_t n = haystack.size(), m = pat.size();
    for (std::size_t i = 0; i + m <= n; ++i) {
        bool hit = true;
        for (std::size_t j = 0; j < m; ++j) {
            if (to_lower(haystack[i + j]) != to_lower(pat[j])) {
                hit = false;
                break;
            }
        }
        if (!hit)
            continue;
        // Word boundaries only matter when the pattern edge is itself a word
        // character ("app!" should still match inside "app!!").
        bool left_ok = i == 0 || !is_word_char(haystack[i - 1]) || !is_word_char(pat.front());
        bool right_ok = i + m == n || !is_word_char(haystack[i + m]) || !is_word_char(pat.back());
        if (left_ok && right_ok)
            return WordMatch{i, i + m};
    }
    return std::nullopt;
}

TermMatcher::TermMatcher(const std::vector<std::pair<std::string, double>> &weighted_terms) {
    for (const auto &[term, weight] : weighted_terms) {
        Term t;
        t.words = tokenize(term);
        t.weight = weight;
        if (t.words.empty())
            continue;
        max_len_ = std::max(max_len_, t.words.size());
        terms_.push_back(std::move(t));
    }
    std::sort(terms_.begin(), terms_.end(),
              [](const Term &a, const Term &b) { return a.words.size() > b.words.size(); });
}

double TermMatcher::walk(const std::vector<std::string> &tokens, bool weighted) const {
    double total = 0.0;
    for (std::size_t i = 0; i < tokens.size();) {
        bool matched = false;
        for (const Term &t : terms_) {
            const std::size_t len = t.words.size();
            if (i + len > tokens.size())
                continue;
            bool hit = true;
            for (std::size_t j = 0; j < len; ++j) {
                if (tokens[i + j] != t.words[j]) {
                    hit = false;
                    break;
                }
            }
            if (hit) {
                total += weighted ? t.weight : 1.0;
                i += len;
                matched = true;
                break;
            }
        }
        if (!matched)
            ++i;
    }
    return total;
}

double TermMatcher::match_weight(const std::vector<std::string> &tokens) const {
    return walk(tokens, true);
}

std::size_t TermMatcher::match_count(const std::vector<std::string> &tokens) const {
    return static_cast<std::size_t>(walk(tokens, false));
}

std::string join(const std::vector<std::string> &parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += sep;
        out += parts[i];
    }
    return out;
}

} // namespace feedmine::text
