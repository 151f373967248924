#include "feedmine/toml_lite.hpp"

#include "feedmine/errors.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace feedmine::toml {

namespace {

struct Cursor {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t line = 1;

    bool done() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char take() {
        char c = text[pos++];
        if (c == '\n')
            ++line;
        return c;
    }
    [[noreturn]] void fail(const std::string &msg) const {
        throw ConfigError("toml line " + std::to_string(line) + ": " + msg);
    }
    void skip_ws() {
        while (!done() && (peek() == ' ' || peek() == '\t'))
            take();
    }
    // Whitespace, comments and newlines; used inside arrays.
    void skip_filler() {
        while (!done()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
                take();
            } else if (c == '#') {
                while (!done() && peek() != '\n')
                    take();
            } else {
                break;
            }
        }
    }
    void expect_line_end() {
        skip_ws();
        if (!done() && peek() == '#')
            while (!done() && peek() != '\n')
                take();
        if (!done()) {
            if (peek() == '\r')
                take();
            if (done() || peek() != '\n')
                fail("trailing characters");
            take();
        }
    }
};

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_basic_string(Cursor &cur) {
    if (cur.take() != '"')
        cur.fail("expected '\"'");
    std::string out;
    for (;;) {
        if (cur.done())
            cur.fail("unterminated string");
        char c = cur.take();
        if (c == '"')
            return out;
        if (c == '\n')
            cur.fail("newline in string");
        if (c != '\\') {
            out.push_back(c);
            continue;
        }
        if (cur.done())
            cur.fail("unterminated escape");
        char e = cur.take();
        switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        default: cur.fail(std::string("unsupported escape '\\") + e + "'");
        }
    }
}

std::string parse_key(Cursor &cur) {
    cur.skip_ws();
    if (cur.done())
        cur.fail("expected key");
    if (cur.peek() == '"')
        return parse_basic_string(cur);
    std::string key;
    while (!cur.done() && is_bare_key_char(cur.peek()))
        key.push_back(cur.take());
    if (key.empty())
        cur.fail("expected key");
    return key;
}

Value parse_value(Cursor &cur);

Value parse_array(Cursor &cur) {
    if (cur.take() != '[')
        cur.fail("expected '['");
    Array arr;
    cur.skip_filler();
    if (!cur.done() && cur.peek() == ']') {
        cur.take();
        return Value{Value::Storage{std::move(arr)}};
    }
    for (;;) {
        cur.skip_filler();
        arr.push_back(parse_value(cur));
        cur.skip_filler();
        if (cur.done())
            cur.fail("unterminated array");
        char c = cur.take();
        if (c == ']')
            break;
        if (c != ',')
            cur.fail("expected ',' or ']' in array");
        cur.skip_filler();
        if (!cur.done() && cur.peek() == ']') { // trailing comma
            cur.take();
            break;
        }
    }
    return Value{Value::Storage{std::move(arr)}};
}

Value parse_number(Cursor &cur) {
    std::string tok;
    while (!cur.done()) {
        char c = cur.peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' ||
            c == 'e' || c == 'E' || c == '_') {
            tok.push_back(cur.take());
        } else {
            break;
        }
    }
    std::string digits;
    for (char c : tok)
        if (c != '_')
            digits.push_back(c);
    if (digits.find('.') == std::string::npos && digits.find('e') == std::string::npos &&
        digits.find('E') == std::string::npos) {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec != std::errc{} || p != digits.data() + digits.size())
            cur.fail("bad integer '" + tok + "'");
        return Value{Value::Storage{v}};
    }
    try {
        std::size_t used = 0;
        double v = std::stod(digits, &used);
        if (used != digits.size())
            cur.fail("bad float '" + tok + "'");
        return Value{Value::Storage{v}};
    } catch (const std::exception &) {
        cur.fail("bad float '" + tok + "'");
    }
}

Value parse_value(Cursor &cur) {
    cur.skip_ws();
    if (cur.done())
        cur.fail("expected value");
    char c = cur.peek();
    if (c == '"')
        return Value{Value::Storage{parse_basic_string(cur)}};
    if (c == '[')
        return parse_array(cur);
    if (c == '{')
        cur.fail("inline tables are outside the supported TOML subset");
    if (std::isalpha(static_cast<unsigned char>(c))) {
        std::string word;
        while (!cur.done() && std::isalpha(static_cast<unsigned char>(cur.peek())))
            word.push_back(cur.take());
        if (word == "true")
            return Value{Value::Storage{true}};
        if (word == "false")
            return Value{Value::Storage{false}};
        cur.fail("unrecognized value '" + word + "' (unquoted strings are not TOML)");
    }
    return parse_number(cur);
}

std::vector<std::string> parse_header_path(Cursor &cur) {
    std::vector<std::string> path;
    for (;;) {
        path.push_back(parse_key(cur));
        cur.skip_ws();
        if (cur.done())
            cur.fail("unterminated table header");
        char c = cur.take();
        if (c == ']')
            break;
        if (c != '.')
            cur.fail("expected '.' or ']' in table header");
    }
    return path;
}

} // namespace

void Table::set(const std::string &key, Value v) {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        entries_.emplace(key, std::make_shared<Value>(std::move(v)));
        order_.push_back(key);
    } else {
        *it->second = std::move(v);
    }
}

Table &Table::subtable(const std::string &key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        set(key, Value{Value::Storage{Table{}}});
        it = entries_.find(key);
    }
    if (!it->second->is<Table>())
        throw ConfigError("toml: key '" + key + "' is not a table");
    return it->second->as<Table>();
}

const Value *Table::find(std::string_view dotted_path) const {
    const Table *tbl = this;
    std::string_view rest = dotted_path;
    for (;;) {
        auto dot = rest.find('.');
        std::string key(dot == std::string_view::npos ? rest : rest.substr(0, dot));
        auto it = tbl->entries_.find(key);
        if (it == tbl->entries_.end())
            return nullptr;
        if (dot == std::string_view::npos)
            return it->second.get();
        if (!it->second->is<Table>())
            return nullptr;
        tbl = &it->second->as<Table>();
        rest = rest.substr(dot + 1);
    }
}

bool Table::has(std::string_view path) const { return find(path) != nullptr; }

const Value &Table::at(std::string_view path) const {
    const Value *v = find(path);
    if (!v)
        throw ConfigError("toml: missing key '" + std::string(path) + "'");
    return *v;
}

std::string Table::get_string(std::string_view path) const {
    const Value &v = at(path);
    if (!v.is<std::string>())
        throw ConfigError("toml: key '" + std::string(path) + "' is not a string");
    return v.as<std::string>();
}

std::int64_t Table::get_int(std::string_view path) const {
    const Value &v = at(path);
    if (!v.is<std::int64_t>())
        throw ConfigError("toml: key '" + std::string(path) + "' is not an integer");
    return v.as<std::int64_t>();
}

double Table::get_double(std::string_view path) const {
    const Value &v = at(path);
    if (v.is<std::int64_t>())
        return static_cast<double>(v.as<std::int64_t>());
    if (!v.is<double>())
        throw ConfigError("toml: key '" + std::string(path) + "' is not a number");
    return v.as<double>();
}

bool Table::get_bool(std::string_view path) const {
    const Value &v = at(path);
    if (!v.is<bool>())
        throw ConfigError("toml: key '" + std::string(path) + "' is not a boolean");
    return v.as<bool>();
}

std::vector<std::string> Table::get_string_array(std::string_view path) const {
    const Value &v = at(path);
    if (!v.is<Array>())
        throw ConfigError("toml: key '" + std::string(path) + "' is not an array");
    std::vector<std::string> out;
    for (const Value &e : v.as<Array>()) {
        if (!e.is<std::string>())
            throw ConfigError("toml: array '" + std::string(path) + "' holds a non-string");
        out.push_back(e.as<std::string>());
    }
    return out;
}

std::vector<double> Table::get_double_array(std::string_view path) const {
    const Value &v = at(path);
    if (!v.is<Array>())
        throw ConfigError("toml: key '" + std::string(path) + "' is not an array");
    std::vector<double> out;
    for (const Value &e : v.as<Array>()) {
        if (e.is<std::int64_t>())
            out.push_back(static_cast<double>(e.as<std::int64_t>()));
        else if (e.is<double>())
            out.push_back(e.as<double>());
        else
            throw ConfigError("toml: array '" + std::string(path) + "' holds a non-number");
    }
    return out;
}

std::string Table::get_string_or(std::string_view path, std::string fallback) const {
    return has(path) ? get_string(path) : std::move(fallback);
}
std::int64_t Table::get_int_or(std::string_view path, std::int64_t fallback) const {
    return has(path) ? get_int(path) : fallback;
}
double Table::get_double_or(std::string_view path, double fallback) const {
    return has(path) ? get_double(path) : fallback;
}
bool Table::get_bool_or(std::string_view path, bool fallback) const {
    return has(path) ? get_bool(path) : fallback;
}

const Table &Table::table(std::string_view path) const {
    const Value &v = at(path);
    if (!v.is<Table>())
        throw ConfigError("toml: key '" + std::string(path) + "' is not a table");
    return v.as<Table>();
}

Table parse(std::string_view textsv) {
    Table root;
    Cursor cur{textsv};
    Table *active = &root;
    while (!cur.done()) {
        cur.skip_ws();
        if (cur.done())
            break;
        char c = cur.peek();
        if (c == '\n' || c == '\r' || c == '#') {
            cur.expect_line_end();
            continue;
        }
        if (c == '[') {
            cur.take();
            if (!cur.done() && cur.peek() == '[')
                cur.fail("array-of-tables is outside the supported TOML subset");
            auto path = parse_header_path(cur);
            cur.expect_line_end();
            active = &root;
            for (const auto &key : path)
                active = &active->subtable(key);
            continue;
        }
        std::string key = parse_key(cur);
        cur.skip_ws();
        if (cur.done() || cur.take() != '=')
            cur.fail("expected '=' after key '" + key + "'");
        Value v = parse_value(cur);
        cur.expect_line_end();
        if (active->has(key))
            cur.fail("duplicate key '" + key + "'");
        active->set(key, std::move(v));
    }
    return root;
}

Table parse_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open TOML file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse(ss.str());
    } catch (const ConfigError &e) {
        throw ConfigError(path + ": " + e.what());
    }
}

} // namespace feedmine::toml
