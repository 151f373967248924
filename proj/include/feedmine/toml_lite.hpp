#pragma once

// Minimal TOML reader covering what this project's config files use:
// comments, [dotted.table] headers, bare or quoted keys, basic strings with
// escapes, integers, floats, booleans, and (possibly multiline) arrays of
// those. Array-of-tables, inline tables, datetimes and multiline strings are
// not part of the subset and raise ConfigError.

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace feedmine::toml {

class Value;
using Array = std::vector<Value>;

class Table {
  public:
    bool has(std::string_view dotted_path) const;
    const Value &at(std::string_view dotted_path) const;

    std::string get_string(std::string_view path) const;
    std::int64_t get_int(std::string_view path) const;
    double get_double(std::string_view path) const; // accepts ints too
    bool get_bool(std::string_view path) const;
    std::vector<std::string> get_string_array(std::string_view path) const;
    std::vector<double> get_double_array(std::string_view path) const;

    std::string get_string_or(std::string_view path, std::string fallback) const;
    std::int64_t get_int_or(std::string_view path, std::int64_t fallback) const;
    double get_double_or(std::string_view path, double fallback) const;
    bool get_bool_or(std::string_view path, bool fallback) const;

    const Table &table(std::string_view path) const;
    /// Keys in file order.
    const std::vector<std::string> &keys() const { return order_; }

    void set(const std::string &key, Value v);
    Table &subtable(const std::string &key); // creates if absent

  private:
    const Value *find(std::string_view dotted_path) const;
    std::map<std::string, std::shared_ptr<Value>> entries_;
    std::vector<std::string> order_;
};

class Value {
  public:
    using Storage = std::variant<std::string, std::int64_t, double, bool, Array, Table>;
    Value() : v_(std::string{}) {}
    explicit Value(Storage s) : v_(std::move(s)) {}

    template <typename T> bool is() const { return std::holds_alternative<T>(v_); }
    template <typename T> const T &as() const { return std::get<T>(v_); }
    template <typename T> T &as() { return std::get<T>(v_); }

  private:
    Storage v_;
};

Table parse(std::string_view text);
Table parse_file(const std::string &path);

} // namespace feedmine::toml
