#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace feedmine::csv {

struct TableData {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(std::string_view name) const; // -1 when absent
    int require_column(std::string_view name) const;
};

TableData read(std::string_view content);
TableData read_file(const std::string &path);

std::string escape(std::string_view field);

/// Fixed-format number rendering keeps golden CSV/SVG files byte-stable.
std::string fmt(double v, int decimals);
/// Shortest representation that round-trips the double exactly.
std::string fmt_exact(double v);

class Writer {
  public:
    void row(const std::vector<std::string> &fields);
    const std::string &str() const { return out_; }
    void write_file(const std::string &path) const;

  private:
    std::string out_;
};

} // namespace feedmine::csv
