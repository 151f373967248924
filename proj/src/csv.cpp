#include "feedmine/csv.hpp"

#include "feedmine/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace feedmine::csv {

namespace {

std::vector<std::string> split_line(std::string_view content, std::size_t &pos) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    bool any = false;
    while (pos < content.size()) {
        char c = content[pos];
        if (quoted) {
            if (c == '"') {
                if (pos + 1 < content.size() && content[pos + 1] == '"') {
                    cur.push_back('"');
                    pos += 2;
                } else {
                    quoted = false;
                    ++pos;
                }
            } else {
                cur.push_back(c);
                ++pos;
            }
            any = true;
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
            ++pos;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
            any = true;
            ++pos;
        } else if (c == '\r') {
            ++pos;
        } else if (c == '\n') {
            ++pos;
            break;
        } else {
            cur.push_back(c);
            any = true;
            ++pos;
        }
    }
    if (any || !cur.empty())
        fields.push_back(std::move(cur));
    return fields;
}

} // namespace

int TableData::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name)
            return static_cast<int>(i);
    return -1;
}

int TableData::require_column(std::string_view name) const {
    int i = column(name);
    if (i < 0)
        throw ParseError("csv: missing column '" + std::string(name) + "'");
    return i;
}

TableData read(std::string_view content) {
    TableData t;
    std::size_t pos = 0;
    bool first = true;
    while (pos < content.size()) {
        auto fields = split_line(content, pos);
        if (fields.empty())
            continue;
        if (first) {
            t.header = std::move(fields);
            first = false;
        } else {
            t.rows.push_back(std::move(fields));
        }
    }
    return t;
}

TableData read_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open CSV file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return read(ss.str());
}

std::string escape(std::string_view field) {
    bool needs = field.find_first_of(",\"\n\r") != std::string_view::npos;
    if (!needs)
        return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"')
            out += "\"\"";
        else
            out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string fmt(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    // Avoid "-0.000"-style output flapping with the sign of tiny values.
    std::string s = buf;
    if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-')
        s.erase(0, 1);
    return s;
}

std::string fmt_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    for (int prec = 15; prec <= 16; ++prec) {
        char shorter[64];
        std::snprintf(shorter, sizeof shorter, "%.*g", prec, v);
        double r = 0.0;
        std::sscanf(shorter, "%lf", &r);
        if (r == v)
            return shorter;
    }
    return buf;
}

void Writer::row(const std::vector<std::string> &fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out_.push_back(',');
        out_ += escape(fields[i]);
    }
    out_.push_back('\n');
}

void Writer::write_file(const std::string &path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParseError("cannot write CSV file: " + path);
    out << out_;
}

} // namespace feedmine::csv
