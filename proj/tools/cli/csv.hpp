#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "stefan/error.hpp"
#include "stefan/problem.hpp"
#include "stefan/signal.hpp"

namespace stefan::cli {

/// Shortest decimal string that parses back to the same binary64.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// Row-oriented CSV builder with a mandatory header.
class CsvWriter {
public:
    explicit CsvWriter(std::initializer_list<std::string_view> header) {
        bool first = true;
        for (auto h : header) {
            if (!first) out_ << ',';
            out_ << h;
            first = false;
        }
        out_ << '\n';
        columns_ = header.size();
    }

    CsvWriter& cell(double v) { return raw(format_double(v)); }
    CsvWriter& cell(std::size_t v) { return raw(std::to_string(v)); }
    CsvWriter& cell(std::string_view v) { return raw(v); }
    CsvWriter& cell(const char* v) { return raw(v); }
    CsvWriter& cell(bool v) { return raw(v ? "1" : "0"); }

    void end_row() {
        out_ << '\n';
        in_row_ = 0;
    }

    [[nodiscard]] std::string str() const { return out_.str(); }
    [[nodiscard]] std::size_t columns() const noexcept { return columns_; }

private:
    CsvWriter& raw(std::string_view v) {
        if (in_row_++ > 0) out_ << ',';
        out_ << v;
        return *this;
    }

    std::ostringstream out_;
    std::size_t columns_ = 0;
    std::size_t in_row_ = 0;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

inline double parse_double(std::string_view text, std::size_t line_no) {
    double v = 0.0;
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    if (!text.empty() && text.front() == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last) {
        fail(ErrorKind::input, "input.value.malformed",
             "line " + std::to_string(line_no) + ": cannot parse '" + std::string(text) + "' as a number");
    }
    if (!std::isfinite(v)) {
        fail(ErrorKind::input, "input.value.nonfinite", "line " + std::to_string(line_no) + ": value is not finite");
    }
    return v;
}

}  // namespace detail

struct IngestResult {
    FreeBoundaryPath path;
    bool derived_sdot = false;
    std::vector<std::string> warnings;
};

/// Parses a measured front from CSV text with header `t,s` or `t,s,sdot`.
/// Without an sdot column the velocity is derived by centered differences.
/// The time column must be uniform and ascending; a front that moves
/// backwards only produces warnings.
inline IngestResult parse_path_csv(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = detail::trim(text.substr(start, nl - start));
        if (!line.empty()) lines.push_back(line);
        start = nl + 1;
    }
    if (lines.empty()) fail(ErrorKind::input, "input.columns.missing", "front file is empty");

    const auto header = detail::split(lines.front());
    const bool two = header.size() == 2 && header[0] == "t" && header[1] == "s";
    const bool three = header.size() == 3 && header[0] == "t" && header[1] == "s" && header[2] == "sdot";
    if (!two && !three) {
        fail(ErrorKind::input, "input.columns.missing", "front file header must be 't,s' or 't,s,sdot'");
    }

    IngestResult out;
    auto& p = out.path;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        const auto cells = detail::split(lines[k]);
        if (cells.size() != header.size()) {
            fail(ErrorKind::input, "input.columns.missing",
                 "line " + std::to_string(k + 1) + ": expected " + std::to_string(header.size()) + " columns");
        }
        p.t.push_back(detail::parse_double(cells[0], k + 1));
        p.s.push_back(detail::parse_double(cells[1], k + 1));
        if (three) p.sdot.push_back(detail::parse_double(cells[2], k + 1));
    }
    if (p.t.size() < 3) fail(ErrorKind::input, "input.rows.too_few", "front file needs at least three rows");
    if (!p.is_uniform()) fail(ErrorKind::input, "input.grid.nonuniform", "time column must be uniform and ascending");
    if (!three) {
        p.sdot = centered_differences(p.t, p.s);
        out.derived_sdot = true;
    }
    std::size_t backwards = 0;
    for (std::size_t j = 1; j < p.s.size(); ++j) {
        if (p.s[j] < p.s[j - 1]) ++backwards;
    }
    if (backwards > 0) {
        out.warnings.push_back("front decreases on " + std::to_string(backwards) + " intervals");
    }
    return out;
}

inline IngestResult ingest_path(const std::string& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) fail(ErrorKind::input, "input.file.unreadable", "cannot open front file '" + file + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_path_csv(buf.str());
}

/// front.csv body (t,s,sdot): every `stride`-th sample from 0, plus the last.
inline std::string front_csv(const FreeBoundaryPath& p, std::size_t stride = 1) {
    CsvWriter w({"t", "s", "sdot"});
    const std::size_t last = p.size() - 1;
    for (std::size_t j = 0; j <= last; j = (j == last) ? last + 1 : std::min(j + stride, last)) {
        w.cell(p.t[j]).cell(p.s[j]).cell(p.sdot[j]);
        w.end_row();
    }
    return w.str();
}

}  // namespace stefan::cli
