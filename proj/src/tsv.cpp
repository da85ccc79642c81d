#include "nbs/tsv.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nbs/error.hpp"

namespace nbs {

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(text.substr(start));
            return out;
        }
        out.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

TsvTable TsvTable::read(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(path.string(), 0, "-", "cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

TsvTable TsvTable::parse(std::string_view text, std::string source_name) {
    TsvTable t;
    t.source_ = std::move(source_name);
    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool have_header = false;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') {
            if (end == text.size()) break;
            continue;
        }
        auto cells = split(line, '\t');
        if (!have_header) {
            t.header_ = std::move(cells);
            have_header = true;
        } else {
            if (cells.size() > t.header_.size()) {
                throw ParseError(t.source_, line_no, t.header_.back(),
                                 "row has " + std::to_string(cells.size()) + " fields, header has " +
                                     std::to_string(t.header_.size()));
            }
            // trailing empty fields may be omitted
            cells.resize(t.header_.size());
            t.rows_.push_back(Row{line_no, std::move(cells)});
        }
        if (end == text.size()) break;
    }
    if (!have_header) throw ParseError(t.source_, 1, "-", "missing header row");
    return t;
}

bool TsvTable::has_column(std::string_view name) const {
    for (const auto& h : header_)
        if (h == name) return true;
    return false;
}

std::size_t TsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == name) return i;
    throw ParseError(source_, 1, std::string(name), "required column missing from header");
}

const std::string& TsvTable::cell(const Row& row, std::size_t col) const { return row.cells.at(col); }

void TsvTable::fail(const Row& row, std::size_t col, const std::string& msg) const {
    throw ParseError(source_, row.line, header_.at(col), msg);
}

long long TsvTable::integer(const Row& row, std::size_t col) const {
    const auto& s = cell(row, col);
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        fail(row, col, "expected an integer, got '" + s + "'");
    return v;
}

double TsvTable::real(const Row& row, std::size_t col) const {
    const auto& s = cell(row, col);
    double v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        fail(row, col, "expected a number, got '" + s + "'");
    return v;
}

bool TsvTable::flag(const Row& row, std::size_t col) const {
    const auto& s = cell(row, col);
    if (s == "1" || s == "true") return true;
    if (s == "0" || s == "false" || s.empty()) return false;
    fail(row, col, "expected 0/1, got '" + s + "'");
}

std::string format_roundtrip(double value) {
    std::array<char, 32> buf{};
    auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    (void)ec;
    return std::string(buf.data(), p);
}

std::string format_sig(double value, int digits) {
    std::array<char, 48> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*g", digits, value);
    return buf.data();
}

}  // namespace nbs
