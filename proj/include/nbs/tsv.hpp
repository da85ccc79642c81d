#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nbs {

// Tab-separated table with a mandatory header row. Blank lines and lines
// starting with '#' are skipped; line numbers refer to the source file.
class TsvTable {
public:
    struct Row {
        std::size_t line = 0;
        std::vector<std::string> cells;
    };

    static TsvTable read(const std::filesystem::path& path);
    static TsvTable parse(std::string_view text, std::string source_name);

    const std::string& source() const { return source_; }
    const std::vector<std::string>& header() const { return header_; }
    const std::vector<Row>& rows() const { return rows_; }

    // Index of a required column; throws ParseError naming the column.
    std::size_t column(std::string_view name) const;
    bool has_column(std::string_view name) const;

    const std::string& cell(const Row& row, std::size_t col) const;
    long long integer(const Row& row, std::size_t col) const;
    double real(const Row& row, std::size_t col) const;
    bool flag(const Row& row, std::size_t col) const;

    [[noreturn]] void fail(const Row& row, std::size_t col, const std::string& msg) const;

private:
    std::string source_;
    std::vector<std::string> header_;
    std::vector<Row> rows_;
};

std::vector<std::string> split(std::string_view text, char sep);

// Shortest decimal form that parses back to the identical double.
std::string format_roundtrip(double value);
// Fixed significant-digit form used by plot-data exports.
std::string format_sig(double value, int digits = 9);

}  // namespace nbs
