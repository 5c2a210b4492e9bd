#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bfrb::csv {

/// A parsed CSV table: one header row plus data rows. `line` records the
/// 1-based source line of each row for error messages.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> line;

    /// Index of `name` in the header, or -1.
    int column(std::string_view name) const;
};

/// Reads a comma-separated file. Lines starting with '#' and blank lines are
/// skipped; double-quoted fields may contain commas. Throws FileNotFound.
Table read(const std::filesystem::path& path);
Table parse(std::string_view text);

std::string trim(std::string_view s);
std::string lower(std::string_view s);

/// Strict number parsing; throws ParseError mentioning `what`.
double to_double(std::string_view cell, const std::string& what);
long long to_int(std::string_view cell, const std::string& what);

/// Fixed 6-decimal formatting used by every CSV artifact.
std::string fixed6(double value);

} // namespace bfrb::csv
