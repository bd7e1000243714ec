#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "loadguide/data/series_frame.hpp"

namespace loadguide::data {

/// Splits one CSV line on commas, trimming surrounding whitespace and a trailing CR.
std::vector<std::string> split_csv_line(const std::string& line);

/// Parses "timestamp,<name1>,...,<nameD>" followed by one numeric row per step.
/// Rows are sorted by timestamp; duplicates, empty cells and non-numeric cells are errors.
SeriesFrame parse_csv(std::istream& in, const std::string& source = "<stream>");
SeriesFrame load_csv(const std::filesystem::path& path);

/// Values are written with 17 significant digits so a reload is bit-exact.
void write_csv(const std::filesystem::path& path, const SeriesFrame& frame);
std::string format_double(double v);

}  // namespace loadguide::data
