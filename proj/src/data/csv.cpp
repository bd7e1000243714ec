#include "loadguide/data/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "loadguide/errors.hpp"

namespace loadguide::data {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string where(const std::string& source, std::size_t line, std::size_t column) {
  return source + ":" + std::to_string(line) + " column " + std::to_string(column);
}

}  // namespace

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

SeriesFrame parse_csv(std::istream& in, const std::string& source) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(source + ": empty input (no header)");
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) line.erase(0, 3);  // UTF-8 BOM
  auto header = split_csv_line(line);
  if (header.empty() || header[0] != "timestamp") {
    throw DataError(source + ": header must start with 'timestamp'");
  }
  if (header.size() < 2) throw DataError(source + ": header names no variables");
  const std::size_t d = header.size() - 1;

  std::vector<std::int64_t> stamps;
  std::vector<double> vals;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError(source + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " cells, got " + std::to_string(cells.size()));
    }
    std::int64_t ts = 0;
    {
      const auto& c = cells[0];
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), ts);
      if (c.empty() || ec != std::errc() || ptr != c.data() + c.size()) {
        throw DataError(where(source, line_no, 1) + ": timestamp '" + c + "' is not an integer");
      }
    }
    stamps.push_back(ts);
    for (std::size_t j = 1; j < cells.size(); ++j) {
      const auto& c = cells[j];
      if (c.empty()) throw DataError(where(source, line_no, j + 1) + ": missing value");
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
      if (ec != std::errc() || ptr != c.data() + c.size() || !std::isfinite(v)) {
        throw DataError(where(source, line_no, j + 1) + ": '" + c + "' is not a finite number");
      }
      vals.push_back(v);
    }
  }
  if (stamps.empty()) throw DataError(source + ": empty input (no data rows)");

  std::vector<std::size_t> order(stamps.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return stamps[a] < stamps[b]; });

  SeriesFrame frame;
  frame.variable_names.assign(header.begin() + 1, header.end());
  frame.timestamps.reserve(stamps.size());
  std::vector<double> sorted(vals.size());
  for (std::size_t r = 0; r < order.size(); ++r) {
    const std::size_t src = order[r];
    if (r > 0 && stamps[src] == frame.timestamps.back()) {
      throw DataError(source + ": duplicate timestamp " + std::to_string(stamps[src]));
    }
    frame.timestamps.push_back(stamps[src]);
    std::copy_n(vals.begin() + static_cast<std::ptrdiff_t>(src * d), d,
                sorted.begin() + static_cast<std::ptrdiff_t>(r * d));
  }
  frame.values = nd::Matrix(stamps.size(), d, std::move(sorted));
  return frame;
}

SeriesFrame load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return parse_csv(in, path.string());
}

std::string format_double(double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(n));
}

void write_csv(const std::filesystem::path& path, const SeriesFrame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "timestamp";
  for (const auto& name : frame.variable_names) out << ',' << name;
  out << '\n';
  for (std::size_t t = 0; t < frame.length(); ++t) {
    out << frame.timestamps[t];
    for (std::size_t i = 0; i < frame.variables(); ++i) out << ',' << format_double(frame.values(t, i));
    out << '\n';
  }
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace loadguide::data
