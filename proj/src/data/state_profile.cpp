#include "loadguide/data/state_profile.hpp"

#include <charconv>
#include <fstream>
#include <map>

#include "loadguide/data/csv.hpp"
#include "loadguide/errors.hpp"

namespace loadguide::data {

StateProfile StateProfile::slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > length()) throw DimensionError("state profile slice out of range");
  StateProfile out;
  out.variable_names = variable_names;
  out.counts = counts;
  out.timestamps.assign(timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
                        timestamps.begin() + static_cast<std::ptrdiff_t>(end));
  const std::size_t d = variables();
  out.labels.assign(labels.begin() + static_cast<std::ptrdiff_t>(begin * d),
                    labels.begin() + static_cast<std::ptrdiff_t>(end * d));
  return out;
}

void StateProfile::validate() const {
  const std::size_t d = variables();
  if (counts.size() != d) throw DataError("state profile has " + std::to_string(counts.size()) + " counts for " +
                                          std::to_string(d) + " variables");
  if (labels.size() != length() * d) throw DataError("state profile label matrix has wrong size");
  for (std::size_t i = 0; i < d; ++i)
    if (counts[i] < 1) throw DataError("state count for '" + variable_names[i] + "' must be >= 1");
  for (std::size_t t = 0; t < length(); ++t)
    for (std::size_t i = 0; i < d; ++i) {
      const int s = label(t, i);
      if (s < 0 || s >= counts[i]) {
        throw DataError("state label " + std::to_string(s) + " at row " + std::to_string(t) + " of '" +
                        variable_names[i] + "' outside [0, " + std::to_string(counts[i]) + ")");
      }
    }
}

std::filesystem::path state_meta_path(const std::filesystem::path& csv_path) {
  return std::filesystem::path(csv_path.string() + ".meta");
}

void write_state_csv(const std::filesystem::path& path, const StateProfile& profile) {
  profile.validate();
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << "timestamp";
    for (const auto& name : profile.variable_names) out << ',' << name;
    out << '\n';
    for (std::size_t t = 0; t < profile.length(); ++t) {
      out << profile.timestamps[t];
      for (std::size_t i = 0; i < profile.variables(); ++i) out << ',' << profile.label(t, i);
      out << '\n';
    }
  }
  std::ofstream meta(state_meta_path(path), std::ios::binary);
  if (!meta) throw DataError("cannot write '" + state_meta_path(path).string() + "'");
  meta << "variable,states\n";
  for (std::size_t i = 0; i < profile.variables(); ++i)
    meta << profile.variable_names[i] << ',' << profile.counts[i] << '\n';
}

StateProfile read_state_csv(const std::filesystem::path& path) {
  // The label grid shares the series CSV grammar; labels must be integers.
  SeriesFrame grid = load_csv(path);
  StateProfile profile;
  profile.timestamps = grid.timestamps;
  profile.variable_names = grid.variable_names;
  profile.labels.reserve(grid.values.size());
  for (double v : grid.values.data()) {
    const int label = static_cast<int>(v);
    if (static_cast<double>(label) != v) throw DataError(path.string() + ": non-integer state label");
    profile.labels.push_back(label);
  }

  const auto meta_path = state_meta_path(path);
  std::ifstream meta(meta_path);
  if (!meta) throw DataError("missing state metadata '" + meta_path.string() + "'");
  std::string line;
  std::getline(meta, line);
  if (split_csv_line(line) != std::vector<std::string>{"variable", "states"}) {
    throw DataError(meta_path.string() + ": header must be 'variable,states'");
  }
  std::map<std::string, int> counts;
  while (std::getline(meta, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    int n = 0;
    if (cells.size() != 2 || std::from_chars(cells[1].data(), cells[1].data() + cells[1].size(), n).ec != std::errc()) {
      throw DataError(meta_path.string() + ": malformed line '" + line + "'");
    }
    counts[cells[0]] = n;
  }
  for (const auto& name : profile.variable_names) {
    auto it = counts.find(name);
    if (it == counts.end()) throw DataError(meta_path.string() + ": no state count for '" + name + "'");
    profile.counts.push_back(it->second);
  }
  profile.validate();
  return profile;
}

}  // namespace loadguide::data
