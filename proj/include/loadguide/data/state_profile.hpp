#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace loadguide::data {

/// Per-step, per-variable integer state labels S (l x D, row-major) and the
/// number of states N[i] of each variable.
struct StateProfile {
  std::vector<std::int64_t> timestamps;
  std::vector<std::string> variable_names;
  std::vector<int> labels;
  std::vector<int> counts;

  std::size_t length() const { return timestamps.size(); }
  std::size_t variables() const { return variable_names.size(); }
  int label(std::size_t t, std::size_t variable) const { return labels[t * variables() + variable]; }
  int& label(std::size_t t, std::size_t variable) { return labels[t * variables() + variable]; }

  StateProfile slice(std::size_t begin, std::size_t end) const;
  /// Labels in [0, counts[i]) and consistent sizes; throws DataError otherwise.
  void validate() const;

  friend bool operator==(const StateProfile&, const StateProfile&) = default;
};

/// Sidecar metadata path for a state CSV: "<path>.meta".
std::filesystem::path state_meta_path(const std::filesystem::path& csv_path);

/// Writes "timestamp,<names...>" rows of integer labels plus the sidecar
/// "variable,states" listing N per variable.
void write_state_csv(const std::filesystem::path& path, const StateProfile& profile);
StateProfile read_state_csv(const std::filesystem::path& path);

}  // namespace loadguide::data
