#include "loadguide/ndkernel/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "loadguide/errors.hpp"

namespace loadguide::nd {

GradCheckReport grad_check(const ScalarFunction& f, std::span<const double> point,
                           std::span<const double> analytic, double tolerance, double h, double floor) {
  if (point.size() != analytic.size()) {
    throw DimensionError("grad_check: point has " + std::to_string(point.size()) + " coordinates, gradient " +
                         std::to_string(analytic.size()));
  }
  GradCheckReport report;
  std::vector<double> probe(point.begin(), point.end());
  for (std::size_t i = 0; i < probe.size(); ++i) {
    const double original = probe[i];
    probe[i] = original + h;
    const double up = f(probe);
    probe[i] = original - h;
    const double down = f(probe);
    probe[i] = original;
    const double numeric = (up - down) / (2.0 * h);
    const double scale = std::max({std::abs(analytic[i]), std::abs(numeric), floor});
    const double rel = std::abs(analytic[i] - numeric) / scale;
    if (rel > report.max_rel_error || report.checked == 0) {
      report.max_rel_error = rel;
      report.worst_index = i;
    }
    ++report.checked;
  }
  report.passed = report.max_rel_error < tolerance;
  return report;
}

std::vector<double> flatten_params(std::span<const LayerParams* const> layers) {
  std::vector<double> flat;
  for (const LayerParams* p : layers) {
    flat.insert(flat.end(), p->weights.data().begin(), p->weights.data().end());
    flat.insert(flat.end(), p->bias.begin(), p->bias.end());
  }
  return flat;
}

void assign_params(std::span<LayerParams* const> layers, std::span<const double> flat) {
  std::size_t offset = 0;
  for (LayerParams* p : layers) {
    const std::size_t need = p->parameter_count();
    if (offset + need > flat.size()) throw DimensionError("assign_params: flat vector too short");
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), p->weights.size(), p->weights.data().begin());
    offset += p->weights.size();
    std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(offset), p->bias.size(), p->bias.begin());
    offset += p->bias.size();
  }
  if (offset != flat.size()) throw DimensionError("assign_params: flat vector too long");
}

std::vector<double> flatten_grads(std::span<const LayerGrads> grads) {
  std::vector<double> flat;
  for (const LayerGrads& g : grads) {
    flat.insert(flat.end(), g.weights.data().begin(), g.weights.data().end());
    flat.insert(flat.end(), g.bias.begin(), g.bias.end());
  }
  return flat;
}

}  // namespace loadguide::nd

#include <cstring>

#include "loadguide/ndkernel/checksum.hpp"

namespace loadguide::nd {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_bytes(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

}  // namespace

std::uint64_t checksum(std::span<const LayerParams* const> layers) {
  std::uint64_t h = kFnvOffset;
  for (const LayerParams* p : layers) {
    fnv_bytes(h, p->name.data(), p->name.size());
    const std::uint64_t dims[3] = {p->weights.rows(), p->weights.cols(), p->bias.size()};
    fnv_bytes(h, dims, sizeof dims);
    fnv_bytes(h, p->weights.data().data(), p->weights.size() * sizeof(double));
    fnv_bytes(h, p->bias.data(), p->bias.size() * sizeof(double));
  }
  return h;
}

}  // namespace loadguide::nd
