#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "loadguide/ndkernel/matrix.hpp"

namespace loadguide::metrics {

/// (1/H) sum_tau (1/D) sum_i |yhat - y|
double mae(const nd::Matrix& prediction, const nd::Matrix& target);

/// sum |yhat - y| / sum (|yhat| + |y|); elements with |yhat| + |y| = 0 add
/// nothing to either sum. Throws DataError when the whole denominator is 0.
double mape_sym(const nd::Matrix& prediction, const nd::Matrix& target);

/// Running sums behind mae / mape_sym, so a test set can be scored as one
/// global ratio without materializing every window.
struct ErrorSums {
  double abs_error = 0.0;
  double magnitude = 0.0;
  std::size_t count = 0;

  void add(const nd::Matrix& prediction, const nd::Matrix& target);
  double mae() const;
  double mape_sym() const;
};

struct HorizonMetrics {
  std::size_t horizon = 0;
  double mae = 0.0;
  double mape = 0.0;
  double mae_raw = 0.0;   // original units; 0 when not computed
  double mape_raw = 0.0;
};

struct EvalReport {
  std::vector<HorizonMetrics> rows;

  double average_mae() const;
  double average_mape() const;
};

struct Improvement {
  double mae_pct = 0.0;
  double mape_pct = 0.0;
};

/// 100 * (baseline - treated) / baseline, averaged over horizons.
Improvement percent_improvement(const EvalReport& baseline, const EvalReport& treated);

/// Columns: horizon,mae,mape,mae_raw,mape_raw; one row per horizon.
void write_report_csv(const std::filesystem::path& path, const EvalReport& report);
EvalReport read_report_csv(const std::filesystem::path& path);

/// Columns: horizon,plain_mae,erkg_mae,mae_improvement_pct,plain_mape,erkg_mape,mape_improvement_pct;
/// one row per horizon plus a final "avg" row holding the horizon-averaged values.
void write_comparison_csv(const std::filesystem::path& path, const EvalReport& baseline, const EvalReport& treated);

}  // namespace loadguide::metrics
