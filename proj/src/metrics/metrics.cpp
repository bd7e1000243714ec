#include "loadguide/metrics/metrics.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "loadguide/data/csv.hpp"
#include "loadguide/errors.hpp"

namespace loadguide::metrics {

namespace {

void check_shapes(const nd::Matrix& a, const nd::Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("metric shape mismatch: prediction " + a.shape_string() + " vs target " + b.shape_string());
  }
}

double pct(double baseline, double treated, const char* what) {
  if (baseline == 0.0) throw DataError(std::string("percent improvement undefined: baseline ") + what + " is 0");
  return 100.0 * (baseline - treated) / baseline;
}

}  // namespace

void ErrorSums::add(const nd::Matrix& prediction, const nd::Matrix& target) {
  check_shapes(prediction, target);
  const auto& p = prediction.data();
  const auto& y = target.data();
  for (std::size_t j = 0; j < p.size(); ++j) {
    abs_error += std::abs(p[j] - y[j]);
    magnitude += std::abs(p[j]) + std::abs(y[j]);
  }
  count += p.size();
}

double ErrorSums::mae() const {
  if (count == 0) throw DataError("mae of an empty set");
  return abs_error / static_cast<double>(count);
}

double ErrorSums::mape_sym() const {
  if (magnitude == 0.0) throw DataError("mape_sym undefined: every |yhat| + |y| is 0");
  return abs_error / magnitude;
}

double mae(const nd::Matrix& prediction, const nd::Matrix& target) {
  check_shapes(prediction, target);
  const std::size_t h = target.rows(), d = target.cols();
  if (h == 0 || d == 0) throw DataError("mae of an empty matrix");
  double outer = 0.0;
  for (std::size_t tau = 0; tau < h; ++tau) {
    double inner = 0.0;
    for (std::size_t i = 0; i < d; ++i) inner += std::abs(prediction(tau, i) - target(tau, i));
    outer += inner / static_cast<double>(d);
  }
  return outer / static_cast<double>(h);
}

double mape_sym(const nd::Matrix& prediction, const nd::Matrix& target) {
  ErrorSums sums;
  sums.add(prediction, target);
  return sums.mape_sym();
}

double EvalReport::average_mae() const {
  double s = 0.0;
  for (const auto& r : rows) s += r.mae;
  return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}

double EvalReport::average_mape() const {
  double s = 0.0;
  for (const auto& r : rows) s += r.mape;
  return rows.empty() ? 0.0 : s / static_cast<double>(rows.size());
}

Improvement percent_improvement(const EvalReport& baseline, const EvalReport& treated) {
  if (baseline.rows.size() != treated.rows.size() || baseline.rows.empty()) {
    throw DimensionError("percent improvement needs reports over the same, non-empty horizon list");
  }
  Improvement imp;
  for (std::size_t r = 0; r < baseline.rows.size(); ++r) {
    if (baseline.rows[r].horizon != treated.rows[r].horizon) {
      throw DimensionError("report horizons differ at row " + std::to_string(r));
    }
    imp.mae_pct += pct(baseline.rows[r].mae, treated.rows[r].mae, "MAE");
    imp.mape_pct += pct(baseline.rows[r].mape, treated.rows[r].mape, "MAPE'");
  }
  const auto n = static_cast<double>(baseline.rows.size());
  imp.mae_pct /= n;
  imp.mape_pct /= n;
  return imp;
}

void write_report_csv(const std::filesystem::path& path, const EvalReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "horizon,mae,mape,mae_raw,mape_raw\n";
  for (const auto& r : report.rows) {
    out << r.horizon << ',' << data::format_double(r.mae) << ',' << data::format_double(r.mape) << ','
        << data::format_double(r.mae_raw) << ',' << data::format_double(r.mape_raw) << '\n';
  }
}

EvalReport read_report_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  if (data::split_csv_line(line) != std::vector<std::string>{"horizon", "mae", "mape", "mae_raw", "mape_raw"}) {
    throw DataError(path.string() + ": unexpected report header");
  }
  EvalReport report;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = data::split_csv_line(line);
    if (cells.size() != 5) throw DataError(path.string() + ": malformed report row '" + line + "'");
    HorizonMetrics m;
    double* fields[4] = {&m.mae, &m.mape, &m.mae_raw, &m.mape_raw};
    if (std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), m.horizon).ec != std::errc()) {
      throw DataError(path.string() + ": bad horizon '" + cells[0] + "'");
    }
    for (int f = 0; f < 4; ++f) {
      const auto& c = cells[static_cast<std::size_t>(f + 1)];
      if (std::from_chars(c.data(), c.data() + c.size(), *fields[f]).ec != std::errc()) {
        throw DataError(path.string() + ": bad metric '" + c + "'");
      }
    }
    report.rows.push_back(m);
  }
  return report;
}

void write_comparison_csv(const std::filesystem::path& path, const EvalReport& baseline, const EvalReport& treated) {
  const Improvement avg = percent_improvement(baseline, treated);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "horizon,plain_mae,erkg_mae,mae_improvement_pct,plain_mape,erkg_mape,mape_improvement_pct\n";
  for (std::size_t r = 0; r < baseline.rows.size(); ++r) {
    const auto& b = baseline.rows[r];
    const auto& t = treated.rows[r];
    out << b.horizon << ',' << data::format_double(b.mae) << ',' << data::format_double(t.mae) << ','
        << data::format_double(pct(b.mae, t.mae, "MAE")) << ',' << data::format_double(b.mape) << ','
        << data::format_double(t.mape) << ',' << data::format_double(pct(b.mape, t.mape, "MAPE'")) << '\n';
  }
  out << "avg," << data::format_double(baseline.average_mae()) << ',' << data::format_double(treated.average_mae()) << ','
      << data::format_double(avg.mae_pct) << ',' << data::format_double(baseline.average_mape()) << ','
      << data::format_double(treated.average_mape()) << ',' << data::format_double(avg.mape_pct) << '\n';
}

}  // namespace loadguide::metrics
