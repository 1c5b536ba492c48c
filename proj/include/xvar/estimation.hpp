#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <xvar/errors.hpp>
#include <xvar/subsets.hpp>

namespace xvar {

// Losses are negative returns in percent, one row per period.
struct LossPanel {
  std::vector<std::string> names;
  std::vector<std::string> dates;  // empty when the file has no date column
  Eigen::MatrixXd X;               // n x d
  std::size_t dropped_rows = 0;    // rows removed for missing values

  int d() const { return static_cast<int>(X.cols()); }
  std::int64_t n() const { return X.rows(); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

inline bool parse_number(const std::string& s, double& out) {
  if (s.empty() || s == "NA" || s == "NaN" || s == "nan") return false;
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(out);
  } catch (...) {
    return false;
  }
}

}  // namespace detail

// Header row carries asset names; a leading `date` column is optional.
// Rows with any missing or unparseable value are dropped and counted.
inline LossPanel read_loss_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  auto header = detail::split_csv_line(line);
  bool has_date = false;
  if (!header.empty()) {
    std::string h0 = header[0];
    std::transform(h0.begin(), h0.end(), h0.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    has_date = h0 == "date";
  }

  LossPanel panel;
  panel.names.assign(header.begin() + (has_date ? 1 : 0), header.end());
  const std::size_t d = panel.names.size();
  if (d == 0) throw DataError(path + ": no asset columns");

  std::vector<double> values;
  std::vector<std::string> dates;
  std::vector<double> row(d);
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv_line(line);
    bool ok = fields.size() == d + (has_date ? 1 : 0);
    for (std::size_t j = 0; ok && j < d; ++j)
      ok = detail::parse_number(fields[j + (has_date ? 1 : 0)], row[j]);
    if (!ok) {
      ++panel.dropped_rows;
      continue;
    }
    if (has_date) dates.push_back(fields[0]);
    values.insert(values.end(), row.begin(), row.end());
  }
  const std::size_t n = values.size() / d;
  if (n == 0) throw DataError(path + ": no usable rows");
  panel.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d; ++j)
      panel.X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          values[i * d + j];
  panel.dates = std::move(dates);
  return panel;
}

// Smallest order statistic whose empirical CDF reaches q.
inline double empirical_var(std::vector<double> series, double q) {
  if (series.empty()) throw InvalidInput("empirical_var of empty series");
  if (!(q >= 0) || q > 1) throw InvalidInput("quantile must lie in [0, 1]");
  const auto n = series.size();
  std::size_t rank = q <= 0 ? 1 : static_cast<std::size_t>(std::ceil(q * n));
  rank = std::min(std::max<std::size_t>(rank, 1), n);
  std::nth_element(series.begin(), series.begin() + (rank - 1), series.end());
  return series[rank - 1];
}

inline double empirical_var(const Eigen::VectorXd& series, double q) {
  return empirical_var(
      std::vector<double>(series.data(), series.data() + series.size()), q);
}

// ---------------------------------------------------------------------------
// Generalized Pareto tail fitting.

struct GpdFit {
  double xi = 0;
  double sigma = 0;
  double xi_se = std::numeric_limits<double>::quiet_NaN();
  double sigma_se = std::numeric_limits<double>::quiet_NaN();
  double loglik = 0;
  std::size_t n = 0;
};

struct TailModel {
  double xi = 0;
  std::vector<double> sigma;
  std::vector<double> threshold;
  double p0 = 0.02;  // exceedance probability of the threshold
};

namespace detail {

constexpr double kXiLo = -0.499;
constexpr double kXiHi = 0.999;

inline double gpd_loglik(const std::vector<double>& y, double xi,
                         double sigma) {
  if (!(sigma > 0)) return -std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(y.size());
  if (std::abs(xi) < 1e-10) {
    double s = 0;
    for (double v : y) s += v;
    return -n * std::log(sigma) - s / sigma;
  }
  double acc = 0;
  for (double v : y) {
    const double t = 1.0 + xi * v / sigma;
    if (!(t > 0)) return -std::numeric_limits<double>::infinity();
    acc += std::log(t);
  }
  return -n * std::log(sigma) - (1.0 + 1.0 / xi) * acc;
}

// For fixed xi the stationarity condition in sigma,
//   (1+xi) sum_i y_i/(sigma + xi y_i) = n,
// has a unique root on (max(0, -xi*ymax), inf): the left side decreases
// strictly from +inf to 0.
inline double gpd_profile_sigma(const std::vector<double>& y, double xi) {
  const double n = static_cast<double>(y.size());
  double mean = 0, ymax = 0;
  for (double v : y) {
    mean += v;
    ymax = std::max(ymax, v);
  }
  mean /= n;
  if (std::abs(xi) < 1e-10) return mean;

  const double floor_sigma = xi < 0 ? -xi * ymax : 0.0;
  auto g = [&](double sigma) {
    double s = 0;
    for (double v : y) s += v / (sigma + xi * v);
    return (1.0 + xi) * s - n;
  };
  double lo = floor_sigma + 1e-12 * (1.0 + floor_sigma);
  double hi = std::max(mean * (1.0 + std::abs(xi)), floor_sigma + mean) + 1e-12;
  for (int it = 0; it < 200 && g(hi) > 0; ++it) hi *= 2;
  if (g(hi) > 0) throw NumericalError("tail scale profile failed to bracket");
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Maximize a unimodal-ish profile by coarse scan + golden section, then a
// few safeguarded Newton steps on numeric derivatives.
template <class F>
inline double maximize_profile(F&& f, double lo, double hi) {
  const int grid = 41;
  double best_x = lo, best_v = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid; ++i) {
    const double x = lo + (hi - lo) * i / (grid - 1);
    const double v = f(x);
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  }
  const double step = (hi - lo) / (grid - 1);
  double a = std::max(lo, best_x - step), b = std::min(hi, best_x + step);
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && b - a > 1e-11; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    }
  }
  double x = 0.5 * (a + b), fx = f(x);
  for (int it = 0; it < 12; ++it) {
    const double h = 1e-6 * (1.0 + std::abs(x));
    const double fp = f(x + h), fm = f(x - h);
    const double d1 = (fp - fm) / (2 * h);
    const double d2 = (fp - 2 * fx + fm) / (h * h);
    if (!(d2 < 0)) break;
    double xn = std::clamp(x - d1 / d2, lo, hi);
    const double fn = f(xn);
    if (fn <= fx || std::abs(xn - x) < 1e-13) break;
    x = xn;
    fx = fn;
  }
  return x;
}

}  // namespace detail

// Maximum likelihood GPD fit to threshold exceedances, xi restricted to
// (-0.5, 1). Standard errors come from the observed information.
inline GpdFit fit_gpd(const std::vector<double>& exceedances) {
  if (exceedances.size() < 30)
    throw DataError("need at least 30 exceedances for a tail fit");
  for (double v : exceedances)
    if (!(v > 0) || !std::isfinite(v))
      throw InvalidInput("exceedances must be positive and finite");
  const auto [mn, mx] =
      std::minmax_element(exceedances.begin(), exceedances.end());
  if (*mx - *mn < 1e-12 * (*mx))
    throw DataError("degenerate sample: all exceedances equal");

  auto profile = [&](double xi) {
    return detail::gpd_loglik(exceedances, xi,
                              detail::gpd_profile_sigma(exceedances, xi));
  };
  GpdFit fit;
  fit.n = exceedances.size();
  fit.xi = detail::maximize_profile(profile, detail::kXiLo, detail::kXiHi);
  fit.sigma = detail::gpd_profile_sigma(exceedances, fit.xi);
  fit.loglik = detail::gpd_loglik(exceedances, fit.xi, fit.sigma);
  if (!std::isfinite(fit.loglik))
    throw NumericalError("tail fit did not converge");

  // Observed information by central differences.
  const double hx = 1e-5 * (1.0 + std::abs(fit.xi));
  const double hs = 1e-5 * fit.sigma;
  auto ll = [&](double xi, double sigma) {
    return detail::gpd_loglik(exceedances, xi, sigma);
  };
  const double dxx =
      (ll(fit.xi + hx, fit.sigma) - 2 * fit.loglik + ll(fit.xi - hx, fit.sigma)) /
      (hx * hx);
  const double dss =
      (ll(fit.xi, fit.sigma + hs) - 2 * fit.loglik + ll(fit.xi, fit.sigma - hs)) /
      (hs * hs);
  const double dxs = (ll(fit.xi + hx, fit.sigma + hs) -
                      ll(fit.xi + hx, fit.sigma - hs) -
                      ll(fit.xi - hx, fit.sigma + hs) +
                      ll(fit.xi - hx, fit.sigma - hs)) /
                     (4 * hx * hs);
  const double det = dxx * dss - dxs * dxs;
  if (det > 0 && dxx < 0) {
    fit.xi_se = std::sqrt(-dss / det);
    fit.sigma_se = std::sqrt(-dxx / det);
  }
  return fit;
}

// Joint fit with one tail index shared across assets and free scales.
// Thresholds are per-asset empirical q0-quantiles; the shared profile
// log-likelihood sums the per-asset profiles.
inline TailModel common_xi_fit(const LossPanel& panel, double q0 = 0.98) {
  if (!(q0 > 0) || !(q0 < 1)) throw InvalidInput("q0 must lie in (0, 1)");
  const int d = panel.d();
  if (d < 1 || panel.n() < 1) throw DataError("empty panel");

  std::vector<std::vector<double>> exc(static_cast<std::size_t>(d));
  TailModel model;
  model.p0 = 1.0 - q0;
  model.threshold.resize(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j) {
    const double u = empirical_var(Eigen::VectorXd(panel.X.col(j)), q0);
    model.threshold[static_cast<std::size_t>(j)] = u;
    for (std::int64_t i = 0; i < panel.n(); ++i)
      if (panel.X(i, j) > u) exc[static_cast<std::size_t>(j)].push_back(panel.X(i, j) - u);
    if (exc[static_cast<std::size_t>(j)].size() < 30)
      throw DataError("asset " + std::to_string(j + 1) +
                      ": fewer than 30 exceedances at q0");
  }

  auto profile = [&](double xi) {
    double acc = 0;
    for (const auto& y : exc)
      acc += detail::gpd_loglik(y, xi, detail::gpd_profile_sigma(y, xi));
    return acc;
  };
  model.xi = detail::maximize_profile(profile, detail::kXiLo, detail::kXiHi);
  model.sigma.resize(static_cast<std::size_t>(d));
  for (int j = 0; j < d; ++j)
    model.sigma[static_cast<std::size_t>(j)] =
        detail::gpd_profile_sigma(exc[static_cast<std::size_t>(j)], model.xi);
  return model;
}

inline std::vector<double> scale_balanced_weights(
    const std::vector<double>& sigma) {
  if (sigma.empty()) throw InvalidInput("no scales given");
  double total = 0;
  for (double s : sigma) {
    if (!(s > 0)) throw InvalidInput("scales must be positive");
    total += 1.0 / s;
  }
  std::vector<double> w(sigma.size());
  for (std::size_t j = 0; j < sigma.size(); ++j) w[j] = 1.0 / (sigma[j] * total);
  return w;
}

// Baseline VaR of the reference position w_1 X_1 from the GP tail
// approximation P(X_1 > x) ~ p0 (1 + xi x / sigma_1)^(-1/xi):
//   VaR_q(w_1 X_1) ~ w_1 (sigma_1/xi) ((1-q)/p0)^(-xi).
inline double baseline_var_gp(const TailModel& model, double w1, double q) {
  if (model.sigma.empty() || !(model.sigma[0] > 0))
    throw InvalidInput("tail model lacks a positive reference scale");
  if (!(model.xi > 0))
    throw InvalidInput("baseline requires a heavy tail (xi > 0)");
  if (!(q > 1.0 - model.p0))
    throw InvalidInput("quantile must exceed the threshold level 1 - p0");
  return w1 * (model.sigma[0] / model.xi) *
         std::pow((1.0 - q) / model.p0, -model.xi);
}

struct ReturnLevelRow {
  double years = 0;
  double q = 0;
  double baseline = 0;
  std::vector<double> levels;  // baseline scaled by each chi in turn
};

// Return levels at q = 1 - 1/(trading_days * m) for each horizon m, with
// one scaled column per extreme-VaR ratio supplied.
inline std::vector<ReturnLevelRow> return_level_bounds(
    const TailModel& model, double w1, const std::vector<double>& chis,
    const std::vector<double>& years, int trading_days = 252) {
  if (trading_days <= 0) throw InvalidInput("trading_days must be positive");
  std::vector<ReturnLevelRow> rows;
  for (double m : years) {
    if (!(m > 0)) throw InvalidInput("horizons must be positive");
    ReturnLevelRow row;
    row.years = m;
    row.q = 1.0 - 1.0 / (trading_days * m);
    row.baseline = baseline_var_gp(model, w1, row.q);
    for (double chi : chis) row.levels.push_back(chi * row.baseline);
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Extremal coefficient estimation.

struct ThresholdOptions {
  double q0 = 0.98;
  bool per_asset = false;  // threshold each margin at its own q0-quantile
};

// Self-normalized counting estimator on a (scale-balanced) panel: with
// threshold x from the reference asset,
//   theta_hat(J) = #{i: max_{j in J} X_ij > x} / #{i: X_i1 > x}.
// Every estimate is the exceedance mass of a union of events from one
// empirical point measure, so the output passes check_consistency exactly
// and theta_hat({1}) = 1 under the reference convention.
inline SubsetFamily estimate_extremal_coeffs(const LossPanel& panel,
                                             const std::vector<SubsetId>& sets,
                                             const ThresholdOptions& opts = {}) {
  const int d = panel.d();
  check_dimension(d);
  if (!(opts.q0 > 0) || !(opts.q0 < 1)) throw InvalidInput("q0 must lie in (0, 1)");
  if (sets.empty()) throw InvalidInput("no coefficient sets requested");

  std::vector<double> x(static_cast<std::size_t>(d));
  if (opts.per_asset) {
    for (int j = 0; j < d; ++j)
      x[static_cast<std::size_t>(j)] = empirical_var(Eigen::VectorXd(panel.X.col(j)), opts.q0);
  } else {
    const double ref = empirical_var(Eigen::VectorXd(panel.X.col(0)), opts.q0);
    std::fill(x.begin(), x.end(), ref);
  }

  std::int64_t denom = 0;
  for (std::int64_t i = 0; i < panel.n(); ++i)
    if (panel.X(i, 0) > x[0]) ++denom;
  if (denom == 0) throw DataError("reference asset has no exceedances at q0");

  SubsetFamily out;
  out.d = d;
  for (SubsetId J : sets) {
    if (J == 0 || J >= (SubsetId{1} << d))
      throw InvalidInput("coefficient set out of range for panel dimension");
    std::int64_t count = 0;
    for (std::int64_t i = 0; i < panel.n(); ++i) {
      bool hit = false;
      SubsetId s = J;
      for (int j = 0; s != 0 && !hit; ++j, s >>= 1)
        if ((s & 1u) && panel.X(i, j) > x[static_cast<std::size_t>(j)]) hit = true;
      if (hit) ++count;
    }
    out.add(J, static_cast<double>(count) / static_cast<double>(denom));
  }
  out.finalize();
  return out;
}

}  // namespace xvar
