#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include <xvar/errors.hpp>
#include <xvar/nnls.hpp>
#include <xvar/subsets.hpp>

namespace xvar {

// Empirical extremal coefficients rarely satisfy the consistency
// inequalities exactly. Calibration replaces them with the closest family
// realizable by a Tawn-Molchanov measure: solve
//   min_{beta >= 0} || c_hat - A beta ||^2 + ridge ||beta||^2,
//   A_{J,K} = 1{J ∩ K != ∅},
// then standardize the fitted margins to one and read the calibrated
// values off the fitted measure.

struct CalibrationResult {
  SubsetFamily calibrated;        // raw sets plus all singletons
  MobiusWeights beta;             // fitted masses after rescaling
  std::vector<SubsetId> columns;  // column set actually used
  double fit_residual = 0;        // ||c_hat - A beta|| before rescaling
  double singleton_scale = 1;     // largest fitted singleton value
  double singleton_defect = 0;    // worst deviation absorbed by pinning
  std::size_t nnls_iterations = 0;
};

inline CalibrationResult project_to_consistent(const SubsetFamily& raw,
                                               double ridge = 1e-6,
                                               int column_cap_dim = 14) {
  check_dimension(raw.d);
  if (raw.size() == 0) throw InvalidInput("no coefficients to calibrate");
  if (ridge < 0) throw InvalidInput("ridge must be nonnegative");
  const int d = raw.d;

  // Rows: the raw sets, with any missing singleton added at its known
  // value of one so the fit is anchored to valid margins.
  SubsetFamily rows = raw;
  for (int j = 1; j <= d; ++j) {
    const SubsetId s = SubsetId{1} << (j - 1);
    if (!rows.has(s)) rows.add(s, 1.0);
  }
  rows.finalize();

  CalibrationResult res;
  if (d <= column_cap_dim) {
    res.columns = enumerate_subsets(d);
  } else {
    // Dense column generation is out of reach; restrict the masses to the
    // sets the constraints can see, plus singletons and the full set.
    std::vector<SubsetId> cols = rows.sets;
    for (int j = 1; j <= d; ++j) cols.push_back(SubsetId{1} << (j - 1));
    cols.push_back(full_set(d));
    std::sort(cols.begin(), cols.end(), subset_order_less);
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    res.columns = std::move(cols);
  }

  const int m = static_cast<int>(rows.size());
  const int n = static_cast<int>(res.columns.size());
  Eigen::MatrixXd A(m, n);
  Eigen::VectorXd b(m);
  for (int row = 0; row < m; ++row) {
    const SubsetId J = rows.sets[static_cast<std::size_t>(row)];
    b[row] = rows.values[static_cast<std::size_t>(row)];
    for (int col = 0; col < n; ++col)
      A(row, col) = (J & res.columns[static_cast<std::size_t>(col)]) ? 1.0 : 0.0;
  }

  NnlsResult fit = solve_nnls(A, b, ridge);
  res.fit_residual = fit.residual_norm;
  res.nnls_iterations = fit.iterations;

  // Margin of coordinate j under the fitted measure = fitted singleton
  // value. Standardize by dividing out the largest margin, then top up
  // each singleton's own mass so every margin is exactly one. The result
  // stays exactly of the form A beta with beta >= 0, so downstream
  // consistency checks and LP feasibility hold to machine precision.
  std::vector<double> margin(static_cast<std::size_t>(d), 0.0);
  for (int col = 0; col < n; ++col) {
    SubsetId K = res.columns[static_cast<std::size_t>(col)];
    for (int j = 0; K != 0; ++j, K >>= 1)
      if (K & 1u) margin[static_cast<std::size_t>(j)] += fit.x[col];
  }
  res.singleton_scale = *std::max_element(margin.begin(), margin.end());
  if (!(res.singleton_scale > 1e-12))
    throw NumericalError("calibrated measure carries no mass");

  res.beta.d = d;
  res.beta.beta.assign(full_set(d), 0.0);
  for (int col = 0; col < n; ++col)
    res.beta.beta[res.columns[static_cast<std::size_t>(col)] - 1] =
        fit.x[col] / res.singleton_scale;
  for (int j = 0; j < d; ++j) {
    const double deficit = 1.0 - margin[static_cast<std::size_t>(j)] / res.singleton_scale;
    res.singleton_defect = std::max(res.singleton_defect, deficit);
    res.beta.beta[(SubsetId{1} << j) - 1] += deficit;
  }

  res.calibrated.d = d;
  for (int row = 0; row < m; ++row) {
    const SubsetId J = rows.sets[static_cast<std::size_t>(row)];
    double value = 0;
    for (SubsetId K : res.columns)
      if ((K & J) != 0) value += res.beta.beta[K - 1];
    res.calibrated.add(J, value);
  }
  res.calibrated.finalize();
  return res;
}

}  // namespace xvar
