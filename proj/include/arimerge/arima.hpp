#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "arimerge/error.hpp"
#include "arimerge/series.hpp"

namespace arimerge {

/// ARIMA order triple.
struct ModelSpec {
  int p = 0;
  int d = 0;
  int q = 0;

  void validate() const {
    if (p < 0 || d < 0 || q < 0) {
      throw Error(ErrorKind::UnsupportedSpec, "orders must be non-negative, got " + to_string());
    }
  }

  [[nodiscard]] std::string to_string() const {
    return "(" + std::to_string(p) + "," + std::to_string(d) + "," + std::to_string(q) + ")";
  }

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Mean-form ARIMA model on the d-times differenced scale:
///   Y(t) = constant + sum_i ar(i) (Y(t-i) - constant) + sum_j ma(j) e(t-j) + e(t)
/// `weight` counts the leaf models this one stands for.
template <typename Scalar>
struct BasicArimaModel {
  using Vector = VectorX<Scalar>;

  ModelSpec spec;
  Scalar constant = 0;
  Vector ar;
  Vector ma;
  Scalar error_value = 0;
  long weight = 1;

  void validate() const {
    spec.validate();
    if (ar.size() != spec.p || ma.size() != spec.q) {
      throw Error(ErrorKind::InvalidInput, "coefficient counts do not match spec " +
                                               spec.to_string());
    }
    if (!std::isfinite(constant) || !ar.allFinite() || !ma.allFinite() ||
        !std::isfinite(error_value)) {
      throw Error(ErrorKind::NonFinite, "model has a non-finite parameter");
    }
    if (error_value < 0) throw Error(ErrorKind::InvalidInput, "error_value must be >= 0");
    if (weight < 1) throw Error(ErrorKind::InvalidInput, "weight must be >= 1");
  }
};

/// One-step residuals e(t) on the differenced scale. residuals(k) is e(start_index + k);
/// indices are positions in the differenced series. Earlier residuals read as zero.
template <typename Scalar>
struct BasicResidualTrace {
  VectorX<Scalar> residuals;
  Eigen::Index start_index = 0;

  [[nodiscard]] Scalar at(Eigen::Index t) const {
    if (t < start_index || t >= start_index + residuals.size()) return Scalar(0);
    return residuals(t - start_index);
  }
};

namespace detail {

template <typename Scalar>
inline constexpr Scalar kPivotThreshold = Scalar(1e-10);

/// Gaussian elimination with partial pivoting. Throws DegenerateData when the
/// largest available pivot is below kPivotThreshold.
template <typename Scalar>
VectorX<Scalar> solve_partial_pivot(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a,
                                    VectorX<Scalar> b) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot_row = col;
    a.col(col).tail(n - col).cwiseAbs().maxCoeff(&pivot_row);
    pivot_row += col;
    if (std::abs(a(pivot_row, col)) < kPivotThreshold<Scalar>) {
      throw Error(ErrorKind::DegenerateData, "normal equations are singular (pivot " +
                                                 std::to_string(double(a(pivot_row, col))) + ")");
    }
    if (pivot_row != col) {
      a.row(col).swap(a.row(pivot_row));
      std::swap(b(col), b(pivot_row));
    }
    for (Eigen::Index r = col + 1; r < n; ++r) {
      const Scalar f = a(r, col) / a(col, col);
      a.row(r).tail(n - col) -= f * a.row(col).tail(n - col);
      b(r) -= f * b(col);
    }
  }
  VectorX<Scalar> x(n);
  for (Eigen::Index r = n - 1; r >= 0; --r) {
    const Scalar tail = a.row(r).tail(n - r - 1).dot(x.tail(n - r - 1));
    x(r) = (b(r) - tail) / a(r, r);
  }
  return x;
}

template <typename Scalar>
Scalar predict_at(const BasicArimaModel<Scalar>& m, const VectorX<Scalar>& w, Eigen::Index t,
                  const BasicResidualTrace<Scalar>& e) {
  Scalar y = m.constant;
  for (Eigen::Index i = 1; i <= m.spec.p; ++i) y += m.ar(i - 1) * (w(t - i) - m.constant);
  for (Eigen::Index j = 1; j <= m.spec.q; ++j) y += m.ma(j - 1) * e.at(t - j);
  return y;
}

}  // namespace detail

template <typename Scalar>
BasicResidualTrace<Scalar> residuals(const BasicArimaModel<Scalar>& m,
                                     const BasicSeries<Scalar>& s) {
  const auto w = difference(s, m.spec.d).first.values();
  const Eigen::Index p = m.spec.p;
  if (w.size() <= p) {
    throw Error(ErrorKind::SeriesTooShort, "need more than " + std::to_string(p) +
                                               " differenced values for a residual");
  }
  BasicResidualTrace<Scalar> trace{VectorX<Scalar>::Zero(w.size() - p), p};
  for (Eigen::Index t = p; t < w.size(); ++t) {
    trace.residuals(t - p) = w(t) - detail::predict_at(m, w, t, trace);
  }
  return trace;
}

template <typename Scalar>
Scalar model_rmse(const BasicArimaModel<Scalar>& m, const BasicSeries<Scalar>& s) {
  const auto trace = residuals(m, s);
  return std::sqrt(trace.residuals.squaredNorm() / Scalar(trace.residuals.size()));
}

/// Least-squares AR(p) fit after d-fold differencing. Centered values are regressed
/// on an intercept and p lags; constant is the implied process mean.
template <typename Scalar>
BasicArimaModel<Scalar> fit_ar(const BasicSeries<Scalar>& s, const ModelSpec& spec) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  spec.validate();
  if (spec.q > 0) throw Error(ErrorKind::UnsupportedSpec, "MA estimation is not supported");
  if (spec.p == 0) throw Error(ErrorKind::UnsupportedSpec, "fitting needs p >= 1");

  const auto w = difference(s, spec.d).first.values();
  const Eigen::Index p = spec.p;
  const Eigen::Index n = w.size();
  if (n < 2 * p + 1) {
    throw Error(ErrorKind::SeriesTooShort, std::to_string(n) + " differenced values, need " +
                                               std::to_string(2 * p + 1));
  }

  const Scalar mean = w.mean();
  const VectorX<Scalar> centered = w.array() - mean;
  const Eigen::Index rows = n - p;
  Matrix design(rows, p + 1);
  design.col(0).setOnes();
  for (Eigen::Index i = 1; i <= p; ++i) design.col(i) = centered.segment(p - i, rows);
  const VectorX<Scalar> target = centered.tail(rows);

  const VectorX<Scalar> beta = detail::solve_partial_pivot<Scalar>(
      design.transpose() * design, design.transpose() * target);

  BasicArimaModel<Scalar> m;
  m.spec = spec;
  m.ar = beta.tail(p);
  m.ma = VectorX<Scalar>(0);
  const Scalar persistence = Scalar(1) - m.ar.sum();
  if (std::abs(persistence) < detail::kPivotThreshold<Scalar>) {
    throw Error(ErrorKind::DegenerateData, "AR coefficients sum to 1; the mean is undefined");
  }
  m.constant = mean + beta(0) / persistence;
  m.weight = 1;
  m.error_value = model_rmse(m, s);
  return m;
}

/// One-step forecast on the original scale. `history` is on the original scale;
/// the trailing value of each differencing level carries the forecast back up.
template <typename Scalar>
Scalar forecast_next(const BasicArimaModel<Scalar>& m, const BasicSeries<Scalar>& history,
                     const BasicResidualTrace<Scalar>& e) {
  const int d = m.spec.d;
  if (history.length() < m.spec.p + d || history.length() <= d) {
    throw Error(ErrorKind::InsufficientHistory,
                "history of " + std::to_string(history.length()) + " values for spec " +
                    m.spec.to_string());
  }
  std::vector<Scalar> last_at_level;
  VectorX<Scalar> w = history.values();
  for (int level = 0; level < d; ++level) {
    last_at_level.push_back(w(w.size() - 1));
    w = first_differences(w).eval();
  }

  const Eigen::Index n = w.size();
  Scalar y = m.constant;
  for (Eigen::Index i = 1; i <= m.spec.p; ++i) y += m.ar(i - 1) * (w(n - i) - m.constant);
  const Eigen::Index available = e.residuals.size();
  for (Eigen::Index j = 1; j <= m.spec.q && j <= available; ++j) {
    y += m.ma(j - 1) * e.residuals(available - j);
  }

  for (int level = d - 1; level >= 0; --level) y += last_at_level[static_cast<std::size_t>(level)];
  return y;
}

using ArimaModel = BasicArimaModel<double>;
using ResidualTrace = BasicResidualTrace<double>;

}  // namespace arimerge
