#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "arimerge/arima.hpp"
#include "arimerge/error.hpp"

namespace arimerge {

/// Per-child gap to the merged model, one sigma per coefficient family.
/// Each sigma is the max absolute gap, widened by ulps where needed so that
/// merged +/- sigma always brackets the child's value in floating point.
template <typename Scalar>
struct BasicDeviationRecord {
  std::string child_id;
  Scalar sigma_constant = 0;
  Scalar sigma_phi = 0;
  Scalar sigma_psi = 0;
};

template <typename Scalar>
struct BasicMergedModel {
  BasicArimaModel<Scalar> model;
  std::array<BasicDeviationRecord<Scalar>, 2> deviations;
  Scalar merge_error = 0;
};

template <typename Scalar>
struct Interval {
  Scalar lo;
  Scalar hi;

  [[nodiscard]] bool contains(Scalar x) const { return lo <= x && x <= hi; }
};

template <typename Scalar>
struct BasicIntervalModel {
  Interval<Scalar> constant;
  std::vector<Interval<Scalar>> ar;
  std::vector<Interval<Scalar>> ma;

  [[nodiscard]] bool contains(const BasicArimaModel<Scalar>& m) const {
    if (!constant.contains(m.constant)) return false;
    if (static_cast<Eigen::Index>(ar.size()) != m.ar.size() ||
        static_cast<Eigen::Index>(ma.size()) != m.ma.size()) {
      return false;
    }
    for (Eigen::Index i = 0; i < m.ar.size(); ++i) {
      if (!ar[static_cast<std::size_t>(i)].contains(m.ar(i))) return false;
    }
    for (Eigen::Index i = 0; i < m.ma.size(); ++i) {
      if (!ma[static_cast<std::size_t>(i)].contains(m.ma(i))) return false;
    }
    return true;
  }
};

namespace detail {

template <typename Scalar>
Scalar bracketing_sigma(Scalar merged, Scalar child) {
  Scalar sigma = std::abs(child - merged);
  while (merged + sigma < child || merged - sigma > child) {
    sigma = std::nextafter(sigma, std::numeric_limits<Scalar>::infinity());
  }
  return sigma;
}

template <typename Derived1, typename Derived2>
typename Derived1::Scalar family_sigma(const Eigen::MatrixBase<Derived1>& merged,
                                       const Eigen::MatrixBase<Derived2>& child) {
  using Scalar = typename Derived1::Scalar;
  Scalar sigma = 0;
  for (Eigen::Index i = 0; i < merged.size(); ++i) {
    sigma = std::max(sigma, bracketing_sigma(merged(i), child(i)));
  }
  return sigma;
}

/// c1 + share2 * (c2 - c1), clamped into [min(c1,c2), max(c1,c2)].
template <typename Scalar>
Scalar blend(Scalar c1, Scalar c2, Scalar share2) {
  const Scalar v = c1 + share2 * (c2 - c1);
  return std::clamp(v, std::min(c1, c2), std::max(c1, c2));
}

template <typename Scalar>
void check_mergeable(const BasicArimaModel<Scalar>& m1, const BasicArimaModel<Scalar>& m2) {
  if (!(m1.spec == m2.spec)) {
    throw Error(ErrorKind::SpecMismatch,
                "cannot merge " + m1.spec.to_string() + " with " + m2.spec.to_string());
  }
}

template <typename Scalar, typename Combine>
BasicMergedModel<Scalar> merge_with(const BasicArimaModel<Scalar>& m1,
                                    const BasicArimaModel<Scalar>& m2, std::string id1,
                                    std::string id2, Combine combine) {
  check_mergeable(m1, m2);
  BasicMergedModel<Scalar> out;
  auto& m = out.model;
  m.spec = m1.spec;
  m.constant = combine(m1.constant, m2.constant);
  m.ar = m1.ar.binaryExpr(m2.ar, combine);
  m.ma = m1.ma.binaryExpr(m2.ma, combine);
  m.weight = m1.weight + m2.weight;
  out.merge_error = (m1.error_value + m2.error_value) / Scalar(2);
  m.error_value = out.merge_error;

  const std::array<const BasicArimaModel<Scalar>*, 2> children{&m1, &m2};
  std::array<std::string, 2> ids{std::move(id1), std::move(id2)};
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& c = *children[k];
    out.deviations[k] = {std::move(ids[k]), bracketing_sigma(m.constant, c.constant),
                         family_sigma(m.ar, c.ar), family_sigma(m.ma, c.ma)};
  }
  return out;
}

}  // namespace detail

/// Coefficient-wise mean of two same-order models.
template <typename Scalar>
BasicMergedModel<Scalar> average_merge(const BasicArimaModel<Scalar>& m1,
                                       const BasicArimaModel<Scalar>& m2, std::string id1 = "1",
                                       std::string id2 = "2") {
  return detail::merge_with(m1, m2, std::move(id1), std::move(id2),
                            [](Scalar a, Scalar b) { return (a + b) / Scalar(2); });
}

/// Coefficients combined in proportion to the leaf counts (weights) of the children.
template <typename Scalar>
BasicMergedModel<Scalar> weighted_merge(const BasicArimaModel<Scalar>& m1,
                                        const BasicArimaModel<Scalar>& m2, std::string id1 = "1",
                                        std::string id2 = "2") {
  if (m1.weight < 1 || m2.weight < 1) {
    throw Error(ErrorKind::InvalidInput, "merge weights must be >= 1");
  }
  if (m1.weight == m2.weight) return average_merge(m1, m2, std::move(id1), std::move(id2));
  const Scalar share2 = Scalar(m2.weight) / Scalar(m1.weight + m2.weight);
  return detail::merge_with(m1, m2, std::move(id1), std::move(id2),
                            [share2](Scalar a, Scalar b) { return detail::blend(a, b, share2); });
}

/// Error of the averaged AR(1) model:
///   (eps1 + eps2)/2 + (phi1 - phi2)(y1_prev - y2_prev)/4
template <typename Scalar>
Scalar merge_error_ar1(Scalar phi1, Scalar phi2, Scalar eps1, Scalar eps2, Scalar y1_prev,
                       Scalar y2_prev) {
  return (eps1 + eps2) / Scalar(2) + (phi1 - phi2) * (y1_prev - y2_prev) / Scalar(4);
}

namespace detail {

template <typename Scalar, typename H1, typename H2, typename R1, typename R2>
void check_windows(const BasicArimaModel<Scalar>& m1, const BasicArimaModel<Scalar>& m2,
                   const Eigen::MatrixBase<H1>& hist1, const Eigen::MatrixBase<H2>& hist2,
                   const Eigen::MatrixBase<R1>& res1, const Eigen::MatrixBase<R2>& res2) {
  check_mergeable(m1, m2);
  if (hist1.size() != m1.spec.p || hist2.size() != m1.spec.p || res1.size() != m1.spec.q ||
      res2.size() != m1.spec.q) {
    throw Error(ErrorKind::WindowLengthMismatch,
                "lag windows must have p values and q residuals for spec " + m1.spec.to_string());
  }
}

}  // namespace detail

/// Error of the averaged ARMA model. Windows are ordered most recent first:
/// hist(0) = Y(t-1), res(0) = e(t-1).
///   (eps1 + eps2)/2 + sum_i d1_i (Y1(t-i) - Y2(t-i))/4 + sum_i d2_i (e1(t-i) - e2(t-i))/4
template <typename Scalar, typename H1, typename H2, typename R1, typename R2>
Scalar merge_error_general(const BasicArimaModel<Scalar>& m1, const BasicArimaModel<Scalar>& m2,
                           Scalar eps1, Scalar eps2, const Eigen::MatrixBase<H1>& hist1,
                           const Eigen::MatrixBase<H2>& hist2, const Eigen::MatrixBase<R1>& res1,
                           const Eigen::MatrixBase<R2>& res2) {
  detail::check_windows(m1, m2, hist1, hist2, res1, res2);
  const Scalar ar_term = (m1.ar - m2.ar).dot(hist1 - hist2);
  const Scalar ma_term = (m1.ma - m2.ma).dot(res1 - res2);
  return (eps1 + eps2) / Scalar(2) + ar_term / Scalar(4) + ma_term / Scalar(4);
}

/// Magnitude bound of merge_error_general: every term taken in absolute value.
/// This is what the simulator aggregates into a merged model's error_value.
template <typename Scalar, typename H1, typename H2, typename R1, typename R2>
Scalar merge_error_bound(const BasicArimaModel<Scalar>& m1, const BasicArimaModel<Scalar>& m2,
                         Scalar eps1, Scalar eps2, const Eigen::MatrixBase<H1>& hist1,
                         const Eigen::MatrixBase<H2>& hist2, const Eigen::MatrixBase<R1>& res1,
                         const Eigen::MatrixBase<R2>& res2) {
  detail::check_windows(m1, m2, hist1, hist2, res1, res2);
  const Scalar ar_term = (m1.ar - m2.ar).cwiseAbs().dot((hist1 - hist2).cwiseAbs());
  const Scalar ma_term = (m1.ma - m2.ma).cwiseAbs().dot((res1 - res2).cwiseAbs());
  return (std::abs(eps1) + std::abs(eps2)) / Scalar(2) + ar_term / Scalar(4) +
         ma_term / Scalar(4);
}

/// Approximate child models: merged value +/- that child's family sigma.
template <typename Scalar>
std::pair<BasicIntervalModel<Scalar>, BasicIntervalModel<Scalar>> recover_children(
    const BasicMergedModel<Scalar>& mm) {
  const auto& m = mm.model;
  auto recover = [&m](const BasicDeviationRecord<Scalar>& dev) {
    BasicIntervalModel<Scalar> out;
    out.constant = {m.constant - dev.sigma_constant, m.constant + dev.sigma_constant};
    for (Eigen::Index i = 0; i < m.ar.size(); ++i) {
      out.ar.push_back({m.ar(i) - dev.sigma_phi, m.ar(i) + dev.sigma_phi});
    }
    for (Eigen::Index i = 0; i < m.ma.size(); ++i) {
      out.ma.push_back({m.ma(i) - dev.sigma_psi, m.ma(i) + dev.sigma_psi});
    }
    return out;
  };
  return {recover(mm.deviations[0]), recover(mm.deviations[1])};
}

using DeviationRecord = BasicDeviationRecord<double>;
using MergedModel = BasicMergedModel<double>;
using IntervalModel = BasicIntervalModel<double>;

}  // namespace arimerge
