#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "arimerge/error.hpp"

namespace arimerge {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// One node's readings in time order. Sampling is uniform; the index is the time.
template <typename Scalar>
class BasicSeries {
 public:
  using Vector = VectorX<Scalar>;

  BasicSeries(std::string node_id, Vector values)
      : node_id_(std::move(node_id)), values_(std::move(values)) {
    if (values_.size() < 1) {
      throw Error(ErrorKind::SeriesTooShort, "series '" + node_id_ + "' is empty");
    }
    if (!values_.allFinite()) {
      throw Error(ErrorKind::NonFinite, "series '" + node_id_ + "' has a non-finite reading");
    }
  }

  BasicSeries(std::string node_id, std::initializer_list<Scalar> values)
      : BasicSeries(std::move(node_id), from_list(values)) {}

  explicit BasicSeries(Vector values) : BasicSeries(std::string{}, std::move(values)) {}

  BasicSeries(std::initializer_list<Scalar> values) : BasicSeries(std::string{}, values) {}

  [[nodiscard]] const std::string& node_id() const noexcept { return node_id_; }
  [[nodiscard]] const Vector& values() const noexcept { return values_; }
  [[nodiscard]] Eigen::Index length() const noexcept { return values_.size(); }
  [[nodiscard]] Scalar operator[](Eigen::Index i) const { return values_(i); }

 private:
  static Vector from_list(std::initializer_list<Scalar> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (Scalar x : values) v(i++) = x;
    return v;
  }

  std::string node_id_;
  Vector values_;
};

/// Leading value consumed at each differencing level, outermost level first.
template <typename Scalar>
struct BasicDiffSeed {
  int order = 0;
  std::vector<Scalar> seeds;
};

template <typename Scalar>
struct SeriesSummary {
  Scalar mean;
  Scalar min;
  Scalar max;
};

/// One differencing level: v[i+1] - v[i].
template <typename Derived>
VectorX<typename Derived::Scalar> first_differences(const Eigen::MatrixBase<Derived>& v) {
  const Eigen::Index n = v.size();
  if (n < 2) return VectorX<typename Derived::Scalar>(0);
  return v.tail(n - 1) - v.head(n - 1);
}

template <typename Scalar>
std::pair<BasicSeries<Scalar>, BasicDiffSeed<Scalar>> difference(const BasicSeries<Scalar>& s,
                                                                 int d) {
  if (d < 0) throw Error(ErrorKind::InvalidInput, "differencing order must be >= 0");
  if (s.length() <= d) {
    throw Error(ErrorKind::SeriesTooShort, "series of length " + std::to_string(s.length()) +
                                               " cannot be differenced " + std::to_string(d) +
                                               " times");
  }
  BasicDiffSeed<Scalar> seed{d, {}};
  VectorX<Scalar> v = s.values();
  for (int level = 0; level < d; ++level) {
    seed.seeds.push_back(v(0));
    v = first_differences(v).eval();
  }
  return {BasicSeries<Scalar>(s.node_id(), std::move(v)), std::move(seed)};
}

template <typename Scalar>
BasicSeries<Scalar> integrate(const BasicSeries<Scalar>& diffs, const BasicDiffSeed<Scalar>& seed) {
  if (seed.order < 0 || static_cast<std::size_t>(seed.order) != seed.seeds.size()) {
    throw Error(ErrorKind::SeedMismatch, "seed order " + std::to_string(seed.order) + " but " +
                                             std::to_string(seed.seeds.size()) + " seeds");
  }
  VectorX<Scalar> v = diffs.values();
  for (int level = seed.order - 1; level >= 0; --level) {
    VectorX<Scalar> up(v.size() + 1);
    up(0) = seed.seeds[static_cast<std::size_t>(level)];
    for (Eigen::Index i = 0; i < v.size(); ++i) up(i + 1) = up(i) + v(i);
    v = std::move(up);
  }
  return BasicSeries<Scalar>(diffs.node_id(), std::move(v));
}

template <typename Scalar>
SeriesSummary<Scalar> summary(const BasicSeries<Scalar>& s) {
  const auto& v = s.values();
  return {v.mean(), v.minCoeff(), v.maxCoeff()};
}

using Series = BasicSeries<double>;
using DiffSeed = BasicDiffSeed<double>;

}  // namespace arimerge
