#pragma once

#include <string>
#include <variant>

#include "minty/numeric.hpp"

namespace minty {

// Closed-form proximal mappings as expression-friendly free functions.

/// sign(x_i) * max(|x_i| - weight, 0).
template <typename Derived>
VectorX<typename Derived::Scalar> soft_threshold(const Eigen::MatrixBase<Derived>& x,
                                                 typename Derived::Scalar weight) {
  using Scalar = typename Derived::Scalar;
  return (x.array().sign() * (x.array().abs() - weight).max(Scalar(0))).matrix();
}

/// Nearest point of the origin-centred ball of radius r.
template <typename Derived>
VectorX<typename Derived::Scalar> project_ball(const Eigen::MatrixBase<Derived>& x,
                                               typename Derived::Scalar radius) {
  using Scalar = typename Derived::Scalar;
  const Scalar n = x.norm();
  if (n <= radius) return x;
  return (radius / n) * x;
}

template <typename Derived, typename DerivedLo, typename DerivedHi>
VectorX<typename Derived::Scalar> project_box(const Eigen::MatrixBase<Derived>& x,
                                              const Eigen::MatrixBase<DerivedLo>& lower,
                                              const Eigen::MatrixBase<DerivedHi>& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

/// Projection onto p + span(B) for B with orthonormal columns.
template <typename Derived, typename DerivedP, typename DerivedB>
VectorX<typename Derived::Scalar> project_affine(const Eigen::MatrixBase<Derived>& x,
                                                 const Eigen::MatrixBase<DerivedP>& anchor,
                                                 const Eigen::MatrixBase<DerivedB>& basis) {
  return anchor + basis * (basis.transpose() * (x - anchor));
}

namespace fn {

/// (c/2) ||x||^2 with c > 0.
struct Quadratic {
  double coefficient;
};
/// weight * ||x||_1 with weight >= 0.
struct L1 {
  double weight;
};
/// Indicator of the closed ball of the given radius around the origin.
struct IndicatorBall {
  double radius;
};
struct IndicatorBox {
  Vector lower;
  Vector upper;
};
struct IndicatorSingleton {
  Vector point;
};
/// Indicator of anchor + span(basis); basis columns orthonormal.
struct IndicatorAffine {
  Vector anchor;
  Matrix basis;
};

}  // namespace fn

using ConvexFunctionSpec = std::variant<fn::Quadratic, fn::L1, fn::IndicatorBall, fn::IndicatorBox,
                                        fn::IndicatorSingleton, fn::IndicatorAffine>;

/// Checks sign constraints and, for dimension-carrying variants, that the
/// stored vectors have length `dim`. Throws InvalidArgument / DimensionError.
void validate(const ConvexFunctionSpec& f, int dim);

bool is_indicator(const ConvexFunctionSpec& f);

std::string describe(const ConvexFunctionSpec& f);

/// Prox of (lambda * f) at x; lambda > 0.
Vector prox(const ConvexFunctionSpec& f, const Vector& x, double lambda = 1.0);

/// Value of f at x (+inf outside the domain of an indicator).
double evaluate(const ConvexFunctionSpec& f, const Vector& x);

}  // namespace minty
