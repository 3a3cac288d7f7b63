#pragma once

#include <memory>
#include <string>
#include <variant>

#include "minty/monotone.hpp"
#include "minty/prox.hpp"

namespace minty {

struct OperatorSpec;

namespace op {

/// x -> M x.
struct Linear {
  Matrix m;
};
/// x -> M x + b.
struct Affine {
  Matrix m;
  Vector b;
};
/// x -> z.
struct Constant {
  Vector z;
};
/// x -> (x_n / n) on the first d coordinates.
struct DiagHarmonic {
  int d;
};
struct Subdifferential {
  ConvexFunctionSpec f;
};
/// Normal cone of a set given by one of the indicator variants.
struct NormalCone {
  ConvexFunctionSpec set;
};
/// epsilon * Id + inner.
struct ScaledIdentityPlus {
  double epsilon;
  std::shared_ptr<const OperatorSpec> inner;
};

}  // namespace op

/// Declarative description of a maximally monotone operator on R^dim.
struct OperatorSpec {
  std::variant<op::Linear, op::Affine, op::Constant, op::DiagHarmonic, op::Subdifferential,
               op::NormalCone, op::ScaledIdentityPlus>
      variant;
  int dim;
};

namespace spec {
OperatorSpec linear(Matrix m);
OperatorSpec affine(Matrix m, Vector b);
OperatorSpec constant(Vector z);
OperatorSpec diag_harmonic(int d);
OperatorSpec subdifferential(ConvexFunctionSpec f, int dim);
OperatorSpec normal_cone(ConvexFunctionSpec set, int dim);
OperatorSpec scaled_identity_plus(double epsilon, OperatorSpec inner);
/// The rotation by pi/2, [[0,-1],[1,0]].
OperatorSpec skew();
}  // namespace spec

std::string describe(const OperatorSpec& s);

/// Validates `s` and returns the operator with its closed-form resolvent.
/// Throws MonotonicityError when a linear part has M + M^T indefinite,
/// DimensionError / InvalidArgument for malformed specs.
MonotoneOperator make_operator(const OperatorSpec& s);

/// x -> (n/(n+1) x_n)_{n=1..d}.
Vector diag_harmonic_resolvent(int d, const Vector& x);

}  // namespace minty
