#include "minty/prox.hpp"

#include <limits>
#include <sstream>

namespace minty {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_finite(const Vector& v, const char* what) {
  if (!v.allFinite()) throw InvalidArgument(std::string(what) + " has non-finite entries");
}

void require_dim(Eigen::Index got, int dim, const char* what) {
  if (got != dim) {
    throw DimensionError(std::string(what) + " has length " + std::to_string(got) +
                         ", expected " + std::to_string(dim));
  }
}

}  // namespace

void validate(const ConvexFunctionSpec& f, int dim) {
  std::visit(overloaded{
                 [](const fn::Quadratic& q) {
                   if (!(q.coefficient > 0.0) || !std::isfinite(q.coefficient))
                     throw InvalidArgument("quadratic: coefficient must be positive");
                 },
                 [](const fn::L1& l) {
                   if (!(l.weight >= 0.0) || !std::isfinite(l.weight))
                     throw InvalidArgument("l1: weight must be nonnegative");
                 },
                 [](const fn::IndicatorBall& b) {
                   if (!(b.radius > 0.0) || !std::isfinite(b.radius))
                     throw InvalidArgument("ball: radius must be positive");
                 },
                 [dim](const fn::IndicatorBox& b) {
                   require_dim(b.lower.size(), dim, "box lower bound");
                   require_dim(b.upper.size(), dim, "box upper bound");
                   require_finite(b.lower, "box lower bound");
                   require_finite(b.upper, "box upper bound");
                   if ((b.lower.array() > b.upper.array()).any())
                     throw InvalidArgument("box: lower bound exceeds upper bound");
                 },
                 [dim](const fn::IndicatorSingleton& s) {
                   require_dim(s.point.size(), dim, "singleton point");
                   require_finite(s.point, "singleton point");
                 },
                 [dim](const fn::IndicatorAffine& a) {
                   require_dim(a.anchor.size(), dim, "affine anchor");
                   require_dim(a.basis.rows(), dim, "affine basis");
                   require_finite(a.anchor, "affine anchor");
                   if (!a.basis.allFinite()) throw InvalidArgument("affine basis has non-finite entries");
                   const auto k = a.basis.cols();
                   const Matrix gram = a.basis.transpose() * a.basis;
                   if ((gram - Matrix::Identity(k, k)).cwiseAbs().maxCoeff() > tol::linear && k > 0)
                     throw InvalidArgument("affine: basis columns are not orthonormal");
                 },
             },
             f);
}

bool is_indicator(const ConvexFunctionSpec& f) {
  return !std::holds_alternative<fn::Quadratic>(f) && !std::holds_alternative<fn::L1>(f);
}

std::string describe(const ConvexFunctionSpec& f) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const fn::Quadratic& q) { os << "quadratic[" << q.coefficient << "]"; },
                 [&](const fn::L1& l) { os << "l1[" << l.weight << "]"; },
                 [&](const fn::IndicatorBall& b) { os << "indicator_ball[" << b.radius << "]"; },
                 [&](const fn::IndicatorBox&) { os << "indicator_box"; },
                 [&](const fn::IndicatorSingleton&) { os << "indicator_singleton"; },
                 [&](const fn::IndicatorAffine& a) {
                   os << "indicator_affine[rank " << a.basis.cols() << "]";
                 },
             },
             f);
  return os.str();
}

Vector prox(const ConvexFunctionSpec& f, const Vector& x, double lambda) {
  if (!(lambda > 0.0)) throw InvalidArgument("prox: lambda must be positive");
  return std::visit(
      overloaded{
          [&](const fn::Quadratic& q) -> Vector { return x / (1.0 + lambda * q.coefficient); },
          [&](const fn::L1& l) -> Vector { return soft_threshold(x, lambda * l.weight); },
          [&](const fn::IndicatorBall& b) -> Vector { return project_ball(x, b.radius); },
          [&](const fn::IndicatorBox& b) -> Vector {
            require_dim(x.size(), static_cast<int>(b.lower.size()), "prox argument");
            return project_box(x, b.lower, b.upper);
          },
          [&](const fn::IndicatorSingleton& s) -> Vector {
            require_dim(x.size(), static_cast<int>(s.point.size()), "prox argument");
            return s.point;
          },
          [&](const fn::IndicatorAffine& a) -> Vector {
            require_dim(x.size(), static_cast<int>(a.anchor.size()), "prox argument");
            return project_affine(x, a.anchor, a.basis);
          },
      },
      f);
}

double evaluate(const ConvexFunctionSpec& f, const Vector& x) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr double slack = 1e-12;
  return std::visit(
      overloaded{
          [&](const fn::Quadratic& q) { return 0.5 * q.coefficient * x.squaredNorm(); },
          [&](const fn::L1& l) { return l.weight * x.lpNorm<1>(); },
          [&](const fn::IndicatorBall& b) { return x.norm() <= b.radius + slack ? 0.0 : inf; },
          [&](const fn::IndicatorBox& b) {
            const bool in = (x.array() >= b.lower.array() - slack).all() &&
                            (x.array() <= b.upper.array() + slack).all();
            return in ? 0.0 : inf;
          },
          [&](const fn::IndicatorSingleton& s) {
            return (x - s.point).norm() <= slack ? 0.0 : inf;
          },
          [&](const fn::IndicatorAffine& a) {
            return (x - project_affine(x, a.anchor, a.basis)).norm() <= slack ? 0.0 : inf;
          },
      },
      f);
}

}  // namespace minty
