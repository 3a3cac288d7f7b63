#include "minty/catalog.hpp"

#include <sstream>

namespace minty {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Tri tri(bool b) { return b ? Tri::yes : Tri::no; }

bool is_symmetric(const Matrix& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol::linear * std::max(1.0, m.cwiseAbs().maxCoeff());
}

bool has_full_rank(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  return s(s.size() - 1) > tol::linear * std::max(1.0, s(0));
}

void require_dim(Eigen::Index got, int dim, const std::string& what) {
  if (got != dim) {
    throw DimensionError(what + " has size " + std::to_string(got) + ", expected " +
                         std::to_string(dim));
  }
}

void require_monotone_matrix(const Matrix& m, int dim, const std::string& what) {
  require_dim(m.rows(), dim, what + " rows");
  require_dim(m.cols(), dim, what + " cols");
  if (!m.allFinite()) throw InvalidArgument(what + " has non-finite entries");
  const double lo = min_symmetric_eigenvalue(m);
  if (lo < -tol::linear * std::max(1.0, m.cwiseAbs().maxCoeff())) {
    std::ostringstream os;
    os.precision(17);
    os << what << " is not monotone: M + M^T has eigenvalue " << lo;
    throw MonotonicityError(os.str(), lo);
  }
}

void validate_spec(const OperatorSpec& s) {
  if (s.dim < 1) throw InvalidArgument("operator dimension must be positive");
  std::visit(overloaded{
                 [&](const op::Linear& l) { require_monotone_matrix(l.m, s.dim, "linear matrix"); },
                 [&](const op::Affine& a) {
                   require_monotone_matrix(a.m, s.dim, "affine matrix");
                   require_dim(a.b.size(), s.dim, "affine offset");
                   if (!a.b.allFinite()) throw InvalidArgument("affine offset has non-finite entries");
                 },
                 [&](const op::Constant& c) {
                   require_dim(c.z.size(), s.dim, "constant value");
                   if (!c.z.allFinite()) throw InvalidArgument("constant value has non-finite entries");
                 },
                 [&](const op::DiagHarmonic& d) {
                   if (d.d < 1) throw InvalidArgument("diag_harmonic: d must be positive");
                   require_dim(d.d, s.dim, "diag_harmonic d");
                 },
                 [&](const op::Subdifferential& sd) { validate(sd.f, s.dim); },
                 [&](const op::NormalCone& nc) {
                   if (!is_indicator(nc.set))
                     throw InvalidArgument("normal_cone requires an indicator set");
                   validate(nc.set, s.dim);
                 },
                 [&](const op::ScaledIdentityPlus& sip) {
                   if (!(sip.epsilon >= 0.0) || !std::isfinite(sip.epsilon))
                     throw InvalidArgument("scaled_identity_plus: epsilon must be >= 0");
                   if (!sip.inner) throw InvalidArgument("scaled_identity_plus: missing inner operator");
                   require_dim(sip.inner->dim, s.dim, "scaled_identity_plus inner dimension");
                   validate_spec(*sip.inner);
                 },
             },
             s.variant);
}

/// Resolvent of lambda * A for the operator described by s.
struct ScaledResolvent {
  Map::Evaluator eval;
  std::optional<AffineForm> affine;
};

ScaledResolvent function_resolvent(const ConvexFunctionSpec& f, double lambda, int dim) {
  ScaledResolvent out;
  out.eval = [f, lambda](const Vector& y) { return prox(f, y, lambda); };
  const Matrix id = Matrix::Identity(dim, dim);
  if (const auto* q = std::get_if<fn::Quadratic>(&f)) {
    out.affine = AffineForm{id / (1.0 + lambda * q->coefficient), Vector::Zero(dim)};
  } else if (const auto* s = std::get_if<fn::IndicatorSingleton>(&f)) {
    out.affine = AffineForm{Matrix::Zero(dim, dim), s->point};
  } else if (const auto* a = std::get_if<fn::IndicatorAffine>(&f)) {
    const Matrix p = a->basis * a->basis.transpose();
    out.affine = AffineForm{p, a->anchor - p * a->anchor};
  } else if (const auto* l = std::get_if<fn::L1>(&f); l && l->weight == 0.0) {
    out.affine = AffineForm{id, Vector::Zero(dim)};
  }
  return out;
}

ScaledResolvent scaled_resolvent(const OperatorSpec& s, double lambda) {
  const int dim = s.dim;
  return std::visit(
      overloaded{
          [&](const op::Linear& l) -> ScaledResolvent {
            auto solver = std::make_shared<const LinearSolver<double>>(
                Matrix(Matrix::Identity(dim, dim) + lambda * l.m));
            return {[solver](const Vector& y) { return solver->solve(y); },
                    AffineForm{solver->inverse(), Vector::Zero(dim)}};
          },
          [&](const op::Affine& a) -> ScaledResolvent {
            auto solver = std::make_shared<const LinearSolver<double>>(
                Matrix(Matrix::Identity(dim, dim) + lambda * a.m));
            const Vector shift = lambda * a.b;
            const Matrix inv = solver->inverse();
            return {[solver, shift](const Vector& y) { return solver->solve(y - shift); },
                    AffineForm{inv, -(inv * shift)}};
          },
          [&](const op::Constant& c) -> ScaledResolvent {
            const Vector shift = lambda * c.z;
            return {[shift](const Vector& y) { return Vector(y - shift); },
                    AffineForm{Matrix::Identity(dim, dim), -shift}};
          },
          [&](const op::DiagHarmonic& d) -> ScaledResolvent {
            Vector diag(d.d);
            for (int n = 1; n <= d.d; ++n) diag[n - 1] = double(n) / (double(n) + lambda);
            return {[diag](const Vector& y) { return Vector(diag.cwiseProduct(y)); },
                    AffineForm{diag.asDiagonal(), Vector::Zero(dim)}};
          },
          [&](const op::Subdifferential& sd) { return function_resolvent(sd.f, lambda, dim); },
          [&](const op::NormalCone& nc) { return function_resolvent(nc.set, lambda, dim); },
          [&](const op::ScaledIdentityPlus& sip) -> ScaledResolvent {
            // (1 + lambda eps) x + lambda B x = y  <=>  x = J_{mu B}(y / (1 + lambda eps))
            const double damp = 1.0 + lambda * sip.epsilon;
            auto inner = scaled_resolvent(*sip.inner, lambda / damp);
            ScaledResolvent out;
            out.eval = [e = inner.eval, damp](const Vector& y) { return e(y / damp); };
            if (inner.affine) out.affine = AffineForm{inner.affine->linear / damp, inner.affine->offset};
            return out;
          },
      },
      s.variant);
}

OperatorFlags function_flags(const ConvexFunctionSpec& f, int dim) {
  OperatorFlags fl;
  fl.is_subdifferential = Tri::yes;
  std::visit(overloaded{
                 [&](const fn::Quadratic&) {
                   fl.is_linear = fl.is_affine = Tri::yes;
                   fl.at_most_single_valued = fl.inverse_at_most_single_valued = Tri::yes;
                 },
                 [&](const fn::L1& l) {
                   const bool zero = l.weight == 0.0;
                   fl.is_linear = fl.is_affine = tri(zero);
                   fl.at_most_single_valued = tri(zero);
                   fl.inverse_at_most_single_valued = Tri::no;
                 },
                 [&](const fn::IndicatorBall&) {
                   fl.is_linear = fl.is_affine = Tri::no;
                   fl.at_most_single_valued = fl.inverse_at_most_single_valued = Tri::no;
                 },
                 [&](const fn::IndicatorBox& b) {
                   const bool point = (b.lower.array() == b.upper.array()).all();
                   fl.is_affine = tri(point);
                   fl.is_linear = tri(point && b.lower.isZero(0.0));
                   fl.at_most_single_valued = Tri::no;
                   fl.inverse_at_most_single_valued = tri(point);
                 },
                 [&](const fn::IndicatorSingleton& s) {
                   fl.is_affine = Tri::yes;
                   fl.is_linear = tri(s.point.isZero(0.0));
                   fl.at_most_single_valued = Tri::no;
                   fl.inverse_at_most_single_valued = Tri::yes;
                 },
                 [&](const fn::IndicatorAffine& a) {
                   fl.is_affine = Tri::yes;
                   const Vector off = a.anchor - a.basis * (a.basis.transpose() * a.anchor);
                   fl.is_linear = tri(off.norm() <= tol::linear * std::max(1.0, a.anchor.norm()));
                   fl.at_most_single_valued = tri(a.basis.cols() == dim);
                   fl.inverse_at_most_single_valued = tri(a.basis.cols() == 0);
                 },
             },
             f);
  return fl;
}

OperatorFlags spec_flags(const OperatorSpec& s) {
  return std::visit(
      overloaded{
          [&](const op::Linear& l) {
            return OperatorFlags{Tri::yes, Tri::yes, tri(is_symmetric(l.m)), Tri::yes,
                                 tri(has_full_rank(l.m))};
          },
          [&](const op::Affine& a) {
            return OperatorFlags{tri(a.b.isZero(0.0)), Tri::yes, tri(is_symmetric(a.m)), Tri::yes,
                                 tri(has_full_rank(a.m))};
          },
          [&](const op::Constant& c) {
            return OperatorFlags{tri(c.z.isZero(0.0)), Tri::yes, Tri::yes, Tri::yes, Tri::no};
          },
          [&](const op::DiagHarmonic&) {
            return OperatorFlags{Tri::yes, Tri::yes, Tri::yes, Tri::yes, Tri::yes};
          },
          [&](const op::Subdifferential& sd) { return function_flags(sd.f, s.dim); },
          [&](const op::NormalCone& nc) { return function_flags(nc.set, s.dim); },
          [&](const op::ScaledIdentityPlus& sip) {
            OperatorFlags fl = spec_flags(*sip.inner);
            // eps Id + B is strongly monotone for eps > 0, so its inverse is single-valued.
            if (sip.epsilon > 0.0) fl.inverse_at_most_single_valued = Tri::yes;
            return fl;
          },
      },
      s.variant);
}

struct DirectPair {
  std::optional<Map::Evaluator> direct;
  std::optional<Map::Evaluator> inverse;
};

DirectPair spec_direct(const OperatorSpec& s) {
  return std::visit(
      overloaded{
          [&](const op::Linear& l) -> DirectPair {
            DirectPair out;
            out.direct = [m = l.m](const Vector& x) { return Vector(m * x); };
            if (has_full_rank(l.m)) {
              auto solver = std::make_shared<const LinearSolver<double>>(l.m);
              out.inverse = [solver](const Vector& u) { return solver->solve(u); };
            }
            return out;
          },
          [&](const op::Affine& a) -> DirectPair {
            DirectPair out;
            out.direct = [m = a.m, b = a.b](const Vector& x) { return Vector(m * x + b); };
            if (has_full_rank(a.m)) {
              auto solver = std::make_shared<const LinearSolver<double>>(a.m);
              out.inverse = [solver, b = a.b](const Vector& u) { return solver->solve(u - b); };
            }
            return out;
          },
          [&](const op::Constant& c) -> DirectPair {
            return {[z = c.z](const Vector&) { return z; }, std::nullopt};
          },
          [&](const op::DiagHarmonic& d) -> DirectPair {
            Vector w(d.d);
            for (int n = 1; n <= d.d; ++n) w[n - 1] = 1.0 / double(n);
            Vector winv(d.d);
            for (int n = 1; n <= d.d; ++n) winv[n - 1] = double(n);
            return {[w](const Vector& x) { return Vector(w.cwiseProduct(x)); },
                    [winv](const Vector& u) { return Vector(winv.cwiseProduct(u)); }};
          },
          [&](const op::Subdifferential& sd) -> DirectPair {
            if (const auto* q = std::get_if<fn::Quadratic>(&sd.f)) {
              const double c = q->coefficient;
              return {[c](const Vector& x) { return Vector(c * x); },
                      [c](const Vector& u) { return Vector(u / c); }};
            }
            if (const auto* l = std::get_if<fn::L1>(&sd.f); l && l->weight == 0.0) {
              const int dim = s.dim;
              return {[dim](const Vector&) { return Vector(Vector::Zero(dim)); }, std::nullopt};
            }
            return {};
          },
          [&](const op::NormalCone&) -> DirectPair { return {}; },
          [&](const op::ScaledIdentityPlus& sip) -> DirectPair {
            auto inner = spec_direct(*sip.inner);
            if (!inner.direct) return {};
            return {[e = *inner.direct, eps = sip.epsilon](const Vector& x) {
                      return Vector(eps * x + e(x));
                    },
                    std::nullopt};
          },
      },
      s.variant);
}

}  // namespace

namespace spec {

OperatorSpec linear(Matrix m) {
  const int dim = static_cast<int>(m.rows());
  return {op::Linear{std::move(m)}, dim};
}

OperatorSpec affine(Matrix m, Vector b) {
  const int dim = static_cast<int>(m.rows());
  return {op::Affine{std::move(m), std::move(b)}, dim};
}

OperatorSpec constant(Vector z) {
  const int dim = static_cast<int>(z.size());
  return {op::Constant{std::move(z)}, dim};
}

OperatorSpec diag_harmonic(int d) { return {op::DiagHarmonic{d}, d}; }

OperatorSpec subdifferential(ConvexFunctionSpec f, int dim) {
  return {op::Subdifferential{std::move(f)}, dim};
}

OperatorSpec normal_cone(ConvexFunctionSpec set, int dim) { return {op::NormalCone{std::move(set)}, dim}; }

OperatorSpec scaled_identity_plus(double epsilon, OperatorSpec inner) {
  const int dim = inner.dim;
  return {op::ScaledIdentityPlus{epsilon, std::make_shared<const OperatorSpec>(std::move(inner))}, dim};
}

OperatorSpec skew() {
  Matrix m(2, 2);
  m << 0, -1, 1, 0;
  return linear(std::move(m));
}

}  // namespace spec

std::string describe(const OperatorSpec& s) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const op::Linear&) { os << "linear[" << s.dim << "x" << s.dim << "]"; },
                 [&](const op::Affine&) { os << "affine[" << s.dim << "x" << s.dim << "]"; },
                 [&](const op::Constant&) { os << "constant[" << s.dim << "]"; },
                 [&](const op::DiagHarmonic& d) { os << "diag_harmonic[" << d.d << "]"; },
                 [&](const op::Subdifferential& sd) { os << "subdifferential(" << describe(sd.f) << ")"; },
                 [&](const op::NormalCone& nc) { os << "normal_cone(" << describe(nc.set) << ")"; },
                 [&](const op::ScaledIdentityPlus& sip) {
                   os << "scaled_identity_plus[" << sip.epsilon << "](" << describe(*sip.inner) << ")";
                 },
             },
             s.variant);
  return os.str();
}

MonotoneOperator make_operator(const OperatorSpec& s) {
  validate_spec(s);
  auto built = scaled_resolvent(s, 1.0);
  const std::string label = describe(s);
  Map j(s.dim, std::move(built.eval), make_provenance("resolvent", {make_provenance(label)}),
        std::move(built.affine));
  auto direct = spec_direct(s);
  return {std::move(j), spec_flags(s), label, std::move(direct.direct), std::move(direct.inverse)};
}

Vector diag_harmonic_resolvent(int d, const Vector& x) {
  if (d < 1) throw InvalidArgument("diag_harmonic_resolvent: d must be positive");
  if (x.size() != d) throw DimensionError("diag_harmonic_resolvent: dimension mismatch");
  Vector out(d);
  for (int n = 1; n <= d; ++n) out[n - 1] = double(n) / double(n + 1) * x[n - 1];
  return out;
}

}  // namespace minty
