#include "minty/monotone.hpp"

#include <cmath>

namespace minty {

std::string to_string(Tri t) {
  switch (t) {
    case Tri::no: return "false";
    case Tri::yes: return "true";
    case Tri::unknown: break;
  }
  return "unknown";
}

MonotoneOperator::MonotoneOperator(Map resolvent, OperatorFlags flags, std::string label,
                                   std::optional<Map::Evaluator> direct,
                                   std::optional<Map::Evaluator> inverse_direct)
    : resolvent_(std::move(resolvent)),
      flags_(flags),
      label_(std::move(label)),
      direct_(std::move(direct)),
      inverse_direct_(std::move(inverse_direct)) {}

Vector MonotoneOperator::direct(const Vector& x) const {
  if (!direct_) throw InvalidArgument("operator " + label_ + " has no direct evaluator");
  if (x.size() != dim()) throw DimensionError("operator " + label_ + ": dimension mismatch");
  return (*direct_)(x);
}

namespace {

double residual_norm(const Map::Evaluator& a, const Vector& x, const Vector& y) {
  return (x + a(x) - y).norm();
}

}  // namespace

Vector solve_resolvent_equation(const Map::Evaluator& a, const Vector& y,
                                const ResolventSolverOptions& opts) {
  const auto n = y.size();
  const double target = opts.residual_tol * std::max(1.0, y.norm());
  Vector x = y;
  Vector ax = a(x);
  double res = (x + ax - y).norm();

  for (int step = 0; step < opts.newton_steps && res > target; ++step) {
    const double h = 1e-6 * (1.0 + x.norm());
    Matrix jac = Matrix::Identity(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector xh = x;
      xh[j] += h;
      jac.col(j) += (a(xh) - ax) / h;
    }
    const Vector f = x + ax - y;
    Vector delta;
    try {
      delta = LinearSolver<double>(jac, 1e14).solve(-f);
    } catch (const SingularMatrixError&) {
      break;
    }
    // Backtrack until the residual decreases; give up on Newton otherwise.
    double t = 1.0;
    bool improved = false;
    for (int k = 0; k < 30; ++k) {
      const Vector trial = x + t * delta;
      const double r = residual_norm(a, trial, y);
      if (r < res) {
        x = trial;
        res = r;
        improved = true;
        break;
      }
      t *= 0.5;
    }
    if (!improved) break;
    ax = a(x);
  }

  for (int step = 0; step < opts.damped_steps && res > target; ++step) {
    x = 0.5 * (x + y - a(x));
    res = residual_norm(a, x, y);
  }
  if (!(res <= target)) {
    throw ConvergenceError("resolvent solver did not reach residual " + std::to_string(target), res);
  }
  return x;
}

MonotoneOperator MonotoneOperator::from_direct(int dim, Map::Evaluator a, OperatorFlags flags,
                                               std::string label, ResolventSolverOptions opts) {
  Map j(dim, [a, opts](const Vector& y) { return solve_resolvent_equation(a, y, opts); },
        make_provenance("resolvent", {make_provenance(label)}));
  return {std::move(j), flags, std::move(label), std::move(a)};
}

GraphSample swap(const GraphSample& g) {
  GraphSample out;
  out.pairs.reserve(g.pairs.size());
  for (const auto& p : g.pairs) out.pairs.push_back({p.u, p.x});
  return out;
}

Map resolvent(const MonotoneOperator& a) { return a.resolvent(); }

Map complement(const Map& t) {
  std::optional<AffineForm> form;
  if (const auto& f = t.affine_form()) {
    form = AffineForm{Matrix::Identity(t.dim(), t.dim()) - f->linear, -f->offset};
  }
  return {t.dim(), [t](const Vector& x) { return Vector(x - t(x)); },
          make_provenance("complement", {t.provenance()}), std::move(form)};
}

Map reflect(const Map& t) {
  std::optional<AffineForm> form;
  if (const auto& f = t.affine_form()) {
    form = AffineForm{2.0 * f->linear - Matrix::Identity(t.dim(), t.dim()), 2.0 * f->offset};
  }
  return {t.dim(), [t](const Vector& x) { return Vector(2.0 * t(x) - x); },
          make_provenance("reflect", {t.provenance()}), std::move(form)};
}

MonotoneOperator inverse(const MonotoneOperator& a) {
  const auto& f = a.flags();
  OperatorFlags flags{f.is_linear, f.is_affine, f.is_subdifferential,
                      f.inverse_at_most_single_valued, f.at_most_single_valued};
  return {complement(a.resolvent()), flags, "inverse(" + a.label() + ")",
          a.inverse_direct_evaluator(), a.direct_evaluator()};
}

GraphSample minty_sample(const MonotoneOperator& a, const std::vector<Vector>& probes) {
  const Map& j = a.resolvent();
  GraphSample g;
  g.pairs.reserve(probes.size());
  for (const auto& p : probes) {
    Vector x = j(p);
    Vector u = p - x;
    g.pairs.push_back({std::move(x), std::move(u)});
  }
  return g;
}

MonotoneOperator from_firm(const Map& t, std::string label) {
  OperatorFlags flags;
  if (const auto& f = t.affine_form()) {
    flags.is_affine = Tri::yes;
    flags.is_linear = f->is_linear() ? Tri::yes : Tri::no;
  }
  if (label.empty()) label = "from_firm(" + t.describe() + ")";
  return {t, flags, std::move(label)};
}

}  // namespace minty
