#include "minty/splitting.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <iomanip>
#include <sstream>

namespace minty {

namespace {

std::vector<Provenance> provenances(const std::vector<Map>& maps) {
  std::vector<Provenance> out;
  for (const auto& m : maps) out.push_back(m.provenance());
  return out;
}

int common_dim(const std::vector<Map>& maps, const char* what) {
  if (maps.empty()) throw InvalidArgument(std::string(what) + ": no maps");
  const int dim = maps.front().dim();
  for (const auto& m : maps)
    if (m.dim() != dim) throw DimensionError(std::string(what) + ": maps differ in dimension");
  return dim;
}

}  // namespace

Map compose(const std::vector<Map>& maps) {
  const int dim = common_dim(maps, "compose");
  std::optional<AffineForm> form =
      std::all_of(maps.begin(), maps.end(), [](const Map& m) { return m.affine_form().has_value(); })
          ? std::optional<AffineForm>(AffineForm{Matrix::Identity(dim, dim), Vector::Zero(dim)})
          : std::nullopt;
  if (form) {
    // T1(T2(x)) = L1 (L2 x + c2) + c1: fold from the innermost map outward.
    for (auto it = maps.rbegin(); it != maps.rend(); ++it) {
      const auto& f = *it->affine_form();
      form->offset = f.linear * form->offset + f.offset;
      form->linear = f.linear * form->linear;
    }
  }
  return {dim,
          [maps](const Vector& x) {
            Vector y = x;
            for (auto it = maps.rbegin(); it != maps.rend(); ++it) y = (*it)(y);
            return y;
          },
          make_provenance("compose", provenances(maps)), std::move(form)};
}

Map convex_combine(const std::vector<Map>& maps, const std::vector<double>& weights) {
  const int dim = common_dim(maps, "convex_combine");
  if (weights.size() != maps.size()) throw InvalidArgument("convex_combine: one weight per map");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0 && w <= 1.0)) throw InvalidArgument("convex_combine: weights must lie in (0, 1]");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw InvalidArgument("convex_combine: weights must sum to 1");

  std::optional<AffineForm> form;
  if (std::all_of(maps.begin(), maps.end(), [](const Map& m) { return m.affine_form().has_value(); })) {
    form = AffineForm{Matrix::Zero(dim, dim), Vector::Zero(dim)};
    for (std::size_t i = 0; i < maps.size(); ++i) {
      form->linear += weights[i] * maps[i].affine_form()->linear;
      form->offset += weights[i] * maps[i].affine_form()->offset;
    }
  }
  std::vector<Provenance> args = provenances(maps);
  std::string label = "convex_combination[";
  for (std::size_t i = 0; i < weights.size(); ++i) {
    std::ostringstream w;
    w << std::setprecision(6) << weights[i];
    label += (i ? "," : "") + w.str();
  }
  label += "]";
  return {dim,
          [maps, weights, dim](const Vector& x) {
            Vector y = Vector::Zero(dim);
            for (std::size_t i = 0; i < maps.size(); ++i) y += weights[i] * maps[i](x);
            return y;
          },
          make_provenance(label, std::move(args)), std::move(form)};
}

Map backward_backward(const MonotoneOperator& a1, const MonotoneOperator& a2) {
  if (a1.dim() != a2.dim()) throw DimensionError("backward_backward: operators differ in dimension");
  return compose({a1.resolvent(), a2.resolvent()});
}

Map douglas_rachford_operator(const MonotoneOperator& a1, const MonotoneOperator& a2) {
  if (a1.dim() != a2.dim()) {
    throw DimensionError("douglas_rachford_operator: operators differ in dimension");
  }
  const int dim = a1.dim();
  const Map r1 = reflect(a1.resolvent());
  const Map r2 = reflect(a2.resolvent());
  std::optional<AffineForm> form;
  if (r1.affine_form() && r2.affine_form()) {
    const auto& f1 = *r1.affine_form();
    const auto& f2 = *r2.affine_form();
    form = AffineForm{0.5 * (f1.linear * f2.linear) + 0.5 * Matrix::Identity(dim, dim),
                      0.5 * (f1.linear * f2.offset + f1.offset)};
  }
  return {dim, [r1, r2](const Vector& x) { return Vector(0.5 * r1(r2(x)) + 0.5 * x); },
          make_provenance("douglas_rachford",
                          {a1.resolvent().provenance(), a2.resolvent().provenance()}),
          std::move(form)};
}

IterationTrace picard_iterate(const Map& t, const Vector& x0, int max_iter, double stop_tol) {
  if (max_iter < 1) throw InvalidArgument("picard_iterate: max_iter must be at least 1");
  if (!(stop_tol >= 0.0)) throw InvalidArgument("picard_iterate: stop_tol must be nonnegative");
  IterationTrace tr;
  tr.iterates.push_back(x0);
  Vector x = x0;
  for (int k = 0; k < max_iter; ++k) {
    Vector next = t(x);
    const double res = (next - x).norm();
    tr.iterates.push_back(next);
    tr.residuals.push_back(res);
    tr.iterations_used = k + 1;
    x = std::move(next);
    if (!std::isfinite(res) || x.norm() > kDivergenceNorm) {
      tr.diverged = true;
      break;
    }
    if (res <= stop_tol) {
      tr.converged = true;
      tr.limit_point = x;
      break;
    }
  }
  return tr;
}

void write_trace_csv(const IterationTrace& trace, std::ostream& out) {
  const auto dim = trace.iterates.empty() ? 0 : trace.iterates.front().size();
  out << "iteration,residual";
  for (Eigen::Index i = 0; i < dim; ++i) out << ",x" << i;
  out << '\n';
  out << std::setprecision(17);
  for (std::size_t k = 0; k < trace.iterates.size(); ++k) {
    out << k << ',';
    if (k < trace.residuals.size()) out << trace.residuals[k];
    for (Eigen::Index i = 0; i < dim; ++i) out << ',' << trace.iterates[k][i];
    out << '\n';
  }
}

FixedPointEvidence multi_start_fixed_points(const Map& t, const SampleConfig& cfg, int max_iter,
                                            double stop_tol, double cluster_tol) {
  if (cfg.dim() != t.dim()) throw DimensionError("sample dimension does not match map");
  FixedPointEvidence ev;
  for (const auto& x0 : sample_points(cfg, 0)) ev.traces.push_back(picard_iterate(t, x0, max_iter, stop_tol));

  std::vector<const Vector*> limits;
  for (const auto& tr : ev.traces)
    if (tr.limit_point) limits.push_back(&*tr.limit_point);
  ev.converged_starts = static_cast<int>(limits.size());
  for (std::size_t i = 0; i < limits.size(); ++i)
    for (std::size_t j = i + 1; j < limits.size(); ++j)
      ev.diameter = std::max(ev.diameter, (*limits[i] - *limits[j]).norm());

  if (limits.empty()) {
    ev.classification = "empty_or_nonattracting";
  } else if (limits.size() < ev.traces.size()) {
    ev.classification = "mixed";
  } else if (ev.diameter <= cluster_tol) {
    ev.classification = "singleton_evidence";
  } else {
    ev.classification = "multiple_limits";
  }
  return ev;
}

ContractionAnalysis check_reflected_conditions(const MonotoneOperator& a, double beta,
                                               const SampleConfig& cfg) {
  if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgument("beta must lie in [0, 1]");
  if (cfg.dim() != a.dim()) throw DimensionError("sample dimension does not match operator");
  const Map& t = a.resolvent();
  const Params p{{"beta", beta}};
  const auto pairs = sample_pairs(cfg);

  struct Track {
    Inequality id;
    double excess = -1.0;
    std::vector<Vector> points;
  };
  Track ti{Inequality::reflected_graph, -1.0, {}};
  Track tii{Inequality::reflected_firm, -1.0, {}};
  Track tiii{Inequality::reflected_lipschitz, -1.0, {}};
  auto offer = [](Track& tr, const InequalityValue& v, std::vector<Vector> pts) {
    if (!v.violated()) return;
    const double e = v.lhs - v.rhs - v.margin;
    if (!tr.points.empty() && e <= tr.excess) return;
    tr.excess = e;
    tr.points = std::move(pts);
  };
  for (const auto& [px, py] : pairs) {
    const Vector x = t(px);
    const Vector y = t(py);
    std::vector<Vector> graph{x, Vector(px - x), y, Vector(py - y)};
    offer(ti, evaluate_inequality(ti.id, graph, nullptr, p), graph);
    std::vector<Vector> pre{px, py};
    offer(tii, evaluate_inequality(tii.id, pre, &t, p), pre);
    offer(tiii, evaluate_inequality(tiii.id, pre, &t, p), pre);
  }
  auto finish = [&](const Track& tr, const Map* m) -> SubCheck {
    if (tr.points.empty()) return {Verdict::holds_on_samples, std::nullopt};
    return {Verdict::violated, make_witness(tr.id, tr.points, m, p)};
  };

  ContractionAnalysis out;
  out.beta_estimate = beta;
  out.condition_i = finish(ti, nullptr);
  out.condition_ii = finish(tii, &t);
  out.condition_iii = finish(tiii, &t);
  out.agree = out.condition_i.verdict == out.condition_ii.verdict &&
              out.condition_ii.verdict == out.condition_iii.verdict;
  out.sample_count = pairs.size();
  out.seed = cfg.seed();
  out.target = a.label();
  return out;
}

ContractionAnalysis analyze_reflected_contraction(const MonotoneOperator& a, const SampleConfig& cfg) {
  const Map n = reflect(a.resolvent());
  double beta = 0.0;
  bool exact = false;
  if (const auto& f = n.affine_form()) {
    beta = spectral_norm(f->linear);
    exact = true;
  } else {
    for (const auto& [x, y] : sample_pairs(cfg)) {
      const double d = (x - y).norm();
      if (d <= tol::degenerate) continue;
      beta = std::max(beta, (n(x) - n(y)).norm() / d);
    }
  }
  beta = std::clamp(beta, 0.0, 1.0);
  auto out = check_reflected_conditions(a, beta, cfg);
  out.exact = exact;
  return out;
}

PropertyReport check_strong_mono_via_reflected(const MonotoneOperator& a, double epsilon,
                                               const SampleConfig& cfg) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (cfg.dim() != a.dim()) throw DimensionError("sample dimension does not match operator");
  const Map& t = a.resolvent();
  const Params p{{"epsilon", epsilon}};
  const auto pairs = sample_pairs(cfg);
  PropertyReport r;
  r.property_id = "check_strong_mono_via_reflected";
  r.seed = cfg.seed();
  r.target = a.label();
  r.sample_count = pairs.size();
  r.constants["epsilon"] = epsilon;
  r.verdict = Verdict::holds_on_samples;
  double worst = 0.0;
  for (const auto& [x, y] : pairs) {
    const std::array<Vector, 2> pts{x, y};
    const auto v = evaluate_inequality(Inequality::strong_mono_reflected, pts, &t, p);
    if (!v.violated()) continue;
    const double e = v.lhs - v.rhs - v.margin;
    if (r.witness && e <= worst) continue;
    worst = e;
    r.verdict = Verdict::violated;
    r.witness = make_witness(Inequality::strong_mono_reflected, {x, y}, &t, p);
  }

  // Independent route: A - eps Id monotone on a graph sample.
  const auto g = sample_graph(a, cfg.with_count(std::min(cfg.count(), 200)));
  const auto direct = estimate_strong_monotonicity(g, epsilon);
  r.flags["graph_cross_check"] = {direct.verdict, direct.witness};
  if (const auto it = direct.constants.find("strong_mono"); it != direct.constants.end())
    r.constants["strong_mono_graph"] = it->second;
  if (direct.verdict != r.verdict) r.notes.push_back("graph estimate disagrees with reflected check");
  return r;
}

}  // namespace minty
