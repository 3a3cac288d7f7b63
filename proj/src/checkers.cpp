#include "minty/checkers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

namespace minty {

namespace {

constexpr double kDegenerateSq = tol::degenerate * tol::degenerate;

/// Keeps the most violated instance of one inequality.
struct Worst {
  Inequality id;
  Params params;
  double excess = -std::numeric_limits<double>::infinity();
  std::vector<Vector> points;
  std::size_t evaluated = 0;

  explicit Worst(Inequality i, Params p = {}) : id(i), params(std::move(p)) {}

  void offer(const InequalityValue& v, std::initializer_list<const Vector*> pts) {
    ++evaluated;
    if (!v.violated()) return;
    const double e = v.lhs - v.rhs - v.margin;
    if (e <= excess) return;
    excess = e;
    points.clear();
    for (const Vector* p : pts) points.push_back(*p);
  }

  void offer(const InequalityValue& v, const std::vector<Vector>& pts) {
    ++evaluated;
    if (!v.violated()) return;
    const double e = v.lhs - v.rhs - v.margin;
    if (e <= excess) return;
    excess = e;
    points = pts;
  }

  bool any() const noexcept { return !points.empty(); }

  SubCheck finish(const Map* t) const {
    if (!any()) return {Verdict::holds_on_samples, std::nullopt};
    return {Verdict::violated, make_witness(id, points, t, params)};
  }
};

InequalityValue eval2(Inequality id, const Vector& x, const Vector& y, const Map& t,
                      const Params& p = {}) {
  const std::array<Vector, 2> pts{x, y};
  return evaluate_inequality(id, pts, &t, p);
}

InequalityValue eval4(Inequality id, const GraphPair& a, const GraphPair& b, const Params& p,
                      const Map* t = nullptr) {
  const std::array<Vector, 4> pts{a.x, a.u, b.x, b.u};
  return evaluate_inequality(id, pts, t, p);
}

PropertyReport base_report(std::string id, std::size_t n, const SampleConfig* cfg,
                           std::string target) {
  PropertyReport r;
  r.property_id = std::move(id);
  r.sample_count = n;
  if (cfg) r.seed = cfg->seed();
  r.target = std::move(target);
  return r;
}

void require_nonempty(const GraphSample& g, const char* what) {
  if (g.empty()) throw InvalidArgument(std::string(what) + ": empty graph sample");
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

std::vector<std::pair<Vector, Vector>> sample_pairs(const SampleConfig& cfg) {
  auto xs = sample_points(cfg, 0);
  auto ys = sample_points(cfg, 1);
  std::vector<std::pair<Vector, Vector>> out;
  out.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out.emplace_back(std::move(xs[i]), std::move(ys[i]));
  return out;
}

GraphSample sample_graph(const MonotoneOperator& a, const SampleConfig& cfg) {
  if (cfg.dim() != a.dim()) throw DimensionError("sample dimension does not match operator");
  return minty_sample(a, sample_points(cfg, 0));
}

PropertyReport check_firm(const Map& t, const SampleConfig& cfg) {
  static constexpr std::array<std::pair<const char*, Inequality>, 5> kForms{{
      {"i_sum_of_squares", Inequality::firm_sum_of_squares},
      {"ii_complement", Inequality::firm_complement},
      {"iii_reflection", Inequality::firm_reflection},
      {"iv_inner_product", Inequality::firm_inner_product},
      {"v_cross_term", Inequality::firm_cross_term},
  }};
  const auto pairs = sample_pairs(cfg);
  std::vector<Worst> worst;
  for (const auto& f : kForms) worst.emplace_back(f.second);
  for (const auto& [x, y] : pairs) {
    for (auto& w : worst) w.offer(eval2(w.id, x, y, t), {&x, &y});
  }

  auto r = base_report("check_firm", pairs.size(), &cfg, t.describe());
  std::size_t failing = 0;
  for (std::size_t k = 0; k < kForms.size(); ++k) {
    r.flags[kForms[k].first] = worst[k].finish(&t);
    if (worst[k].any()) ++failing;
  }
  if (failing == 0) {
    r.verdict = Verdict::holds_on_samples;
  } else if (failing == kForms.size()) {
    r.verdict = Verdict::violated;
    r.witness = r.flags.at("i_sum_of_squares").witness;
  } else {
    r.verdict = Verdict::inconclusive;
    r.notes.push_back("characterizations disagree: " + std::to_string(failing) + " of 5 violated");
  }
  return r;
}

PropertyReport estimate_lipschitz(const Map& t, const SampleConfig& cfg, double threshold) {
  if (!(threshold >= 0.0)) throw InvalidArgument("lipschitz threshold must be nonnegative");
  const auto pairs = sample_pairs(cfg);
  double sampled = 0.0;
  const std::pair<Vector, Vector>* arg = nullptr;
  for (const auto& pr : pairs) {
    const Vector d = pr.first - pr.second;
    const double dn = d.norm();
    if (dn <= tol::degenerate) continue;
    const double ratio = (t(pr.first) - t(pr.second)).norm() / dn;
    if (ratio > sampled || !arg) {
      sampled = ratio;
      arg = &pr;
    }
  }

  auto r = base_report("estimate_lipschitz", pairs.size(), &cfg, t.describe());
  r.constants["lipschitz_sampled"] = sampled;
  r.constants["threshold"] = threshold;

  // Candidate pair for both the bound and the contraction flag: the top
  // singular direction when the map is affine, else the worst sampled pair.
  Vector cx;
  Vector cy;
  double lipschitz = sampled;
  if (const auto& af = t.affine_form()) {
    Eigen::JacobiSVD<Matrix> svd(af->linear, Eigen::ComputeFullV);
    lipschitz = svd.singularValues().size() > 0 ? svd.singularValues()[0] : 0.0;
    r.constants["lipschitz_exact"] = lipschitz;
    cx = svd.matrixV().col(0) * cfg.scale();
    cy = Vector::Zero(t.dim());
  } else if (arg) {
    cx = arg->first;
    cy = arg->second;
  }
  r.constants["lipschitz"] = lipschitz;

  if (cx.size() == 0) {
    r.verdict = Verdict::inconclusive;
    r.notes.push_back("no nondegenerate pairs");
    return r;
  }
  const Params bound{{"L", threshold}};
  if (eval2(Inequality::lipschitz_bound, cx, cy, t, bound).violated()) {
    r.verdict = Verdict::violated;
    r.witness = make_witness(Inequality::lipschitz_bound, {cx, cy}, &t, bound);
  } else {
    r.verdict = Verdict::holds_on_samples;
  }

  SubCheck contraction;
  if (eval2(Inequality::strict_nonexpansive, cx, cy, t).violated()) {
    contraction = {Verdict::violated, make_witness(Inequality::strict_nonexpansive, {cx, cy}, &t)};
  } else if (lipschitz < 1.0 - tol::verdict) {
    contraction.verdict = Verdict::holds_on_samples;
  }
  r.flags["banach_contraction"] = contraction;
  return r;
}

PropertyReport check_banach_graph_inequality(const GraphSample& g, double beta) {
  require_nonempty(g, "check_banach_graph_inequality");
  if (!(beta > 0.0 && beta < 1.0)) throw InvalidArgument("beta must lie in (0, 1)");
  Worst w(Inequality::banach_graph, {{"beta", beta}});
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const auto& a = g.pairs[i];
      const auto& b = g.pairs[j];
      w.offer(eval4(w.id, a, b, w.params), {&a.x, &a.u, &b.x, &b.u});
    }
  auto r = base_report("check_banach_graph_inequality", g.size(), nullptr, {});
  r.constants["beta"] = beta;
  auto sub = w.finish(nullptr);
  r.verdict = sub.verdict;
  r.witness = sub.witness;
  return r;
}

PropertyReport estimate_strong_monotonicity(const GraphSample& g, std::optional<double> epsilon) {
  require_nonempty(g, "estimate_strong_monotonicity");
  const double eps = epsilon.value_or(0.0);
  Worst w(Inequality::strong_monotone, {{"epsilon", eps}});
  double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const auto& a = g.pairs[i];
      const auto& b = g.pairs[j];
      const Vector dx = a.x - b.x;
      const Vector du = a.u - b.u;
      const double xx = dx.squaredNorm();
      if (xx <= kDegenerateSq) continue;
      inf = std::min(inf, dx.dot(du) / xx);
      w.offer(eval4(w.id, a, b, w.params), {&a.x, &a.u, &b.x, &b.u});
    }
  auto r = base_report("estimate_strong_monotonicity", g.size(), nullptr, {});
  r.constants["epsilon"] = eps;
  if (std::isinf(inf)) {
    r.verdict = Verdict::holds_on_samples;
    r.notes.push_back("no distinct pairs; holds vacuously");
    return r;
  }
  r.constants["strong_mono"] = inf;
  auto sub = w.finish(nullptr);
  r.verdict = sub.verdict;
  r.witness = sub.witness;
  return r;
}

PropertyReport estimate_cocoercivity(const GraphSample& g, std::optional<double> gamma) {
  require_nonempty(g, "estimate_cocoercivity");
  const double gam = gamma.value_or(0.0);
  Worst w(Inequality::cocoercive, {{"gamma", gam}});
  double inf = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const auto& a = g.pairs[i];
      const auto& b = g.pairs[j];
      const Vector dx = a.x - b.x;
      const Vector du = a.u - b.u;
      const double uu = du.squaredNorm();
      if (uu <= kDegenerateSq) continue;
      inf = std::min(inf, du.dot(dx) / uu);
      w.offer(eval4(w.id, a, b, w.params), {&a.x, &a.u, &b.x, &b.u});
    }
  auto r = base_report("estimate_cocoercivity", g.size(), nullptr, {});
  r.constants["gamma"] = gam;
  if (std::isinf(inf)) {
    r.verdict = Verdict::holds_on_samples;
    r.notes.push_back("no pairs with distinct images; holds vacuously");
    return r;
  }
  r.constants["cocoercivity"] = inf;
  auto sub = w.finish(nullptr);
  r.verdict = sub.verdict;
  r.witness = sub.witness;
  return r;
}

PropertyReport check_strict(const Map& t, const SampleConfig& cfg) {
  static constexpr std::array<std::pair<const char*, Inequality>, 3> kFlags{{
      {"strict_nonexpansive", Inequality::strict_nonexpansive},
      {"injective", Inequality::injective},
      {"strict_firm", Inequality::strict_firm},
  }};
  const auto pairs = sample_pairs(cfg);
  std::vector<Worst> worst;
  for (const auto& f : kFlags) worst.emplace_back(f.second);
  std::size_t used = 0;
  for (const auto& [x, y] : pairs) {
    if ((x - y).squaredNorm() <= kDegenerateSq) continue;
    ++used;
    for (auto& w : worst) w.offer(eval2(w.id, x, y, t), {&x, &y});
  }
  auto r = base_report("check_strict", used, &cfg, t.describe());
  r.verdict = Verdict::holds_on_samples;
  for (std::size_t k = 0; k < kFlags.size(); ++k) {
    auto sub = worst[k].finish(&t);
    if (sub.verdict == Verdict::violated && r.verdict != Verdict::violated) {
      r.verdict = Verdict::violated;
      r.witness = sub.witness;
    }
    r.flags[kFlags[k].first] = std::move(sub);
  }
  if (used == 0) {
    r.verdict = Verdict::inconclusive;
    r.notes.push_back("no distinct pairs");
  }
  return r;
}

PropertyReport check_paramonotone(const MonotoneOperator& a, const GraphSample& g) {
  require_nonempty(g, "check_paramonotone");
  const Map& t = a.resolvent();
  Worst w(Inequality::paramonotone_cross);
  std::size_t qualifying = 0;
  double max_residual = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const auto& p = g.pairs[i];
      const auto& q = g.pairs[j];
      const Vector dx = p.x - q.x;
      const Vector du = p.u - q.u;
      if (std::abs(dx.dot(du)) > tol::verdict * (1.0 + dx.norm() * du.norm())) continue;
      ++qualifying;
      const auto v = eval4(w.id, p, q, {}, &t);
      max_residual = std::max(max_residual, v.lhs);
      w.offer(v, {&p.x, &p.u, &q.x, &q.u});
    }
  auto r = base_report("check_paramonotone", g.size(), nullptr, a.label());
  r.constants["qualifying_pairs"] = static_cast<double>(qualifying);
  r.constants["max_cross_residual"] = max_residual;
  auto sub = w.finish(&t);
  r.verdict = sub.verdict;
  r.witness = sub.witness;
  if (qualifying == 0) r.notes.push_back("no pair with <x-y,u-v> = 0; holds vacuously");
  return r;
}

PropertyReport check_cyclic_firm(const Map& t, int n_max, int tuples_per_n, const SampleConfig& cfg) {
  if (n_max < 2) throw InvalidArgument("n_max must be at least 2");
  if (tuples_per_n < 1) throw InvalidArgument("tuples_per_n must be positive");
  Worst w(Inequality::cyclic_firm);
  auto r = base_report("check_cyclic_firm", 0, &cfg, t.describe());
  double min_sum = std::numeric_limits<double>::infinity();
  std::vector<Vector> tuple;
  for (int n = 2; n <= n_max; ++n) {
    const auto pts = sample_points(cfg.with_count(tuples_per_n * n), 100 + static_cast<std::uint64_t>(n));
    Worst wn(Inequality::cyclic_firm);
    for (int k = 0; k < tuples_per_n; ++k) {
      tuple.assign(pts.begin() + k * n, pts.begin() + (k + 1) * n);
      const auto v = evaluate_inequality(w.id, tuple, &t);
      min_sum = std::min(min_sum, v.rhs);
      wn.offer(v, tuple);
      w.offer(v, tuple);
    }
    r.flags["length_" + std::to_string(n)] = wn.finish(&t);
    r.sample_count += static_cast<std::size_t>(tuples_per_n);
  }
  r.constants["min_cyclic_sum"] = min_sum;
  auto sub = w.finish(&t);
  r.verdict = sub.verdict;
  r.witness = sub.witness;
  return r;
}

PropertyReport check_rectangular(const GraphSample& g, const std::vector<Vector>& probes_x,
                                 const std::vector<Vector>& probes_v) {
  require_nonempty(g, "check_rectangular");
  auto r = base_report("check_rectangular", g.size(), nullptr, {});
  double overall = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < probes_x.size(); ++i)
    for (std::size_t j = 0; j < probes_v.size(); ++j) {
      double inf = std::numeric_limits<double>::infinity();
      for (const auto& p : g.pairs) inf = std::min(inf, (probes_x[i] - p.x).dot(probes_v[j] - p.u));
      r.constants["inf_x" + std::to_string(i) + "_v" + std::to_string(j)] = inf;
      overall = std::min(overall, inf);
    }
  if (!std::isinf(overall)) r.constants["inf_min"] = overall;
  r.verdict = Verdict::inconclusive;
  r.notes.push_back("finite sample; see rectangular_scale_sweep for the trend");
  return r;
}

PropertyReport rectangular_scale_sweep(const MonotoneOperator& a, const std::vector<double>& scales,
                                       const SampleConfig& cfg, int probe_count) {
  if (scales.size() < 2) throw InvalidArgument("scale sweep needs at least two scales");
  if (probe_count < 1) throw InvalidArgument("probe_count must be positive");
  const auto probe_graph = sample_graph(a, cfg.with_count(probe_count).with_scale(1.0));
  std::vector<Vector> px;
  std::vector<Vector> pv;
  for (const auto& p : probe_graph.pairs) {
    px.push_back(p.x);
    pv.push_back(p.u);
  }

  auto r = base_report("rectangular_sweep", 0, &cfg, a.label());
  std::vector<double> infs;
  for (double s : scales) {
    const auto g = sample_graph(a, cfg.with_scale(s));
    const auto sub = check_rectangular(g, px, pv);
    const double inf = sub.constants.at("inf_min");
    infs.push_back(inf);
    r.constants["inf_at_scale_" + format_number(s)] = inf;
    r.sample_count += g.size();
  }
  bool decreasing = true;
  for (std::size_t k = 1; k < infs.size(); ++k) decreasing = decreasing && infs[k] < infs[k - 1];
  const bool unbounded = decreasing && infs.back() <= -0.1 * scales.back();
  r.labels["trend"] = unbounded ? "unbounded_below" : "bounded";
  r.verdict = Verdict::inconclusive;
  r.notes.push_back("trend is evidence only; a finite sample cannot bound a global infimum");
  return r;
}

PropertyReport classify_structure(const Map& t, const SampleConfig& cfg) {
  const auto pairs = sample_pairs(cfg);
  auto coeff_rng = make_stream(cfg.seed(), 2);
  auto lambda_rng = make_stream(cfg.seed(), 3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> lam(-2.0, 3.0);

  Worst lin(Inequality::linearity);
  Worst aff(Inequality::affinity);
  Worst iso(Inequality::isometry);
  Worst idem(Inequality::idempotent);
  for (const auto& [x, y] : pairs) {
    const Params lp{{"alpha", gauss(coeff_rng)}, {"beta", gauss(coeff_rng)}};
    const Params ap{{"lambda", lam(lambda_rng)}};
    const auto lv = eval2(lin.id, x, y, t, lp);
    if (lv.violated() && lv.lhs - lv.rhs - lv.margin > lin.excess) lin.params = lp;
    lin.offer(lv, {&x, &y});
    const auto av = eval2(aff.id, x, y, t, ap);
    if (av.violated() && av.lhs - av.rhs - av.margin > aff.excess) aff.params = ap;
    aff.offer(av, {&x, &y});
    if ((x - y).squaredNorm() > kDegenerateSq) iso.offer(eval2(iso.id, x, y, t), {&x, &y});
    const std::array<Vector, 1> one{x};
    idem.offer(evaluate_inequality(idem.id, one, &t), {&x});
  }

  auto r = base_report("classify_structure", pairs.size(), &cfg, t.describe());
  r.flags["linear"] = lin.finish(&t);
  r.flags["affine"] = aff.finish(&t);
  r.flags["isometry"] = iso.finish(&t);
  SubCheck projection = idem.finish(&t);
  if (projection.verdict == Verdict::holds_on_samples) {
    const auto firm = check_firm(t, cfg);
    if (firm.verdict != Verdict::holds_on_samples) {
      projection.verdict = firm.verdict;
      projection.witness = firm.witness;
    }
  }
  r.flags["projection"] = projection;
  r.verdict = Verdict::inconclusive;
  r.notes.push_back("structure classification; see flags");
  return r;
}

ModulusEstimate estimate_uniform_modulus(const GraphSample& g, int bins) {
  if (bins < 1) throw InvalidArgument("bins must be positive");
  struct Entry {
    double t;
    double value;
  };
  std::vector<Entry> entries;
  double t_max = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = i + 1; j < g.size(); ++j) {
      const Vector dx = g.pairs[i].x - g.pairs[j].x;
      const double t = dx.norm();
      if (t <= tol::degenerate) continue;
      entries.push_back({t, dx.dot(g.pairs[i].u - g.pairs[j].u)});
      t_max = std::max(t_max, t);
    }

  ModulusEstimate m;
  m.bin_edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int k = 0; k <= bins; ++k) m.bin_edges[k] = t_max * k / bins;
  m.bin_inf.assign(static_cast<std::size_t>(bins), std::nullopt);
  m.bin_counts.assign(static_cast<std::size_t>(bins), 0);
  for (const auto& e : entries) {
    auto k = static_cast<std::size_t>(std::floor(e.t / t_max * bins));
    k = std::min(k, static_cast<std::size_t>(bins - 1));
    ++m.bin_counts[k];
    m.bin_inf[k] = m.bin_inf[k] ? std::min(*m.bin_inf[k], e.value) : e.value;
  }
  std::optional<double> prev;
  for (const auto& v : m.bin_inf) {
    if (!v) continue;
    if (prev && *v < *prev - tol::verdict * (1.0 + std::abs(*prev))) m.nondecreasing = false;
    prev = v;
  }
  m.note =
      "per-bin pointwise infimum of <x-y,u-v>; a modulus must lie below its nondecreasing "
      "envelope, which this estimate does not construct";
  return m;
}

}  // namespace minty
