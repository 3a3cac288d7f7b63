#include "minty/duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace minty {

namespace {

Verdict flag(const PropertyReport& r, const std::string& name) {
  const auto it = r.flags.find(name);
  return it == r.flags.end() ? Verdict::inconclusive : it->second.verdict;
}

DualityRow verdict_row(std::string id, Relation rel, std::string partner, Verdict p, Verdict d,
                       const PropertyReport& rp, const PropertyReport& rd) {
  DualityRow row;
  row.property_id = std::move(id);
  row.relation = rel;
  row.partner_id = std::move(partner);
  row.verdict_primal = p;
  row.verdict_dual = d;
  row.consistent = p == d;
  if (!row.consistent) {
    row.report_primal = rp;
    row.report_dual = rd;
  }
  return row;
}

}  // namespace

std::string to_string(Relation r) { return r == Relation::self_dual ? "self_dual" : "dual_pair"; }

bool DualitySuiteResult::consistent() const {
  return std::all_of(rows.begin(), rows.end(), [](const DualityRow& r) { return r.consistent; });
}

DualitySuiteResult run_duality_suite(const MonotoneOperator& a, const SampleConfig& cfg,
                                     int cyclic_n_max) {
  if (cfg.dim() != a.dim()) throw DimensionError("sample dimension does not match operator");
  const Map& t = a.resolvent();
  const MonotoneOperator a_inv = inverse(a);
  const Map& s = a_inv.resolvent();

  DualitySuiteResult out;
  out.target = a.label();
  out.seed = cfg.seed();

  const auto strict_t = check_strict(t, cfg);
  const auto strict_s = check_strict(s, cfg);
  out.rows.push_back(verdict_row("strict_firm", Relation::self_dual, {},
                                 flag(strict_t, "strict_firm"), flag(strict_s, "strict_firm"),
                                 strict_t, strict_s));
  out.rows.push_back(verdict_row("strict_nonexpansive", Relation::dual_pair, "injective",
                                 flag(strict_t, "strict_nonexpansive"), flag(strict_s, "injective"),
                                 strict_t, strict_s));
  out.rows.push_back(verdict_row("injective", Relation::dual_pair, "strict_nonexpansive",
                                 flag(strict_t, "injective"), flag(strict_s, "strict_nonexpansive"),
                                 strict_t, strict_s));

  const auto g = sample_graph(a, cfg);
  const auto para_a = check_paramonotone(a, g);
  const auto para_inv = check_paramonotone(a_inv, swap(g));
  out.rows.push_back(verdict_row("paramonotone", Relation::self_dual, {}, para_a.verdict,
                                 para_inv.verdict, para_a, para_inv));

  const int tuples = std::max(1, cfg.count() / 4);
  const auto cyc_t = check_cyclic_firm(t, cyclic_n_max, tuples, cfg);
  const auto cyc_s = check_cyclic_firm(s, cyclic_n_max, tuples, cfg);
  out.rows.push_back(
      verdict_row("cyclic_firm", Relation::self_dual, {}, cyc_t.verdict, cyc_s.verdict, cyc_t, cyc_s));

  const std::vector<double> scales{1.0, 10.0, 100.0};
  const auto rect_a = rectangular_scale_sweep(a, scales, cfg);
  const auto rect_inv = rectangular_scale_sweep(a_inv, scales, cfg);
  {
    DualityRow row = verdict_row("rectangular", Relation::self_dual, {}, rect_a.verdict,
                                 rect_inv.verdict, rect_a, rect_inv);
    row.trend_primal = rect_a.labels.at("trend");
    row.trend_dual = rect_inv.labels.at("trend");
    row.consistent = *row.trend_primal == *row.trend_dual;
    if (row.consistent) {
      row.report_primal.reset();
      row.report_dual.reset();
    } else {
      row.report_primal = rect_a;
      row.report_dual = rect_inv;
    }
    out.rows.push_back(std::move(row));
  }

  const auto struct_t = classify_structure(t, cfg);
  const auto struct_s = classify_structure(s, cfg);
  for (const char* name : {"linear", "affine"}) {
    out.rows.push_back(verdict_row(name, Relation::self_dual, {}, flag(struct_t, name),
                                   flag(struct_s, name), struct_t, struct_s));
  }
  return out;
}

PropertyReport surjectivity_probe(const MonotoneOperator& a, const std::vector<Vector>& targets,
                                  const SampleConfig& cfg) {
  auto r = surjectivity_probe(a.resolvent(), targets, cfg);
  r.target = a.label();
  return r;
}

PropertyReport surjectivity_probe(const Map& t, const std::vector<Vector>& targets,
                                  const SampleConfig& cfg) {
  if (targets.empty()) throw InvalidArgument("surjectivity_probe needs at least one target");
  constexpr int kRefineSteps = 500;
  PropertyReport r;
  r.property_id = "surjectivity_probe";
  r.seed = cfg.seed();
  r.target = t.describe();
  r.verdict = Verdict::holds_on_samples;
  double worst = 0.0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const Vector& y = targets[k];
    if (y.size() != t.dim()) throw DimensionError("target dimension does not match map");
    const SampleConfig start_cfg =
        cfg.with_count(std::min(cfg.count(), 8)).with_scale(cfg.scale() * (1.0 + y.norm()));
    auto starts = sample_points(start_cfg, 10 + k);
    starts.insert(starts.begin(), y);
    double best = std::numeric_limits<double>::infinity();
    for (Vector x : starts) {
      // Fixed points of x -> x + y - T(x) solve T(x) = y; for firm T this map
      // is firmly nonexpansive up to a shift.
      double res = (t(x) - y).norm();
      for (int it = 0; it < kRefineSteps && res > 1e-15 * (1.0 + y.norm()); ++it) {
        x += y - t(x);
        res = (t(x) - y).norm();
      }
      best = std::min(best, res);
      r.sample_count += 1;
    }
    r.constants["residual_" + std::to_string(k)] = best;
    worst = std::max(worst, best);
    if (best > tol::verdict * (1.0 + y.norm())) r.verdict = Verdict::inconclusive;
  }
  r.constants["max_residual"] = worst;
  if (r.verdict == Verdict::inconclusive)
    r.notes.push_back("some target not reached; a finite search cannot show it lies outside the range");
  return r;
}

}  // namespace minty
