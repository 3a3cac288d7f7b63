// Runs every acceptance criterion at its stated tolerance and runtime budget,
// printing one PASS/FAIL line each. Exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "minty/checkers.hpp"
#include "minty/duality.hpp"
#include "minty/experiment.hpp"
#include "minty/splitting.hpp"
#include "support.hpp"

using namespace minty;
using namespace minty::testing;

namespace {

struct Criterion {
  const char* name;
  double budget_s;
  std::function<std::string()> run;  // empty string on success, else the reason
};

#define EXPECT(cond)                         \
  do {                                       \
    if (!(cond)) return std::string(#cond);  \
  } while (0)

std::string skew_lipschitz() {
  const auto a = make_operator(spec::skew());
  const double target = 1.0 / std::sqrt(2.0);
  const auto r = estimate_lipschitz(a.resolvent(), SampleConfig(1, 10000, 2));
  EXPECT(std::abs(r.constants.at("lipschitz_exact") - target) <= 1e-12);
  EXPECT(std::abs(r.constants.at("lipschitz_sampled") - target) <= 1e-3);
  const auto g = sample_graph(a, SampleConfig(2, 1000, 2));
  EXPECT(check_banach_graph_inequality(g, target).verdict == Verdict::holds_on_samples);
  const auto bad = check_banach_graph_inequality(g, 0.5);
  EXPECT(bad.verdict == Verdict::violated);
  EXPECT(bad.witness && replays(*bad.witness, nullptr));
  return {};
}

std::string diagonal_family() {
  double last = 0.0;
  for (int d : {3, 10, 100}) {
    const auto r = estimate_lipschitz(make_operator(spec::diag_harmonic(d)).resolvent(), SampleConfig(3, 100, d));
    const double exact = r.constants.at("lipschitz_exact");
    EXPECT(std::abs(exact - d / (d + 1.0)) <= 1e-12);
    EXPECT(exact > last);
    EXPECT(exact < 1.0);
    last = exact;
  }
  return {};
}

std::string resolvent_identity() {
  const auto insts = catalog_instances();
  EXPECT(insts.size() >= 8);
  for (const auto& inst : insts) {
    const auto a = make_operator(inst.spec);
    const Map j = a.resolvent();
    const Map jinv = inverse(a).resolvent();
    for (const auto& x : sample_points(SampleConfig(4, 1000, a.dim(), 3.0)))
      if (!((j(x) + jinv(x) - x).norm() <= 1e-10)) return inst.name + ": identity residual too large";
  }
  return {};
}

std::string five_characterizations() {
  const SampleConfig cfg(5, 1000, 2);
  std::vector<std::pair<std::string, Map>> maps;
  for (const auto& inst : catalog_instances()) maps.emplace_back(inst.name, make_operator(inst.spec).resolvent());
  maps.emplace_back("minus_identity", Map::scaled_identity(2, -1.0));
  for (const auto& [name, m] : maps) {
    const auto r = check_firm(m, cfg);
    const Verdict want = name == "minus_identity" ? Verdict::violated : Verdict::holds_on_samples;
    if (r.verdict != want) return name + ": unexpected verdict " + to_string(r.verdict);
    for (const auto& [k, f] : r.flags)
      if (f.verdict != want) return name + ": " + k + " disagrees";
    const auto again = check_firm(m, cfg);
    for (const auto& [k, f] : r.flags)
      if (again.flags.at(k).verdict != f.verdict || again.flags.at(k).witness.has_value() != f.witness.has_value())
        return name + ": not deterministic";
  }
  return {};
}

std::string strong_monotonicity() {
  const Matrix skew = mat2(0.0, -1.0, 1.0, 0.0);
  for (double eps : {0.5, 1.0, 2.0}) {
    const auto a = make_operator(spec::linear(eps * Matrix::Identity(2, 2) + skew));
    const auto r = estimate_lipschitz(a.resolvent(), SampleConfig(6, 1000, 2));
    EXPECT(r.constants.at("lipschitz") <= 1.0 / (1.0 + eps) + 1e-9);
    EXPECT(r.constants.at("lipschitz_sampled") <= 1.0 / (1.0 + eps) + 1e-9);
  }
  const auto s = make_operator(spec::skew());
  const double beta = estimate_lipschitz(s.resolvent(), SampleConfig(6, 1000, 2)).constants.at("lipschitz");
  EXPECT(std::abs(beta - 1.0 / std::sqrt(2.0)) <= 1e-12);
  const auto sm = estimate_strong_monotonicity(sample_graph(s, SampleConfig(7, 1000, 2)), 1e-3);
  EXPECT(std::abs(sm.constants.at("strong_mono")) <= 1e-12);
  EXPECT(sm.verdict == Verdict::violated);
  return {};
}

std::string paramonotonicity() {
  const SampleConfig cfg(8, 1000, 2);
  const auto s = make_operator(spec::skew());
  const auto rs = check_paramonotone(s, sample_graph(s, cfg));
  EXPECT(rs.verdict == Verdict::violated);
  EXPECT(rs.witness && replays(*rs.witness, &s.resolvent()));
  const Matrix line = (Matrix(2, 1) << 0.6, 0.8).finished();
  const std::vector<ConvexFunctionSpec> fs{fn::Quadratic{2.0}, fn::L1{0.5}, fn::IndicatorBall{1.0},
                                           fn::IndicatorBox{vec2(-1.0, 0.0), vec2(1.0, 2.0)},
                                           fn::IndicatorSingleton{vec2(1.0, 1.0)},
                                           fn::IndicatorAffine{vec2(0.0, 1.0), line}};
  for (const auto& f : fs) {
    const auto a = make_operator(spec::subdifferential(f, 2));
    const auto r = check_paramonotone(a, sample_graph(a, cfg));
    if (r.verdict != Verdict::holds_on_samples) return describe(f) + ": " + to_string(r.verdict);
  }
  return {};
}

std::string cyclic_firm() {
  const SampleConfig cfg(9, 1000, 2);
  const Matrix line = (Matrix(2, 1) << 0.6, 0.8).finished();
  const std::vector<ConvexFunctionSpec> fs{fn::Quadratic{2.0}, fn::L1{1.0}, fn::IndicatorBall{1.0},
                                           fn::IndicatorBox{vec2(-1.0, 0.0), vec2(1.0, 2.0)},
                                           fn::IndicatorSingleton{vec2(1.0, 1.0)},
                                           fn::IndicatorAffine{vec2(0.0, 1.0), line}};
  for (const auto& f : fs) {
    const auto r = check_cyclic_firm(make_operator(spec::subdifferential(f, 2)).resolvent(), 5, 1000, cfg);
    if (r.verdict != Verdict::holds_on_samples) return describe(f) + ": " + to_string(r.verdict);
  }
  const Map j = make_operator(spec::skew()).resolvent();
  const auto r = check_cyclic_firm(j, 3, 1000, cfg);
  EXPECT(r.verdict == Verdict::violated);
  EXPECT(r.witness && replays(*r.witness, &j));
  return {};
}

std::string duality_suite() {
  const SampleConfig cfg(10, 300, 2);
  for (const auto& inst : catalog_instances()) {
    const auto r = run_duality_suite(make_operator(inst.spec), cfg);
    for (const auto& row : r.rows)
      if (!row.consistent) return inst.name + ": row " + row.property_id + " inconsistent";
  }
  const auto z = run_duality_suite(make_operator(spec::linear(Matrix::Zero(2, 2))), cfg);
  for (const auto& row : z.rows) {
    if (row.property_id == "strict_firm") {
      EXPECT(row.relation == Relation::self_dual);
      EXPECT(row.verdict_primal == Verdict::violated && row.verdict_dual == Verdict::violated);
    }
    // Primal T = Id is injective but not strictly nonexpansive; its dual Id - T = 0 is the reverse.
    if (row.property_id == "strict_nonexpansive") {
      EXPECT(row.partner_id == "injective");
      EXPECT(row.verdict_primal == Verdict::violated && row.verdict_dual == Verdict::violated);
    }
    if (row.property_id == "injective") {
      EXPECT(row.partner_id == "strict_nonexpansive");
      EXPECT(row.verdict_primal == Verdict::holds_on_samples && row.verdict_dual == Verdict::holds_on_samples);
    }
  }
  return {};
}

std::string reflected_resolvent() {
  const SampleConfig cfg(11, 1000, 2);
  for (const auto& inst : catalog_instances()) {
    const auto c = analyze_reflected_contraction(make_operator(inst.spec), cfg);
    if (!c.agree) return inst.name + ": conditions disagree";
  }
  const auto two = analyze_reflected_contraction(make_operator(spec::linear(2.0 * Matrix::Identity(2, 2))), cfg);
  EXPECT(two.exact && std::abs(two.beta_estimate - 1.0 / 3.0) <= 1e-15);
  const auto id = analyze_reflected_contraction(make_operator(spec::linear(Matrix::Identity(2, 2))), cfg);
  EXPECT(id.exact && id.beta_estimate == 0.0);
  return {};
}

std::string douglas_rachford() {
  const Map t = douglas_rachford_operator(make_operator(spec::linear(Matrix::Identity(2, 2))),
                                          make_operator(spec::linear(Matrix::Zero(2, 2))));
  EXPECT((t.affine_form()->linear - 0.5 * Matrix::Identity(2, 2)).norm() == 0.0);
  EXPECT(t.affine_form()->offset.norm() == 0.0);
  const auto ev = multi_start_fixed_points(t, SampleConfig(12, 10, 2, 10.0), 60, 1e-9);
  EXPECT(ev.converged_starts == 10);
  EXPECT(ev.diameter <= 1e-6);
  EXPECT(ev.classification == "singleton_evidence");
  for (const auto& tr : ev.traces) EXPECT(tr.iterations_used <= 60);
  const auto rot = picard_iterate(Map::linear(mat2(0.0, 1.0, -1.0, 0.0)), vec2(1.0, 0.0), 1000, 1e-9);
  EXPECT(!rot.converged && !rot.diverged && rot.iterations_used == 1000);
  return {};
}

std::string moreau() {
  const auto a = make_operator(spec::subdifferential(fn::L1{1.0}, 2));
  const Map p = a.resolvent();
  const Map pstar = inverse(a).resolvent();
  for (const auto& x : sample_points(SampleConfig(13, 1000, 2, 3.0))) {
    if (!((p(x) + pstar(x) - x).norm() <= 1e-10)) return "sum differs from identity";
    // Conjugate of |.|_1 is the indicator of the unit box.
    if (!((pstar(x) - x.cwiseMax(-1.0).cwiseMin(1.0)).norm() <= 1e-12)) return "conjugate prox is not the box projection";
  }
  return {};
}

std::string determinism() {
  std::ifstream in(MINTY_REGRESSION_SPEC);
  if (!in) return "cannot read " MINTY_REGRESSION_SPEC;
  std::stringstream s;
  s << in.rdbuf();
  const auto e = load_experiment(s.str(), "regression.json");
  auto a = run_experiment(e).document;
  auto b = run_experiment(e).document;
  a.erase("timing");
  b.erase("timing");
  EXPECT(a.dump(2) == b.dump(2));
  EXPECT(a["summary"]["ok"] == true);
  return {};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"skew resolvent Lipschitz 1/sqrt2 and Banach graph inequality", 1.0, skew_lipschitz},
      {"diagonal family contraction factors d/(d+1)", 1.0, diagonal_family},
      {"resolvent identity across the catalog", 5.0, resolvent_identity},
      {"five firm characterizations agree", 10.0, five_characterizations},
      {"strong monotonicity gives contraction 1/(1+eps); skew converse fails", 2.0, strong_monotonicity},
      {"paramonotonicity: skew violated, subdifferentials hold", 5.0, paramonotonicity},
      {"cyclic firmness: prox maps hold, skew resolvent violated", 10.0, cyclic_firm},
      {"duality suite consistent; T=0 / T=Id pairing", 30.0, duality_suite},
      {"reflected-resolvent conditions agree; beta 1/3 and 0", 5.0, reflected_resolvent},
      {"Douglas-Rachford singleton evidence; rotation hits the cap", 2.0, douglas_rachford},
      {"Moreau decomposition for the l1 prox", 1.0, moreau},
      {"regression spec reports are byte-identical", 60.0, determinism},
  };
  int failures = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    std::string reason;
    try {
      reason = c.run();
    } catch (const std::exception& e) {
      reason = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (reason.empty() && secs > c.budget_s) reason = "over runtime budget";
    if (!reason.empty()) ++failures;
    std::printf("%s %2d %s (%.3f s / %.0f s)%s%s\n", reason.empty() ? "PASS" : "FAIL", index, c.name, secs,
                c.budget_s, reason.empty() ? "" : ": ", reason.c_str());
  }
  return failures;
}
