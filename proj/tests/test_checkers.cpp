#include <doctest.h>

#include <cmath>

#include "minty/checkers.hpp"
#include "support.hpp"

using namespace minty;
using namespace minty::testing;

namespace {

const SampleConfig kCfg(2024, 500, 2);

MonotoneOperator skew_op() { return make_operator(spec::skew()); }

Verdict flag(const PropertyReport& r, const char* name) { return r.flags.at(name).verdict; }

void expect_replayable(const PropertyReport& r, const Map* t) {
  REQUIRE(r.verdict == Verdict::violated);
  REQUIRE(r.witness);
  CHECK(replays(*r.witness, t));
  CHECK(r.witness->lhs - r.witness->rhs > r.witness->margin);
}

}  // namespace

TEST_CASE("check_firm on the basic examples") {
  CHECK(check_firm(Map::scaled_identity(2, 0.5), kCfg).verdict == Verdict::holds_on_samples);
  const Map neg = Map::scaled_identity(2, -1.0);
  const auto r = check_firm(neg, kCfg);
  expect_replayable(r, &neg);
  for (const auto& [k, v] : r.flags) CHECK(v.verdict == Verdict::violated);
  CHECK(check_firm(skew_op().resolvent(), kCfg).verdict == Verdict::holds_on_samples);
}

TEST_CASE("check_firm holds for every catalog resolvent") {
  for (const auto& inst : catalog_instances()) {
    CAPTURE(inst.name);
    const auto r = check_firm(make_operator(inst.spec).resolvent(), kCfg);
    CHECK(r.verdict == Verdict::holds_on_samples);
    CHECK(r.sample_count == 500);
  }
}

TEST_CASE("estimate_lipschitz examples") {
  const auto skew = estimate_lipschitz(skew_op().resolvent(), kCfg);
  CHECK(std::abs(skew.constants.at("lipschitz_exact") - 1.0 / std::sqrt(2.0)) <= 1e-12);
  CHECK(flag(skew, "banach_contraction") == Verdict::holds_on_samples);

  const auto h = make_operator(spec::diag_harmonic(3)).resolvent();
  const auto rh = estimate_lipschitz(h, SampleConfig(1, 200, 3));
  CHECK(std::abs(rh.constants.at("lipschitz") - 0.75) <= 1e-12);

  const Map id = Map::identity(2);
  const auto rid = estimate_lipschitz(id, kCfg);
  CHECK(rid.constants.at("lipschitz") == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rid.verdict == Verdict::holds_on_samples);
  REQUIRE(flag(rid, "banach_contraction") == Verdict::violated);
  CHECK(replays(*rid.flags.at("banach_contraction").witness, &id));

  const Map two = Map::scaled_identity(2, 2.0);
  expect_replayable(estimate_lipschitz(two, kCfg), &two);
}

TEST_CASE("property: sampled Lipschitz stays below the exact norm and grows with nested samples") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix m = random_monotone_matrix(rng, 3);
    const Map t = Map::linear(m);
    double prev = 0.0;
    for (int count : {10, 100, 1000}) {
      const auto r = estimate_lipschitz(t, SampleConfig(77, count, 3));
      const double s = r.constants.at("lipschitz_sampled");
      CHECK(s <= r.constants.at("lipschitz_exact") + 1e-8);
      CHECK(s >= prev);
      prev = s;
    }
  }
}

TEST_CASE("banach graph inequality on skew and on the zero operator") {
  const auto g = sample_graph(skew_op(), kCfg.with_count(150));
  CHECK(check_banach_graph_inequality(g, 1.0 / std::sqrt(2.0)).verdict == Verdict::holds_on_samples);
  const auto bad = check_banach_graph_inequality(g, 0.5);
  expect_replayable(bad, nullptr);

  const auto gz = sample_graph(make_operator(spec::linear(Matrix::Zero(2, 2))), kCfg.with_count(50));
  CHECK(check_banach_graph_inequality(gz, 0.9).verdict == Verdict::violated);
  CHECK_THROWS_AS(check_banach_graph_inequality(g, 1.0), InvalidArgument);
  CHECK_THROWS_AS(check_banach_graph_inequality(GraphSample{}, 0.5), InvalidArgument);
}

TEST_CASE("property: banach graph check at the exact constant passes, slightly below fails") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix m = random_monotone_matrix(rng, 2) + 0.2 * Matrix::Identity(2, 2);
    const auto a = make_operator(spec::linear(m));
    const double beta = spectral_norm(a.resolvent().affine_form()->linear);
    REQUIRE(beta < 1.0);
    // Include the top singular direction so the sample reaches the constant.
    Eigen::JacobiSVD<Matrix> svd(a.resolvent().affine_form()->linear, Eigen::ComputeFullV);
    auto g = sample_graph(a, SampleConfig(3, 60, 2));
    g.pairs.push_back({a.resolvent()(svd.matrixV().col(0)), svd.matrixV().col(0) - a.resolvent()(svd.matrixV().col(0))});
    g.pairs.push_back({Vector::Zero(2), Vector::Zero(2)});
    CHECK(check_banach_graph_inequality(g, beta).verdict == Verdict::holds_on_samples);
    CHECK(check_banach_graph_inequality(g, 0.9 * beta).verdict == Verdict::violated);
  }
}

TEST_CASE("strong monotonicity and cocoercivity estimates") {
  const auto two = make_operator(spec::linear(2.0 * Matrix::Identity(2, 2)));
  const auto g2 = sample_graph(two, kCfg.with_count(100));
  CHECK(estimate_strong_monotonicity(g2).constants.at("strong_mono") == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(estimate_cocoercivity(g2).constants.at("cocoercivity") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(estimate_strong_monotonicity(g2, 2.0).verdict == Verdict::holds_on_samples);
  expect_replayable(estimate_strong_monotonicity(g2, 2.5), nullptr);

  const auto gs = sample_graph(skew_op(), kCfg.with_count(100));
  CHECK(std::abs(estimate_strong_monotonicity(gs).constants.at("strong_mono")) <= 1e-12);
  CHECK(std::abs(estimate_cocoercivity(gs).constants.at("cocoercivity")) <= 1e-12);

  const auto gid = sample_graph(make_operator(spec::linear(Matrix::Identity(2, 2))), kCfg.with_count(100));
  CHECK(estimate_cocoercivity(gid).constants.at("cocoercivity") == doctest::Approx(1.0).epsilon(1e-12));

  const auto gc = sample_graph(make_operator(spec::constant(vec2(1.0, 2.0))), kCfg.with_count(100));
  CHECK(std::abs(estimate_strong_monotonicity(gc).constants.at("strong_mono")) <= 1e-12);
  const auto cc = estimate_cocoercivity(gc);
  CHECK(cc.verdict == Verdict::holds_on_samples);
  CHECK(cc.constants.count("cocoercivity") == 0);
}

TEST_CASE("property: cocoercivity equals strong monotonicity of the swapped sample") {
  for (const auto& inst : catalog_instances()) {
    CAPTURE(inst.name);
    const auto g = sample_graph(make_operator(inst.spec), kCfg.with_count(120));
    const auto co = estimate_cocoercivity(g);
    const auto sm = estimate_strong_monotonicity(swap(g));
    CHECK(co.constants.count("cocoercivity") == sm.constants.count("strong_mono"));
    if (co.constants.count("cocoercivity")) {
      CHECK(co.constants.at("cocoercivity") == sm.constants.at("strong_mono"));
    }
  }
}

TEST_CASE("check_strict examples") {
  const Map js = skew_op().resolvent();
  const auto r = check_strict(js, kCfg);
  CHECK(flag(r, "strict_nonexpansive") == Verdict::holds_on_samples);
  CHECK(flag(r, "injective") == Verdict::holds_on_samples);
  CHECK(flag(r, "strict_firm") == Verdict::violated);
  expect_replayable(r, &js);

  const auto z = check_strict(Map::zero(2), kCfg);
  CHECK(flag(z, "strict_nonexpansive") == Verdict::holds_on_samples);
  CHECK(flag(z, "injective") == Verdict::violated);

  const auto h = check_strict(Map::scaled_identity(2, 0.5), kCfg);
  CHECK(h.verdict == Verdict::holds_on_samples);
}

TEST_CASE("check_paramonotone examples") {
  const auto skew = skew_op();
  // Probes (1,0) and (0,0): J maps them to (0.5,-0.5) and (0,0).
  const auto g = minty_sample(skew, {vec2(1.0, 0.0), vec2(0.0, 0.0)});
  const auto r = check_paramonotone(skew, g);
  expect_replayable(r, &skew.resolvent());
  CHECK((r.witness->points[0] - vec2(0.5, -0.5)).norm() <= 1e-15);
  CHECK(r.witness->points[2].norm() == 0.0);

  const auto l1 = make_operator(spec::subdifferential(fn::L1{1.0}, 2));
  const auto rl = check_paramonotone(l1, sample_graph(l1, kCfg.with_count(200)));
  CHECK(rl.verdict == Verdict::holds_on_samples);
  CHECK(rl.constants.at("qualifying_pairs") > 0);

  const auto id = make_operator(spec::linear(Matrix::Identity(2, 2)));
  const auto ri = check_paramonotone(id, sample_graph(id, kCfg.with_count(50)));
  CHECK(ri.verdict == Verdict::holds_on_samples);
  CHECK(ri.constants.at("qualifying_pairs") == 0);
}

TEST_CASE("property: subdifferentials are paramonotone, including near-tangent boundary pairs") {
  for (const auto& inst : catalog_instances()) {
    const auto a = make_operator(inst.spec);
    if (a.flags().is_subdifferential != Tri::yes) continue;
    CAPTURE(inst.name);
    for (std::uint64_t seed : {8u, 9u, 10u}) {
      const auto r = check_paramonotone(a, sample_graph(a, SampleConfig(seed, 600, 2)));
      CHECK(r.verdict == Verdict::holds_on_samples);
    }
  }
}

TEST_CASE("check_cyclic_firm") {
  const auto l1 = make_operator(spec::subdifferential(fn::L1{1.0}, 2)).resolvent();
  CHECK(check_cyclic_firm(l1, 5, 200, kCfg).verdict == Verdict::holds_on_samples);
  const Map js = skew_op().resolvent();
  const auto r = check_cyclic_firm(js, 3, 1000, kCfg);
  expect_replayable(r, &js);
  CHECK(r.flags.at("length_2").verdict == Verdict::holds_on_samples);
  CHECK(r.flags.at("length_3").verdict == Verdict::violated);
  CHECK(r.witness->points.size() == 3);
  CHECK_THROWS_AS(check_cyclic_firm(js, 1, 10, kCfg), InvalidArgument);
}

TEST_CASE("property: cyclic length two agrees with firmness") {
  for (const auto& inst : catalog_instances()) {
    CAPTURE(inst.name);
    const Map t = make_operator(inst.spec).resolvent();
    CHECK(check_cyclic_firm(t, 2, 200, kCfg).verdict == Verdict::holds_on_samples);
  }
  const Map neg = Map::scaled_identity(2, -1.0);
  CHECK(check_cyclic_firm(neg, 2, 200, kCfg).verdict == Verdict::violated);
  CHECK(check_firm(neg, kCfg).verdict == Verdict::violated);
}

TEST_CASE("check_rectangular matches brute force") {
  const auto id = make_operator(spec::linear(Matrix::Identity(2, 2)));
  const auto g = sample_graph(id, kCfg.with_count(40));
  const Vector zero = Vector::Zero(2);
  const auto r = check_rectangular(g, {zero}, {zero});
  double want = INFINITY;
  for (const auto& p : g.pairs) want = std::min(want, (zero - p.x).dot(zero - p.u));
  CHECK(r.constants.at("inf_x0_v0") == want);
  CHECK(r.verdict == Verdict::inconclusive);

  GraphSample one;
  one.pairs.push_back({vec2(1.0, 2.0), vec2(3.0, 4.0)});
  const auto r1 = check_rectangular(one, {vec2(0.0, 1.0)}, {vec2(1.0, 1.0)});
  CHECK(r1.constants.at("inf_x0_v0") == doctest::Approx((-1.0) * (-2.0) + (-1.0) * (-3.0)));
}

TEST_CASE("rectangular sweep separates skew from subdifferentials") {
  const std::vector<double> scales{1.0, 10.0, 100.0};
  CHECK(rectangular_scale_sweep(skew_op(), scales, kCfg.with_count(200)).labels.at("trend") == "unbounded_below");
  CHECK(rectangular_scale_sweep(make_operator(spec::subdifferential(fn::L1{1.0}, 2)), scales, kCfg.with_count(200))
            .labels.at("trend") == "bounded");
  CHECK(rectangular_scale_sweep(make_operator(spec::linear(Matrix::Identity(2, 2))), scales, kCfg.with_count(200))
            .labels.at("trend") == "bounded");
}

TEST_CASE("classify_structure examples") {
  const auto s = classify_structure(skew_op().resolvent(), kCfg);
  CHECK(flag(s, "linear") == Verdict::holds_on_samples);
  CHECK(flag(s, "affine") == Verdict::holds_on_samples);
  CHECK(flag(s, "isometry") == Verdict::violated);
  CHECK(flag(s, "projection") == Verdict::violated);

  const auto c = make_operator(spec::constant(vec2(1.0, -1.0))).resolvent();
  const auto rc = classify_structure(c, kCfg);
  CHECK(flag(rc, "affine") == Verdict::holds_on_samples);
  CHECK(flag(rc, "linear") == Verdict::violated);
  CHECK(flag(rc, "isometry") == Verdict::holds_on_samples);
  CHECK(replays(*rc.flags.at("linear").witness, &c));

  const auto box = make_operator(spec::normal_cone(fn::IndicatorBox{vec2(-1.0, -1.0), vec2(1.0, 1.0)}, 2));
  CHECK(flag(classify_structure(box.resolvent(), kCfg), "projection") == Verdict::holds_on_samples);
}

TEST_CASE("uniform modulus estimate") {
  const auto id = make_operator(spec::linear(Matrix::Identity(2, 2)));
  const auto m = estimate_uniform_modulus(sample_graph(id, kCfg.with_count(60)), 6);
  REQUIRE(m.bin_edges.size() == 7);
  REQUIRE(m.bin_inf.size() == 6);
  for (std::size_t k = 0; k < 6; ++k) {
    if (!m.bin_inf[k]) continue;
    CHECK(*m.bin_inf[k] >= m.bin_edges[k] * m.bin_edges[k] - 1e-12);
    CHECK(*m.bin_inf[k] <= m.bin_edges[k + 1] * m.bin_edges[k + 1] + 1e-12);
  }
  CHECK(m.nondecreasing);

  const auto ms = estimate_uniform_modulus(sample_graph(skew_op(), kCfg.with_count(60)), 4);
  for (const auto& v : ms.bin_inf)
    if (v) CHECK(std::abs(*v) <= 1e-12);

  GraphSample g;
  g.pairs.push_back({vec2(0.0, 0.0), vec2(0.0, 0.0)});
  g.pairs.push_back({vec2(1.0, 0.0), vec2(1.0, 0.0)});
  const auto sparse = estimate_uniform_modulus(g, 3);
  CHECK_FALSE(sparse.bin_inf[0].has_value());
  CHECK(sparse.bin_counts[0] == 0);
  CHECK(sparse.bin_inf[2].has_value());
}

TEST_CASE("property: every violated report replays") {
  std::vector<std::pair<PropertyReport, Map>> cases;
  const Map neg = Map::scaled_identity(2, -1.0);
  const Map js = skew_op().resolvent();
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const SampleConfig cfg(seed, 200, 2);
    cases.emplace_back(check_firm(neg, cfg), neg);
    cases.emplace_back(check_strict(js, cfg), js);
    cases.emplace_back(check_cyclic_firm(js, 4, 300, cfg), js);
  }
  for (const auto& [r, t] : cases) {
    REQUIRE(r.verdict == Verdict::violated);
    CHECK(replays(*r.witness, &t));
  }
}
