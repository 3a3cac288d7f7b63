#include <doctest.h>

#include <cmath>

#include "minty/numeric.hpp"
#include "support.hpp"

using namespace minty;
using minty::testing::mat2;

namespace {

// Largest singular value of a 2x2 matrix from the characteristic polynomial
// of M^T M.
double sigma_max_2x2(const Matrix& m) {
  const double f = m.squaredNorm();
  const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return std::sqrt((f + std::sqrt(std::max(0.0, f * f - 4.0 * det * det))) / 2.0);
}

}  // namespace

TEST_CASE("sample_points is reproducible per (seed, stream)") {
  const SampleConfig cfg(42, 50, 3);
  const auto a = sample_points(cfg, 0);
  const auto b = sample_points(cfg, 0);
  const auto c = sample_points(cfg, 1);
  const auto d = sample_points(cfg.with_seed(43), 0);
  REQUIRE(a.size() == 50);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(a[i].size() == 3);
  }
  CHECK(a[0] != c[0]);
  CHECK(a[0] != d[0]);
}

TEST_CASE("sample_points scales linearly and draws roughly unit variance") {
  const SampleConfig cfg(7, 4000, 2);
  const auto base = sample_points(cfg);
  const auto wide = sample_points(cfg.with_scale(10.0));
  double sq = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK((wide[i] - 10.0 * base[i]).norm() <= 1e-12 * (1.0 + wide[i].norm()));
    sq += base[i].squaredNorm();
  }
  CHECK(sq / (2.0 * base.size()) == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("sample_points works for float") {
  const auto pts = sample_points<float>(SampleConfig(1, 3, 4));
  CHECK(pts.size() == 3);
  CHECK(pts[0].size() == 4);
}

TEST_CASE("SampleConfig rejects nonsense") {
  CHECK_THROWS_AS(SampleConfig(1, 0, 2), InvalidArgument);
  CHECK_THROWS_AS(SampleConfig(1, 5, 0), InvalidArgument);
  CHECK_THROWS_AS(SampleConfig(1, 5, 2, -1.0), InvalidArgument);
}

TEST_CASE("spectral_norm matches the 2x2 closed form") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const Matrix m = minty::testing::random_monotone_matrix(rng, 2);
    const double want = sigma_max_2x2(m);
    CHECK(std::abs(spectral_norm(m) - want) <= 1e-12 * (1.0 + want));
  }
  CHECK(spectral_norm(mat2(0.0, -1.0, 1.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(spectral_norm(Matrix::Zero(3, 3)) == 0.0);
}

TEST_CASE("spectral_norm on a float expression") {
  Eigen::MatrixXf m(2, 2);
  m << 3.0f, 0.0f, 0.0f, -4.0f;
  CHECK(spectral_norm(m * 2.0f) == doctest::Approx(8.0f));
}

TEST_CASE("power iteration agrees with the SVD on separated spectra") {
  Matrix m = Matrix::Zero(3, 3);
  m.diagonal() << 1.0, 0.5, 0.25;
  const auto r = power_iteration_norm(m);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.iterations > 0);
}

TEST_CASE("power iteration gives up with ConvergenceError") {
  Matrix m = Matrix::Zero(2, 2);
  m.diagonal() << 1.0, 0.999999;
  CHECK_THROWS_AS(power_iteration_norm(m, 5), ConvergenceError);
}

TEST_CASE("LinearSolver solves and refuses singular systems") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const Matrix m = minty::testing::random_monotone_matrix(rng, 4) + Matrix::Identity(4, 4);
    const Vector b = minty::testing::random_vector(rng, 4);
    const Vector x = solve_linear(m, b);
    CHECK((m * x - b).norm() <= 1e-12 * (1.0 + b.norm()) * m.norm());
  }
  try {
    LinearSolver<double> s(mat2(1.0, 2.0, 2.0, 4.0));
    FAIL("expected SingularMatrixError");
  } catch (const SingularMatrixError& e) {
    CHECK(std::isinf(e.condition()));
  }
  CHECK_THROWS_AS(solve_linear(Matrix(Matrix::Identity(2, 2)), Vector(Vector::Ones(3))), DimensionError);
  CHECK_THROWS_AS(LinearSolver<double>(Matrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("LinearSolver inverse") {
  const Matrix m = mat2(2.0, 1.0, -1.0, 3.0);
  const LinearSolver<double> s(m);
  CHECK((s.inverse() * m - Matrix::Identity(2, 2)).norm() <= 1e-14);
  CHECK(s.condition() >= 1.0);
}

TEST_CASE("min_symmetric_eigenvalue of M + M^T") {
  CHECK(min_symmetric_eigenvalue(mat2(0.0, -1.0, 1.0, 0.0)) == doctest::Approx(0.0));
  CHECK(min_symmetric_eigenvalue(mat2(1.0, 0.0, 0.0, -2.0)) == doctest::Approx(-4.0));
}
