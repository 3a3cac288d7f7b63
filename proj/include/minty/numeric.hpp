#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "minty/errors.hpp"

namespace minty {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

namespace tol {
/// Equality tolerance for linear-algebra identities.
inline constexpr double linear = 1e-10;
/// Slack allowed before a sampled inequality is declared violated.
inline constexpr double verdict = 1e-8;
/// Pairs closer than this are dropped from ratio estimates.
inline constexpr double degenerate = 1e-12;
}  // namespace tol

/// Seeded description of a Gaussian point cloud.
class SampleConfig {
 public:
  SampleConfig(std::uint64_t seed, int count, int dim, double scale = 1.0);

  std::uint64_t seed() const noexcept { return seed_; }
  int count() const noexcept { return count_; }
  int dim() const noexcept { return dim_; }
  double scale() const noexcept { return scale_; }

  SampleConfig with_count(int count) const { return {seed_, count, dim_, scale_}; }
  SampleConfig with_scale(double scale) const { return {seed_, count_, dim_, scale}; }
  SampleConfig with_seed(std::uint64_t seed) const { return {seed, count_, dim_, scale_}; }

 private:
  std::uint64_t seed_;
  int count_;
  int dim_;
  double scale_;
};

/// Independent generator for the pair (seed, stream). Streams let one
/// checker draw several unrelated batches from a single user seed.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

/// `cfg.count()` vectors with i.i.d. N(0, scale^2) entries.
template <typename Scalar = double>
std::vector<VectorX<Scalar>> sample_points(const SampleConfig& cfg, std::uint64_t stream = 0) {
  auto rng = make_stream(cfg.seed(), stream);
  std::normal_distribution<Scalar> gauss(Scalar(0), Scalar(cfg.scale()));
  std::vector<VectorX<Scalar>> out;
  out.reserve(static_cast<std::size_t>(cfg.count()));
  for (int k = 0; k < cfg.count(); ++k) {
    VectorX<Scalar> v(cfg.dim());
    for (int i = 0; i < cfg.dim(); ++i) v[i] = gauss(rng);
    out.push_back(std::move(v));
  }
  return out;
}

/// Largest singular value, computed from a full SVD.
template <typename Derived>
typename Derived::Scalar spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.size() == 0) return Scalar(0);
  Eigen::JacobiSVD<MatrixX<Scalar>> svd(m.eval());
  return svd.singularValues()(0);
}

template <typename Scalar>
struct PowerIterationResult {
  Scalar value;
  VectorX<Scalar> direction;  // unit right singular vector estimate
  int iterations;
};

/// Largest singular value by power iteration on M^T M. Stops when the
/// Rayleigh quotient changes by less than `rel_tol` relative to itself;
/// throws ConvergenceError when `max_iter` is exhausted.
template <typename Derived>
PowerIterationResult<typename Derived::Scalar> power_iteration_norm(
    const Eigen::MatrixBase<Derived>& m, int max_iter = 10000,
    typename Derived::Scalar rel_tol = 1e-12) {
  using Scalar = typename Derived::Scalar;
  const MatrixX<Scalar> gram = m.transpose() * m;
  const auto n = gram.cols();
  if (n == 0) return {Scalar(0), VectorX<Scalar>(), 0};
  // Fixed, dense start vector: deterministic and generically not orthogonal
  // to the dominant singular direction.
  VectorX<Scalar> v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = Scalar(1) + Scalar(i + 1) / Scalar(n + 7);
  v.normalize();
  Scalar lambda = v.dot(gram * v);
  for (int it = 1; it <= max_iter; ++it) {
    VectorX<Scalar> w = gram * v;
    const Scalar wn = w.norm();
    if (wn == Scalar(0)) return {Scalar(0), v, it};
    v = w / wn;
    const Scalar next = v.dot(gram * v);
    const Scalar change = std::abs(next - lambda);
    lambda = next;
    if (change <= rel_tol * std::abs(lambda)) {
      return {std::sqrt(std::max(lambda, Scalar(0))), v, it};
    }
  }
  throw ConvergenceError("power iteration did not converge", static_cast<double>(lambda));
}

/// Factorization of a square system M x = b, rejected up front when M is
/// singular or too badly conditioned. Repeated solves reuse the factors.
template <typename Scalar>
class LinearSolver {
 public:
  explicit LinearSolver(const MatrixX<Scalar>& m, double max_condition = 1e12) : m_(m) {
    if (m.rows() != m.cols()) throw DimensionError("LinearSolver: matrix is not square");
    Eigen::JacobiSVD<MatrixX<Scalar>> svd(m);
    const auto& s = svd.singularValues();
    const Scalar smax = s.size() ? s(0) : Scalar(0);
    const Scalar smin = s.size() ? s(s.size() - 1) : Scalar(0);
    condition_ = (smin > Scalar(0)) ? static_cast<double>(smax / smin)
                                    : std::numeric_limits<double>::infinity();
    if (!(condition_ <= max_condition)) {
      throw SingularMatrixError("matrix is singular or ill-conditioned (condition estimate " +
                                    std::to_string(condition_) + ")",
                                condition_);
    }
    lu_.compute(m);
  }

  VectorX<Scalar> solve(const VectorX<Scalar>& b) const {
    if (b.size() != m_.rows()) throw DimensionError("LinearSolver: right-hand side has wrong length");
    VectorX<Scalar> x = lu_.solve(b);
    // One step of iterative refinement keeps the residual at roundoff level.
    x += lu_.solve((b - m_ * x).eval());
    return x;
  }

  /// Columns of M^{-1}.
  MatrixX<Scalar> inverse() const {
    const auto n = m_.rows();
    MatrixX<Scalar> out(n, n);
    for (Eigen::Index j = 0; j < n; ++j) out.col(j) = solve(VectorX<Scalar>::Unit(n, j));
    return out;
  }

  double condition() const noexcept { return condition_; }
  const MatrixX<Scalar>& matrix() const noexcept { return m_; }

 private:
  MatrixX<Scalar> m_;
  Eigen::FullPivLU<MatrixX<Scalar>> lu_;
  double condition_ = 0.0;
};

/// Solves M x = b. Throws SingularMatrixError when cond(M) exceeds
/// `max_condition`, DimensionError on shape mismatch.
template <typename DerivedM, typename DerivedB>
VectorX<typename DerivedM::Scalar> solve_linear(const Eigen::MatrixBase<DerivedM>& m,
                                                const Eigen::MatrixBase<DerivedB>& b,
                                                double max_condition = 1e12) {
  using Scalar = typename DerivedM::Scalar;
  if (m.rows() != m.cols()) throw DimensionError("solve_linear: matrix is not square");
  if (m.rows() != b.size()) throw DimensionError("solve_linear: right-hand side has wrong length");
  return LinearSolver<Scalar>(m.eval(), max_condition).solve(b.eval());
}

/// Most negative eigenvalue of the symmetric part M + M^T.
double min_symmetric_eigenvalue(const Matrix& m);

}  // namespace minty
