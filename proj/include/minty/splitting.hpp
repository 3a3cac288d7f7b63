#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "minty/checkers.hpp"

namespace minty {

/// T1 o T2 o ... o Tn, i.e. Tn is applied first.
Map compose(const std::vector<Map>& maps);

/// sum_i w_i T_i with w_i in (0, 1] summing to 1.
Map convex_combine(const std::vector<Map>& maps, const std::vector<double>& weights);

/// J_{A1} o J_{A2}.
Map backward_backward(const MonotoneOperator& a1, const MonotoneOperator& a2);

/// 1/2 (2 J_{A1} - Id)(2 J_{A2} - Id) + 1/2 Id.
Map douglas_rachford_operator(const MonotoneOperator& a1, const MonotoneOperator& a2);

struct IterationTrace {
  std::vector<Vector> iterates;
  std::vector<double> residuals;  // |x_{k+1} - x_k|
  bool converged = false;
  bool diverged = false;
  int iterations_used = 0;
  std::optional<Vector> limit_point;
};

constexpr double kDivergenceNorm = 1e12;

/// x_{k+1} = T(x_k) until the step drops to stop_tol, the iterate norm
/// exceeds kDivergenceNorm, or max_iter steps were taken.
IterationTrace picard_iterate(const Map& t, const Vector& x0, int max_iter, double stop_tol);

/// Columns: iteration, residual (empty for the last row), x_0..x_{d-1}.
void write_trace_csv(const IterationTrace& trace, std::ostream& out);

struct FixedPointEvidence {
  std::vector<IterationTrace> traces;
  /// singleton_evidence, empty_or_nonattracting, multiple_limits or mixed.
  std::string classification;
  /// Largest distance between two limits; 0 with fewer than two limits.
  double diameter = 0.0;
  int converged_starts = 0;
};

/// Runs picard_iterate from cfg.count() random starts.
FixedPointEvidence multi_start_fixed_points(const Map& t, const SampleConfig& cfg, int max_iter,
                                            double stop_tol, double cluster_tol = 1e-6);

struct ContractionAnalysis {
  double beta_estimate = 0.0;
  /// True when beta comes from an exact spectral norm.
  bool exact = false;
  SubCheck condition_i;    // graph inequality
  SubCheck condition_ii;   // inequality on T
  SubCheck condition_iii;  // |Nx - Ny| <= beta |x - y|
  bool agree = false;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  std::string target;
};

/// Evaluates the three equivalent contraction conditions for
/// N = 2 J_A - Id at a given beta, all on the same sampled preimage pairs.
ContractionAnalysis check_reflected_conditions(const MonotoneOperator& a, double beta,
                                               const SampleConfig& cfg);

/// Estimates the Lipschitz constant of N (exact for affine resolvents) and
/// checks the three conditions at that constant.
ContractionAnalysis analyze_reflected_contraction(const MonotoneOperator& a, const SampleConfig& cfg);

/// Nonexpansiveness of eps Id + (1 + eps) N, cross-checked against the
/// graph estimate of strong monotonicity.
PropertyReport check_strong_mono_via_reflected(const MonotoneOperator& a, double epsilon,
                                               const SampleConfig& cfg);

}  // namespace minty
