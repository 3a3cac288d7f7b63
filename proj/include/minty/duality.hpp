#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minty/checkers.hpp"

namespace minty {

enum class Relation { self_dual, dual_pair };

std::string to_string(Relation r);

/// One property checked on (A, T) and on (A^{-1}, Id - T) with the same seed.
struct DualityRow {
  std::string property_id;
  Relation relation = Relation::self_dual;
  /// Property checked on the dual side when `relation` is dual_pair.
  std::string partner_id;
  Verdict verdict_primal = Verdict::inconclusive;
  Verdict verdict_dual = Verdict::inconclusive;
  /// Set for rows compared by trend rather than verdict.
  std::optional<std::string> trend_primal;
  std::optional<std::string> trend_dual;
  bool consistent = false;
  /// Both reports, kept only when the row is inconsistent.
  std::optional<PropertyReport> report_primal;
  std::optional<PropertyReport> report_dual;
};

struct DualitySuiteResult {
  std::string target;
  std::uint64_t seed = 0;
  std::vector<DualityRow> rows;

  bool consistent() const;
};

/// Runs the dual/self-dual property table on A and A^{-1}. Cyclic sums use
/// tuples up to length `cyclic_n_max`.
DualitySuiteResult run_duality_suite(const MonotoneOperator& a, const SampleConfig& cfg,
                                     int cyclic_n_max = 4);

/// Multistart search for x with T(x) = y for each target, T = J_A, i.e. a
/// probe of dom A = ran J_A. Holds when every residual vanishes; otherwise
/// inconclusive, since a finite search cannot refute membership.
PropertyReport surjectivity_probe(const MonotoneOperator& a, const std::vector<Vector>& targets,
                                  const SampleConfig& cfg);
PropertyReport surjectivity_probe(const Map& t, const std::vector<Vector>& targets,
                                  const SampleConfig& cfg);

}  // namespace minty
