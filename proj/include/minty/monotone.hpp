#pragma once

#include <optional>
#include <string>
#include <vector>

#include "minty/map.hpp"

namespace minty {

/// Tri-state flag. Transforms propagate `unknown` rather than guessing.
enum class Tri { no, yes, unknown };

std::string to_string(Tri t);

struct OperatorFlags {
  Tri is_linear = Tri::unknown;
  Tri is_affine = Tri::unknown;
  Tri is_subdifferential = Tri::unknown;
  Tri at_most_single_valued = Tri::unknown;
  /// Single-valuedness of A^{-1}, i.e. disjoint injectivity of A.
  Tri inverse_at_most_single_valued = Tri::unknown;
};

/// Settings for the resolvent solver used by operators known only through
/// a direct evaluator.
struct ResolventSolverOptions {
  int newton_steps = 100;
  int damped_steps = 10000;
  double residual_tol = 1e-9;
};

/// Maximally monotone operator, represented by its resolvent J_A. Set-valued
/// operators are never evaluated directly: their graph is reached through
/// the Minty parametrization.
class MonotoneOperator {
 public:
  MonotoneOperator(Map resolvent, OperatorFlags flags, std::string label,
                   std::optional<Map::Evaluator> direct = std::nullopt,
                   std::optional<Map::Evaluator> inverse_direct = std::nullopt);

  /// Operator defined only by x -> A(x); its resolvent solves x + A(x) = y.
  static MonotoneOperator from_direct(int dim, Map::Evaluator a, OperatorFlags flags,
                                      std::string label, ResolventSolverOptions opts = {});

  int dim() const noexcept { return resolvent_.dim(); }
  const Map& resolvent() const noexcept { return resolvent_; }
  const OperatorFlags& flags() const noexcept { return flags_; }
  const std::string& label() const noexcept { return label_; }

  bool has_direct() const noexcept { return direct_.has_value(); }
  /// A(x) for single-valued operators; throws InvalidArgument otherwise.
  Vector direct(const Vector& x) const;

  const std::optional<Map::Evaluator>& direct_evaluator() const noexcept { return direct_; }
  const std::optional<Map::Evaluator>& inverse_direct_evaluator() const noexcept {
    return inverse_direct_;
  }

 private:
  Map resolvent_;
  OperatorFlags flags_;
  std::string label_;
  std::optional<Map::Evaluator> direct_;
  std::optional<Map::Evaluator> inverse_direct_;
};

struct GraphPair {
  Vector x;
  Vector u;
};

/// Finite sample of gr A.
struct GraphSample {
  std::vector<GraphPair> pairs;

  std::size_t size() const noexcept { return pairs.size(); }
  bool empty() const noexcept { return pairs.empty(); }
};

/// The sample of gr A^{-1}: every pair (x, u) becomes (u, x).
GraphSample swap(const GraphSample& g);

Map resolvent(const MonotoneOperator& a);

/// A^{-1}, whose resolvent is Id - J_A.
MonotoneOperator inverse(const MonotoneOperator& a);

/// x -> x - T(x).
Map complement(const Map& t);

/// x -> 2 T(x) - x.
Map reflect(const Map& t);

/// Pairs (J_A p, p - J_A p), one per probe.
GraphSample minty_sample(const MonotoneOperator& a, const std::vector<Vector>& probes);

/// The operator T^{-1} - Id. Firmness of `t` is the caller's promise.
MonotoneOperator from_firm(const Map& t, std::string label = {});

/// Solves x + A(x) = y. Newton with a forward-difference Jacobian first,
/// then the damped iteration x <- (x + y - A(x)) / 2.
Vector solve_resolvent_equation(const Map::Evaluator& a, const Vector& y,
                                const ResolventSolverOptions& opts = {});

}  // namespace minty
