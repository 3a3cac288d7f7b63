#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minty/map.hpp"

namespace minty {

enum class Verdict { holds_on_samples, violated, inconclusive };

std::string to_string(Verdict v);
Verdict parse_verdict(const std::string& s);

/// Every sampled inequality the checkers evaluate, each written as
/// `lhs <= rhs` with an explicit margin. Strict inequalities carry a
/// negative margin.
enum class Inequality {
  firm_sum_of_squares,     // |Tx-Ty|^2 + |(I-T)x-(I-T)y|^2 <= |x-y|^2
  firm_complement,         // the same with T replaced by I-T
  firm_reflection,         // |Nx-Ny|^2 <= |x-y|^2, N = 2T-I
  firm_inner_product,      // |Tx-Ty|^2 <= <x-y, Tx-Ty>
  firm_cross_term,         // 0 <= <Tx-Ty, (I-T)x-(I-T)y>
  lipschitz_bound,         // |Tx-Ty|^2 <= L^2 |x-y|^2          (param L)
  strict_nonexpansive,     // |Tx-Ty|^2 <  |x-y|^2
  injective,               // 0 < |Tx-Ty|^2
  strict_firm,             // |Tx-Ty|^2 <  <x-y, Tx-Ty>
  cyclic_firm,             // 0 <= sum <x_i - Tx_i, Tx_i - Tx_{i+1}>
  banach_graph,            // (1-b^2)/b^2 |dx|^2 <= 2<dx,du> + |du|^2   (param beta)
  strong_monotone,         // eps |dx|^2 <= <dx,du>                  (param epsilon)
  cocoercive,              // gamma |du|^2 <= <dx,du>                (param gamma)
  paramonotone_cross,      // T(x+v) = x and T(y+u) = y, as a residual <= 0
  reflected_graph,         // (1-b^2)(|dx|^2+|du|^2) <= 2(1+b^2)<dx,du>   (param beta)
  reflected_firm,          // (1-b^2)|x-y|^2 <= 4<Tx-Ty,(I-T)x-(I-T)y>   (param beta)
  reflected_lipschitz,     // |Nx-Ny|^2 <= b^2 |x-y|^2                (param beta)
  linearity,               // |T(ax+by) - aTx - bTy| <= 0            (params alpha, beta)
  affinity,                // |T(lx+(1-l)y) - lTx - (1-l)Ty| <= 0    (param lambda)
  isometry,                // ||Tx-Ty| - |x-y|| <= 0
  idempotent,              // |T(Tx) - Tx| <= 0
  strong_mono_reflected,   // |eps d + (1+eps)(Nx-Ny)|^2 <= |d|^2    (param epsilon)
};

std::string to_string(Inequality i);
Inequality parse_inequality(const std::string& s);

struct InequalityValue {
  double lhs;
  double rhs;
  double margin;
  bool violated() const noexcept { return lhs - rhs > margin; }
};

using Params = std::map<std::string, double>;

/// Evaluates inequality `id` at `points`. Map-based inequalities take
/// points (x, y, ...) and need `t`; graph-based ones take (x, u, y, v).
InequalityValue evaluate_inequality(Inequality id, std::span<const Vector> points, const Map* t,
                                    const Params& params = {});

/// Inputs and both sides of one failing instance of an inequality.
struct Witness {
  Inequality inequality;
  std::vector<Vector> points;
  Params params;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
};

Witness make_witness(Inequality id, std::vector<Vector> points, const Map* t, Params params = {});

/// Re-evaluates the witness; true when the violation reproduces.
bool replays(const Witness& w, const Map* t);

struct SubCheck {
  Verdict verdict = Verdict::inconclusive;
  std::optional<Witness> witness;
};

struct PropertyReport {
  std::string property_id;
  Verdict verdict = Verdict::inconclusive;
  std::optional<Witness> witness;
  std::map<std::string, double> constants;
  std::map<std::string, SubCheck> flags;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  std::string target;
  /// Categorical outcomes that are not verdicts, e.g. a scale-sweep trend.
  std::map<std::string, std::string> labels;
  std::vector<std::string> notes;
};

/// Pointwise infimum of <x-y, u-v> binned by |x-y|.
struct ModulusEstimate {
  std::vector<double> bin_edges;
  std::vector<std::optional<double>> bin_inf;  // nullopt marks an empty bin
  std::vector<std::size_t> bin_counts;
  bool nondecreasing = true;
  std::string note;
};

}  // namespace minty
