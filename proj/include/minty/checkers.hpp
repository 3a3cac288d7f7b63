#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "minty/monotone.hpp"
#include "minty/report.hpp"

namespace minty {

/// cfg.count() pairs (x, y); x from stream 0, y from stream 1.
std::vector<std::pair<Vector, Vector>> sample_pairs(const SampleConfig& cfg);

/// Graph sample of A at the points drawn by cfg (stream 0).
GraphSample sample_graph(const MonotoneOperator& a, const SampleConfig& cfg);

/// Evaluates all five firm-nonexpansiveness characterizations on every
/// sampled pair. Each one is reported as a flag; the overall verdict is
/// `inconclusive` when they disagree.
PropertyReport check_firm(const Map& t, const SampleConfig& cfg);

/// Sampled Lipschitz constant, plus the exact spectral norm when `t` carries
/// an affine form. The verdict tests the bound `threshold`; the
/// `banach_contraction` flag tests for a constant strictly below 1.
PropertyReport estimate_lipschitz(const Map& t, const SampleConfig& cfg, double threshold = 1.0);

/// (1-b^2)/b^2 |x-y|^2 <= 2<x-y,u-v> + |u-v|^2 over all pairs of g.
PropertyReport check_banach_graph_inequality(const GraphSample& g, double beta);

/// inf <x-y,u-v> / |x-y|^2 over distinct pairs. The verdict tests
/// monotonicity of A - epsilon Id (epsilon = 0 when not given).
PropertyReport estimate_strong_monotonicity(const GraphSample& g,
                                            std::optional<double> epsilon = std::nullopt);

/// inf <x-y,u-v> / |u-v|^2 over pairs with u != v.
PropertyReport estimate_cocoercivity(const GraphSample& g, std::optional<double> gamma = std::nullopt);

/// Flags strict_nonexpansive, injective and strict_firm on sampled pairs.
PropertyReport check_strict(const Map& t, const SampleConfig& cfg);

/// For graph pairs with <x-y,u-v> = 0, tests that the crossed pairs (x,v)
/// and (y,u) lie in gr A, i.e. J_A(x+v) = x and J_A(y+u) = y.
PropertyReport check_paramonotone(const MonotoneOperator& a, const GraphSample& g);

/// Cyclic sums for tuples of length 2..n_max (x_{n+1} = x_1).
PropertyReport check_cyclic_firm(const Map& t, int n_max, int tuples_per_n, const SampleConfig& cfg);

/// Empirical inf over g of <x-z, v-w> for every probe pair (x, v). Always
/// inconclusive: a finite sample cannot bound a global infimum.
PropertyReport check_rectangular(const GraphSample& g, const std::vector<Vector>& probes_x,
                                 const std::vector<Vector>& probes_v);

/// Runs check_rectangular on graph samples of growing scale with fixed
/// probes and classifies the trend of the infimum.
PropertyReport rectangular_scale_sweep(const MonotoneOperator& a, const std::vector<double>& scales,
                                       const SampleConfig& cfg, int probe_count = 3);

/// Flags linear, affine, isometry and projection.
PropertyReport classify_structure(const Map& t, const SampleConfig& cfg);

ModulusEstimate estimate_uniform_modulus(const GraphSample& g, int bins);

}  // namespace minty
