#pragma once

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "minty/catalog.hpp"

namespace minty::testing {

struct Instance {
  std::string name;
  OperatorSpec spec;
};

inline Matrix mat2(double a, double b, double c, double d) {
  Matrix m(2, 2);
  m << a, b, c, d;
  return m;
}

inline Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

/// The operator zoo used by the catalog-wide tests.
inline std::vector<Instance> catalog_instances() {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix line(2, 1);
  line << r, r;
  return {
      {"skew", spec::skew()},
      {"identity", spec::linear(Matrix::Identity(2, 2))},
      {"two_identity", spec::linear(2.0 * Matrix::Identity(2, 2))},
      {"linear_zero", spec::linear(Matrix::Zero(2, 2))},
      {"linear_nonsymmetric", spec::linear(mat2(1.0, 1.0, -1.0, 0.5))},
      {"affine", spec::affine(mat2(1.0, 0.5, -0.5, 0.0), vec2(1.0, -2.0))},
      {"constant", spec::constant(vec2(1.0, -1.0))},
      {"diag_harmonic_2", spec::diag_harmonic(2)},
      {"quadratic", spec::subdifferential(fn::Quadratic{1.0}, 2)},
      {"l1", spec::subdifferential(fn::L1{1.0}, 2)},
      {"ball_cone", spec::normal_cone(fn::IndicatorBall{1.0}, 2)},
      {"box_cone", spec::normal_cone(fn::IndicatorBox{vec2(-1.0, -1.0), vec2(1.0, 1.0)}, 2)},
      {"point_cone", spec::normal_cone(fn::IndicatorSingleton{vec2(0.5, 0.5)}, 2)},
      {"line_cone", spec::normal_cone(fn::IndicatorAffine{vec2(1.0, 0.0), line}, 2)},
      {"eps_skew", spec::scaled_identity_plus(0.5, spec::skew())},
      {"eps_l1", spec::scaled_identity_plus(1.0, spec::subdifferential(fn::L1{1.0}, 2))},
  };
}

/// Random monotone matrix P^T P + S with S skew.
inline Matrix random_monotone_matrix(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Matrix p(n, n);
  Matrix s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      p(i, j) = g(rng);
      s(i, j) = g(rng);
    }
  return p.transpose() * p + (s - s.transpose());
}

inline Vector random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

}  // namespace minty::testing
