#include "minty/numeric.hpp"

namespace minty {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

SampleConfig::SampleConfig(std::uint64_t seed, int count, int dim, double scale)
    : seed_(seed), count_(count), dim_(dim), scale_(scale) {
  if (count < 1) throw InvalidArgument("SampleConfig: count must be >= 1");
  if (dim < 1) throw InvalidArgument("SampleConfig: dim must be >= 1");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw InvalidArgument("SampleConfig: scale must be positive and finite");
  }
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{splitmix64(seed), splitmix64(seed ^ splitmix64(stream + 1)), stream};
  return std::mt19937_64(seq);
}

double min_symmetric_eigenvalue(const Matrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("min_symmetric_eigenvalue: matrix is not square");
  if (m.size() == 0) return 0.0;
  const Matrix sym = m + m.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace minty
