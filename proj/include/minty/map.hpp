#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "minty/numeric.hpp"

namespace minty {

/// Node of a transform chain, e.g. reflect(resolvent(linear[2x2])).
struct ProvenanceNode {
  std::string op;
  std::vector<std::shared_ptr<const ProvenanceNode>> args;
};

using Provenance = std::shared_ptr<const ProvenanceNode>;

Provenance make_provenance(std::string op, std::vector<Provenance> args = {});
std::string to_string(const Provenance& p);

/// x -> L x + c. Carried alongside an evaluator whenever the map is known
/// to be affine, so exact constants (spectral norms) stay available after
/// transforms.
struct AffineForm {
  Matrix linear;
  Vector offset;

  Vector apply(const Vector& x) const { return linear * x + offset; }
  bool is_linear() const { return offset.isZero(0.0); }
};

/// Evaluable single-valued map X -> X with its transform history. This is
/// the common currency of the library: resolvents (firmly nonexpansive),
/// reflected resolvents (nonexpansive) and arbitrary candidates all share it.
class Map {
 public:
  using Evaluator = std::function<Vector(const Vector&)>;

  Map(int dim, Evaluator eval, Provenance provenance,
      std::optional<AffineForm> affine = std::nullopt);

  static Map identity(int dim);
  static Map zero(int dim);
  static Map scaled_identity(int dim, double factor);
  static Map linear(Matrix m, std::string label = "linear");
  static Map affine(Matrix m, Vector offset, std::string label = "affine");

  Vector operator()(const Vector& x) const;

  int dim() const noexcept { return dim_; }
  const Provenance& provenance() const noexcept { return provenance_; }
  std::string describe() const { return to_string(provenance_); }
  const std::optional<AffineForm>& affine_form() const noexcept { return affine_; }

 private:
  int dim_;
  Evaluator eval_;
  Provenance provenance_;
  std::optional<AffineForm> affine_;
};

}  // namespace minty
