#include "minty/map.hpp"

#include <sstream>

namespace minty {

Provenance make_provenance(std::string op, std::vector<Provenance> args) {
  return std::make_shared<const ProvenanceNode>(ProvenanceNode{std::move(op), std::move(args)});
}

std::string to_string(const Provenance& p) {
  if (!p) return "?";
  if (p->args.empty()) return p->op;
  std::string out = p->op + "(";
  for (std::size_t i = 0; i < p->args.size(); ++i) {
    if (i) out += ", ";
    out += to_string(p->args[i]);
  }
  return out + ")";
}

Map::Map(int dim, Evaluator eval, Provenance provenance, std::optional<AffineForm> affine)
    : dim_(dim), eval_(std::move(eval)), provenance_(std::move(provenance)), affine_(std::move(affine)) {
  if (dim < 1) throw InvalidArgument("Map: dimension must be positive");
  if (!eval_) throw InvalidArgument("Map: empty evaluator");
  if (affine_ && (affine_->linear.rows() != dim || affine_->linear.cols() != dim ||
                  affine_->offset.size() != dim)) {
    throw DimensionError("Map: affine form does not match dimension");
  }
}

Map Map::identity(int dim) {
  return {dim, [](const Vector& x) { return x; }, make_provenance("identity"),
          AffineForm{Matrix::Identity(dim, dim), Vector::Zero(dim)}};
}

Map Map::zero(int dim) {
  return {dim, [dim](const Vector&) { return Vector(Vector::Zero(dim)); }, make_provenance("zero"),
          AffineForm{Matrix::Zero(dim, dim), Vector::Zero(dim)}};
}

Map Map::scaled_identity(int dim, double factor) {
  std::ostringstream label;
  label.precision(17);
  label << factor << "*identity";
  return {dim, [factor](const Vector& x) { return Vector(factor * x); }, make_provenance(label.str()),
          AffineForm{factor * Matrix::Identity(dim, dim), Vector::Zero(dim)}};
}

Map Map::linear(Matrix m, std::string label) {
  if (m.rows() != m.cols()) throw DimensionError("Map::linear: matrix is not square");
  const int dim = static_cast<int>(m.rows());
  AffineForm form{m, Vector::Zero(dim)};
  return {dim, [m = std::move(m)](const Vector& x) { return Vector(m * x); },
          make_provenance(std::move(label)), std::move(form)};
}

Map Map::affine(Matrix m, Vector offset, std::string label) {
  if (m.rows() != m.cols() || m.rows() != offset.size()) {
    throw DimensionError("Map::affine: inconsistent shapes");
  }
  const int dim = static_cast<int>(m.rows());
  AffineForm form{m, offset};
  return {dim, [form](const Vector& x) { return form.apply(x); }, make_provenance(std::move(label)),
          form};
}

Vector Map::operator()(const Vector& x) const {
  if (x.size() != dim_) {
    throw DimensionError("map " + describe() + " expects dimension " + std::to_string(dim_) +
                         ", got " + std::to_string(x.size()));
  }
  return eval_(x);
}

}  // namespace minty
