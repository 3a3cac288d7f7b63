#include "minty/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <set>
#include <sstream>
#include <thread>

#include <unistd.h>

#include "minty/serialize.hpp"

#ifndef MINTY_VERSION
#define MINTY_VERSION "unknown"
#endif

namespace minty {

using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& msg) {
  throw SpecError(ExitCode::schema_error, path + ": " + msg);
}

const json& field(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) schema(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) schema(path, std::string("missing field '") + key + "'");
  return *it;
}

std::string sub(const std::string& path, const std::string& key) { return path + "." + key; }

double number(const json& j, const std::string& path) {
  if (!j.is_number()) schema(path, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) schema(path, "expected an integer");
  return j.get<int>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) schema(path, "expected a string");
  return j.get<std::string>();
}

Vector vec(const json& j, const std::string& path) {
  try {
    return vector_from_json(j);
  } catch (const InvalidArgument& e) {
    schema(path, e.what());
  }
}

Matrix mat(const json& j, const std::string& path) {
  try {
    return matrix_from_json(j);
  } catch (const InvalidArgument& e) {
    schema(path, e.what());
  }
}

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& path) {
  for (const auto& [k, v] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) schema(path, "unknown field '" + k + "'");
  }
}

/// Maps library exceptions raised while building objects to spec errors.
template <typename F>
auto guarded(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SpecError&) {
    throw;
  } catch (const DimensionError& e) {
    throw SpecError(ExitCode::dimension_mismatch, path + ": " + e.what());
  } catch (const Error& e) {
    throw SpecError(ExitCode::schema_error, path + ": " + e.what());
  }
}

ConvexFunctionSpec parse_function(const json& j, const std::string& path) {
  const std::string type = text(field(j, "type", path), sub(path, "type"));
  if (type == "quadratic") {
    only_keys(j, {"type", "coefficient"}, path);
    return fn::Quadratic{number(field(j, "coefficient", path), sub(path, "coefficient"))};
  }
  if (type == "l1") {
    only_keys(j, {"type", "weight"}, path);
    return fn::L1{number(field(j, "weight", path), sub(path, "weight"))};
  }
  if (type == "ball") {
    only_keys(j, {"type", "radius"}, path);
    return fn::IndicatorBall{number(field(j, "radius", path), sub(path, "radius"))};
  }
  if (type == "box") {
    only_keys(j, {"type", "lower", "upper"}, path);
    return fn::IndicatorBox{vec(field(j, "lower", path), sub(path, "lower")),
                            vec(field(j, "upper", path), sub(path, "upper"))};
  }
  if (type == "singleton") {
    only_keys(j, {"type", "point"}, path);
    return fn::IndicatorSingleton{vec(field(j, "point", path), sub(path, "point"))};
  }
  if (type == "affine_set") {
    only_keys(j, {"type", "anchor", "basis"}, path);
    // basis is given as a list of columns
    const Matrix cols = mat(field(j, "basis", path), sub(path, "basis"));
    return fn::IndicatorAffine{vec(field(j, "anchor", path), sub(path, "anchor")), cols.transpose()};
  }
  schema(sub(path, "type"), "unknown function type '" + type + "'");
}

/// The function lambda * f, so that prox of lambda f is a plain resolvent.
ConvexFunctionSpec scale_function(ConvexFunctionSpec f, double lambda) {
  if (auto* q = std::get_if<fn::Quadratic>(&f)) q->coefficient *= lambda;
  if (auto* l = std::get_if<fn::L1>(&f)) l->weight *= lambda;
  return f;
}

class Loader {
 public:
  explicit Loader(const json& doc) : doc_(doc) {}

  Experiment load(std::string name, std::string hash) {
    if (!doc_.is_object()) schema("$", "expected an object at top level");
    only_keys(doc_, {"operators", "maps", "checks", "output", "description"}, "$");
    Experiment e;
    e.name = std::move(name);
    e.hash = std::move(hash);
    if (doc_.contains("operators")) {
      const json& ops = doc_["operators"];
      if (!ops.is_object()) schema("$.operators", "expected an object");
      for (const auto& [k, v] : ops.items()) operator_named(k, "$");
    }
    if (doc_.contains("maps")) {
      const json& ms = doc_["maps"];
      if (!ms.is_object()) schema("$.maps", "expected an object");
      for (const auto& [k, v] : ms.items()) map_named(k, "$");
    }
    if (doc_.contains("output")) {
      const json& out = doc_["output"];
      only_keys(out, {"path", "format"}, "$.output");
      if (out.contains("path")) e.output_path = text(out["path"], "$.output.path");
      if (out.contains("format")) e.output_format = text(out["format"], "$.output.format");
    }
    e.operators = std::move(ops_);
    e.maps = std::move(maps_);
    const json& checks = field(doc_, "checks", "$");
    if (!checks.is_array()) schema("$.checks", "expected an array");
    for (std::size_t i = 0; i < checks.size(); ++i) e.checks.push_back(parse_check(checks[i], i, e));
    return e;
  }

 private:
  const json& doc_;
  std::map<std::string, MonotoneOperator> ops_;
  std::map<std::string, OperatorSpec> specs_;
  std::map<std::string, Map> maps_;
  std::set<std::string> visiting_;

  const json& declaration(const char* section, const std::string& name, const std::string& from) {
    const auto sec = doc_.find(section);
    if (sec == doc_.end() || !sec->is_object() || !sec->contains(name)) {
      schema(from, std::string("undeclared ") + (section[0] == 'o' ? "operator" : "map") + " '" +
                       name + "'");
    }
    return (*sec)[name];
  }

  void enter(const std::string& key, const std::string& path) {
    if (!visiting_.insert(key).second) schema(path, "cyclic reference");
  }

  const MonotoneOperator& operator_named(const std::string& name, const std::string& from) {
    if (const auto it = ops_.find(name); it != ops_.end()) return it->second;
    const json& j = declaration("operators", name, from);
    const std::string path = "$.operators." + name;
    enter("op:" + name, path);
    auto built = build_operator(j, name, path);
    visiting_.erase("op:" + name);
    return ops_.emplace(name, std::move(built)).first->second;
  }

  /// Catalog spec of an operator, for variants that nest one.
  OperatorSpec spec_named(const std::string& name, const std::string& from) {
    operator_named(name, from);
    const auto it = specs_.find(name);
    if (it == specs_.end()) schema(from, "operator '" + name + "' is not a catalog operator");
    return it->second;
  }

  MonotoneOperator build_operator(const json& j, const std::string& name, const std::string& path) {
    const std::string type = text(field(j, "type", path), sub(path, "type"));
    std::optional<OperatorSpec> s;
    if (type == "linear") {
      only_keys(j, {"type", "matrix"}, path);
      s = guarded(path, [&] { return spec::linear(mat(field(j, "matrix", path), sub(path, "matrix"))); });
    } else if (type == "skew") {
      only_keys(j, {"type"}, path);
      s = spec::skew();
    } else if (type == "affine") {
      only_keys(j, {"type", "matrix", "offset"}, path);
      s = guarded(path, [&] {
        return spec::affine(mat(field(j, "matrix", path), sub(path, "matrix")),
                            vec(field(j, "offset", path), sub(path, "offset")));
      });
    } else if (type == "constant") {
      only_keys(j, {"type", "value"}, path);
      s = guarded(path, [&] { return spec::constant(vec(field(j, "value", path), sub(path, "value"))); });
    } else if (type == "diag_harmonic") {
      only_keys(j, {"type", "d"}, path);
      s = guarded(path, [&] { return spec::diag_harmonic(integer(field(j, "d", path), sub(path, "d"))); });
    } else if (type == "subdifferential" || type == "normal_cone") {
      const char* key = type == "subdifferential" ? "function" : "set";
      only_keys(j, {"type", "dim", key}, path);
      const int dim = integer(field(j, "dim", path), sub(path, "dim"));
      auto f = parse_function(field(j, key, path), sub(path, key));
      s = guarded(path, [&] {
        return type == "subdifferential" ? spec::subdifferential(f, dim) : spec::normal_cone(f, dim);
      });
    } else if (type == "scaled_identity_plus") {
      only_keys(j, {"type", "epsilon", "inner"}, path);
      const double eps = number(field(j, "epsilon", path), sub(path, "epsilon"));
      const auto inner = spec_named(text(field(j, "inner", path), sub(path, "inner")), sub(path, "inner"));
      s = guarded(path, [&] { return spec::scaled_identity_plus(eps, inner); });
    } else if (type == "inverse") {
      only_keys(j, {"type", "of"}, path);
      return inverse(operator_named(text(field(j, "of", path), sub(path, "of")), sub(path, "of")));
    } else if (type == "from_firm") {
      only_keys(j, {"type", "map"}, path);
      const Map& m = map_named(text(field(j, "map", path), sub(path, "map")), sub(path, "map"));
      return from_firm(m, name);
    } else {
      schema(sub(path, "type"), "unknown operator type '" + type + "'");
    }
    specs_.emplace(name, *s);
    return guarded(path, [&] { return make_operator(*s); });
  }

  const Map& map_named(const std::string& name, const std::string& from) {
    if (const auto it = maps_.find(name); it != maps_.end()) return it->second;
    const json& j = declaration("maps", name, from);
    const std::string path = "$.maps." + name;
    enter("map:" + name, path);
    auto built = build_map(j, path);
    visiting_.erase("map:" + name);
    return maps_.emplace(name, std::move(built)).first->second;
  }

  std::vector<Map> map_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) schema(path, "expected a nonempty array of map names");
    std::vector<Map> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
      const std::string p = path + "[" + std::to_string(i) + "]";
      out.push_back(map_named(text(j[i], p), p));
    }
    return out;
  }

  std::pair<const MonotoneOperator*, const MonotoneOperator*> operator_pair(const json& j,
                                                                              const std::string& path) {
    if (!j.is_array() || j.size() != 2) schema(path, "expected two operator names");
    const auto& a = operator_named(text(j[0], path + "[0]"), path + "[0]");
    const auto& b = operator_named(text(j[1], path + "[1]"), path + "[1]");
    return {&a, &b};
  }

  Map build_map(const json& j, const std::string& path) {
    const std::string type = text(field(j, "type", path), sub(path, "type"));
    auto dim = [&] { return integer(field(j, "dim", path), sub(path, "dim")); };
    if (type == "identity") {
      only_keys(j, {"type", "dim"}, path);
      return guarded(path, [&] { return Map::identity(dim()); });
    }
    if (type == "zero") {
      only_keys(j, {"type", "dim"}, path);
      return guarded(path, [&] { return Map::zero(dim()); });
    }
    if (type == "scaled_identity") {
      only_keys(j, {"type", "dim", "factor"}, path);
      const double factor = number(field(j, "factor", path), sub(path, "factor"));
      return guarded(path, [&] { return Map::scaled_identity(dim(), factor); });
    }
    if (type == "linear") {
      only_keys(j, {"type", "matrix"}, path);
      return guarded(path, [&] { return Map::linear(mat(field(j, "matrix", path), sub(path, "matrix"))); });
    }
    if (type == "affine") {
      only_keys(j, {"type", "matrix", "offset"}, path);
      return guarded(path, [&] {
        return Map::affine(mat(field(j, "matrix", path), sub(path, "matrix")),
                           vec(field(j, "offset", path), sub(path, "offset")));
      });
    }
    if (type == "resolvent") {
      only_keys(j, {"type", "operator"}, path);
      return operator_named(text(field(j, "operator", path), sub(path, "operator")), sub(path, "operator"))
          .resolvent();
    }
    if (type == "complement" || type == "reflect") {
      only_keys(j, {"type", "map"}, path);
      const Map& m = map_named(text(field(j, "map", path), sub(path, "map")), sub(path, "map"));
      return type == "complement" ? complement(m) : reflect(m);
    }
    if (type == "prox") {
      only_keys(j, {"type", "dim", "function", "lambda"}, path);
      const double lambda = j.contains("lambda") ? number(j["lambda"], sub(path, "lambda")) : 1.0;
      if (!(lambda > 0.0)) schema(sub(path, "lambda"), "must be positive");
      const auto f = scale_function(parse_function(field(j, "function", path), sub(path, "function")), lambda);
      return guarded(path, [&] { return make_operator(spec::subdifferential(f, dim())).resolvent(); });
    }
    if (type == "diag_harmonic_resolvent") {
      only_keys(j, {"type", "d"}, path);
      const int d = integer(field(j, "d", path), sub(path, "d"));
      return guarded(path, [&] { return make_operator(spec::diag_harmonic(d)).resolvent(); });
    }
    if (type == "compose") {
      only_keys(j, {"type", "maps"}, path);
      auto ms = map_list(field(j, "maps", path), sub(path, "maps"));
      return guarded(path, [&] { return compose(ms); });
    }
    if (type == "convex_combination") {
      only_keys(j, {"type", "maps", "weights"}, path);
      auto ms = map_list(field(j, "maps", path), sub(path, "maps"));
      const Vector w = vec(field(j, "weights", path), sub(path, "weights"));
      return guarded(path, [&] { return convex_combine(ms, std::vector<double>(w.begin(), w.end())); });
    }
    if (type == "douglas_rachford" || type == "backward_backward") {
      only_keys(j, {"type", "operators"}, path);
      const auto [a, b] = operator_pair(field(j, "operators", path), sub(path, "operators"));
      return guarded(path, [&] {
        return type == "douglas_rachford" ? douglas_rachford_operator(*a, *b) : backward_backward(*a, *b);
      });
    }
    schema(sub(path, "type"), "unknown map type '" + type + "'");
  }

  CheckSpec parse_check(const json& j, std::size_t index, const Experiment& e);
};

// ---------------------------------------------------------------------------
// Check registry

struct Target {
  std::string kind;
  std::string name;
  std::optional<MonotoneOperator> op;
  std::optional<Map> map;
};

struct Outcome {
  json body;
  std::optional<Verdict> verdict;
  std::map<std::string, double> constants;
  std::map<std::string, std::string> flags;
  std::map<std::string, std::string> labels;
};

class CheckParams {
 public:
  CheckParams(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  bool has(const char* k) const { return j_.contains(k); }
  double num(const char* k, double def) const { return has(k) ? number(j_[k], sub(path_, k)) : def; }
  double num(const char* k) const { return number(field(j_, k, path_), sub(path_, k)); }
  std::optional<double> opt_num(const char* k) const {
    return has(k) ? std::optional<double>(num(k)) : std::nullopt;
  }
  int integer_or(const char* k, int def) const { return has(k) ? integer(j_[k], sub(path_, k)) : def; }
  Vector vector(const char* k) const { return vec(field(j_, k, path_), sub(path_, k)); }
  std::vector<Vector> vectors(const char* k) const {
    const json& a = field(j_, k, path_);
    if (!a.is_array()) schema(sub(path_, k), "expected an array of vectors");
    std::vector<Vector> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(vec(a[i], sub(path_, k) + "[" + std::to_string(i) + "]"));
    return out;
  }
  std::vector<double> doubles(const char* k, std::vector<double> def) const {
    if (!has(k)) return def;
    const Vector v = vector(k);
    return {v.begin(), v.end()};
  }
  std::optional<std::string> str(const char* k) const {
    return has(k) ? std::optional<std::string>(text(j_[k], sub(path_, k))) : std::nullopt;
  }

  SampleConfig config(int dim, int default_count) const {
    const json& s = field(j_, "seed", path_);
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
      schema(sub(path_, "seed"), "expected a nonnegative integer");
    }
    return guarded(path_, [&] {
      return SampleConfig(s.get<std::uint64_t>(), integer_or("count", default_count), dim,
                          num("scale", 1.0));
    });
  }

 private:
  const json& j_;
  std::string path_;
};

enum class Use { map, op, either };

using Runner = std::function<Outcome(const Target&, const CheckParams&)>;

struct CheckDef {
  CheckInfo info;
  Use use;
  std::vector<std::string> params;
  Runner run;
};

const Map& map_of(const Target& t) { return *t.map; }
const MonotoneOperator& op_of(const Target& t) { return *t.op; }

Outcome from_report(const PropertyReport& r, const Map* replay_map) {
  Outcome o;
  o.body = to_json(r);
  o.verdict = r.verdict;
  o.constants = r.constants;
  for (const auto& [k, v] : r.flags) o.flags[k] = to_string(v.verdict);
  o.labels = r.labels;
  if (r.witness) o.labels["witness_replays"] = replays(*r.witness, replay_map) ? "true" : "false";
  return o;
}

Outcome from_contraction(const ContractionAnalysis& c) {
  Outcome o;
  o.body = to_json(c);
  o.constants["beta"] = c.beta_estimate;
  o.flags["condition_i"] = to_string(c.condition_i.verdict);
  o.flags["condition_ii"] = to_string(c.condition_ii.verdict);
  o.flags["condition_iii"] = to_string(c.condition_iii.verdict);
  o.labels["agree"] = c.agree ? "true" : "false";
  o.labels["exact"] = c.exact ? "true" : "false";
  return o;
}

const std::vector<std::string> kSampling{"seed", "count", "scale", "dim"};

std::vector<std::string> with_sampling(std::initializer_list<std::string> extra) {
  std::vector<std::string> out = kSampling;
  out.insert(out.end(), extra);
  return out;
}

const std::vector<CheckDef>& registry() {
  static const std::vector<CheckDef> defs = [] {
    std::vector<CheckDef> d;
    d.push_back({{"check_firm", "five equivalent forms of firm nonexpansiveness; fails on -Id"},
                 Use::map, with_sampling({}),
                 [](const Target& t, const CheckParams& p) {
                   const Map& m = map_of(t);
                   return from_report(check_firm(m, p.config(m.dim(), 1000)), &m);
                 }});
    d.push_back({{"estimate_lipschitz",
                  "Lipschitz constant of T, exact for affine maps; flags Banach contractions"},
                 Use::map, with_sampling({"threshold"}),
                 [](const Target& t, const CheckParams& p) {
                   const Map& m = map_of(t);
                   return from_report(estimate_lipschitz(m, p.config(m.dim(), 1000), p.num("threshold", 1.0)), &m);
                 }});
    d.push_back({{"check_banach_graph_inequality",
                  "J_A is a beta-contraction <=> (1-b^2)/b^2 |dx|^2 <= 2<dx,du> + |du|^2 on gr A"},
                 Use::op, with_sampling({"beta"}),
                 [](const Target& t, const CheckParams& p) {
                   const auto& a = op_of(t);
                   const auto g = sample_graph(a, p.config(a.dim(), 200));
                   return from_report(check_banach_graph_inequality(g, p.num("beta")), nullptr);
                 }});
    d.push_back({{"estimate_strong_monotonicity",
                  "A - eps Id monotone <=> J_A a (1+eps)^-1 contraction; inf <dx,du>/|dx|^2"},
                 Use::op, with_sampling({"epsilon"}),
                 [](const Target& t, const CheckParams& p) {
                   const auto& a = op_of(t);
                   const auto g = sample_graph(a, p.config(a.dim(), 200));
                   return from_report(estimate_strong_monotonicity(g, p.opt_num("epsilon")), nullptr);
                 }});
    d.push_back({{"estimate_cocoercivity",
                  "gamma-cocoercivity of A <=> strong monotonicity of A^-1; inf <dx,du>/|du|^2"},
                 Use::op, with_sampling({"gamma"}),
                 [](const Target& t, const CheckParams& p) {
                   const auto& a = op_of(t);
                   const auto g = sample_graph(a, p.config(a.dim(), 200));
                   return from_report(estimate_cocoercivity(g, p.opt_num("gamma")), nullptr);
                 }});
    d.push_back({{"check_strict",
                  "strict nonexpansiveness (A disjointly injective), injectivity (A^-1 single-valued), "
                  "strict firmness (A strictly monotone)"},
                 Use::map, with_sampling({}),
                 [](const Target& t, const CheckParams& p) {
                   const Map& m = map_of(t);
                   return from_report(check_strict(m, p.config(m.dim(), 1000)), &m);
                 }});
    d.push_back({{"check_paramonotone",
                  "paramonotonicity of A: <dx,du> = 0 puts the crossed pairs in gr A"},
                 Use::op, with_sampling({}),
                 [](const Target& t, const CheckParams& p) {
                   const auto& a = op_of(t);
                   const auto g = sample_graph(a, p.config(a.dim(), 200));
                   return from_report(check_paramonotone(a, g), &a.resolvent());
                 }});
    d.push_back({{"check_cyclic_firm",
                  "cyclic firm nonexpansiveness <=> resolvent of a subdifferential"},
                 Use::map, with_sampling({"n_max", "tuples_per_n"}),
                 [](const Target& t, const CheckParams& p) {
                   const Map& m = map_of(t);
                   return from_report(check_cyclic_firm(m, p.integer_or("n_max", 3),
                                                        p.integer_or("tuples_per_n", 1000),
                                                        p.config(m.dim(), 1)),
                                      &m);
                 }});
    d.push_back({{"check_rectangular",
                  "rectangularity (3* monotonicity): trend of inf <x-z, v-w> over growing graph samples"},
                 Use::op, with_sampling({"scales", "probes"}),
                 [](const Target& t, const CheckParams& p) {
                   const auto& a = op_of(t);
                   return from_report(rectangular_scale_sweep(a, p.doubles("scales", {1.0, 10.0, 100.0}),
                                                              p.config(a.dim(), 300),
                                                              p.integer_or("probes", 3)),
                                      nullptr);
                 }});
    d.push_back({{"classify_structure",
                  "linear / affine relation, isometry (A constant), projection (A a normal cone)"},
                 Use::map, with_sampling({}),
                 [](const Target& t, const CheckParams& p) {
                   const Map& m = map_of(t);
                   return from_report(classify_structure(m, p.config(m.dim(), 500)), &m);
                 }});
    d.push_back({{"estimate_uniform_modulus",
                  "binned inf of <dx,du> against |dx|, a sampled uniform-monotonicity modulus"},
                 Use::op, with_sampling({"bins"}),
                 [](const Target& t, const CheckParams& p) {
                   const auto& a = op_of(t);
                   const auto m = estimate_uniform_modulus(sample_graph(a, p.config(a.dim(), 100)),
                                                           p.integer_or("bins", 8));
                   Outcome o;
                   o.body = to_json(m);
                   o.labels["nondecreasing"] = m.nondecreasing ? "true" : "false";
                   for (std::size_t k = 0; k < m.bin_inf.size(); ++k)
                     if (m.bin_inf[k]) o.constants["bin_inf_" + std::to_string(k)] = *m.bin_inf[k];
                   return o;
                 }});
    d.push_back({{"check_resolvent_identity", "J_A + J_{A^-1} = Id at sampled points"},
                 Use::op, with_sampling({}),
                 [](const Target& t, const CheckParams& p) {
                   const auto& a = op_of(t);
                   const Map& j = a.resolvent();
                   const Map ji = inverse(a).resolvent();
                   double worst = 0.0;
                   Vector arg;
                   for (const auto& x : sample_points(p.config(a.dim(), 1000), 0)) {
                     const double e = (j(x) + ji(x) - x).norm();
                     if (e >= worst || arg.size() == 0) {
                       worst = e;
                       arg = x;
                     }
                   }
                   Outcome o;
                   o.verdict = worst <= tol::linear ? Verdict::holds_on_samples : Verdict::violated;
                   o.constants["max_error"] = worst;
                   o.body = {{"verdict", to_string(*o.verdict)}, {"max_error", worst}, {"worst_point", to_json(arg)}};
                   return o;
                 }});
    d.push_back({{"run_duality_suite",
                  "dual and self-dual properties checked on (A, J_A) and (A^-1, Id - J_A)"},
                 Use::op, with_sampling({"n_max"}),
                 [](const Target& t, const CheckParams& p) {
                   const auto& a = op_of(t);
                   const auto r = run_duality_suite(a, p.config(a.dim(), 300), p.integer_or("n_max", 4));
                   Outcome o;
                   o.body = to_json(r);
                   o.labels["consistent"] = r.consistent() ? "true" : "false";
                   for (const auto& row : r.rows) {
                     o.flags[row.property_id + ".primal"] = to_string(row.verdict_primal);
                     o.flags[row.property_id + ".dual"] = to_string(row.verdict_dual);
                     o.labels[row.property_id] = row.consistent ? "consistent" : "inconsistent";
                     if (row.trend_primal) o.labels[row.property_id + ".trend"] = *row.trend_primal;
                   }
                   return o;
                 }});
    d.push_back({{"surjectivity_probe",
                  "multistart search for T(x) = y; surjectivity and full domain are dual"},
                 Use::map, with_sampling({"targets"}),
                 [](const Target& t, const CheckParams& p) {
                   const Map& m = map_of(t);
                   return from_report(surjectivity_probe(m, p.vectors("targets"), p.config(m.dim(), 8)), &m);
                 }});
    d.push_back({{"analyze_reflected_contraction",
                  "2J_A - Id a beta-contraction, with its two equivalent graph and resolvent forms"},
                 Use::op, with_sampling({}),
                 [](const Target& t, const CheckParams& p) {
                   const auto& a = op_of(t);
                   return from_contraction(analyze_reflected_contraction(a, p.config(a.dim(), 1000)));
                 }});
    d.push_back({{"check_reflected_conditions",
                  "the three equivalent reflected-resolvent contraction conditions at a given beta"},
                 Use::op, with_sampling({"beta"}),
                 [](const Target& t, const CheckParams& p) {
                   const auto& a = op_of(t);
                   return from_contraction(check_reflected_conditions(a, p.num("beta"), p.config(a.dim(), 1000)));
                 }});
    d.push_back({{"check_strong_mono_via_reflected",
                  "A eps-strongly monotone <=> eps Id + (1+eps)(2J_A - Id) nonexpansive"},
                 Use::op, with_sampling({"epsilon"}),
                 [](const Target& t, const CheckParams& p) {
                   const auto& a = op_of(t);
                   return from_report(check_strong_mono_via_reflected(a, p.num("epsilon"), p.config(a.dim(), 1000)),
                                      &a.resolvent());
                 }});
    d.push_back({{"picard_iterate", "Banach-Picard iteration x <- T(x) with optional CSV trace"},
                 Use::map, {"x0", "max_iter", "stop_tol", "csv"},
                 [](const Target& t, const CheckParams& p) {
                   const Map& m = map_of(t);
                   const auto tr = picard_iterate(m, p.vector("x0"), p.integer_or("max_iter", 1000),
                                                  p.num("stop_tol", 1e-9));
                   Outcome o;
                   o.body = to_json(tr);
                   if (const auto csv = p.str("csv")) {
                     std::ostringstream s;
                     write_trace_csv(tr, s);
                     write_file_atomically(*csv, s.str());
                     o.body["csv"] = *csv;
                   }
                   o.labels["converged"] = tr.converged ? "true" : "false";
                   o.labels["diverged"] = tr.diverged ? "true" : "false";
                   o.constants["iterations_used"] = tr.iterations_used;
                   o.constants["final_residual"] = tr.residuals.back();
                   if (tr.limit_point) o.constants["limit_norm"] = tr.limit_point->norm();
                   return o;
                 }});
    d.push_back({{"multi_start_fixed_points",
                  "Picard iteration from random starts; Fix T empty or a singleton for strict maps"},
                 Use::map, with_sampling({"max_iter", "stop_tol", "cluster_tol"}),
                 [](const Target& t, const CheckParams& p) {
                   const Map& m = map_of(t);
                   const auto ev = multi_start_fixed_points(m, p.config(m.dim(), 10), p.integer_or("max_iter", 1000),
                                                            p.num("stop_tol", 1e-9), p.num("cluster_tol", 1e-6));
                   Outcome o;
                   o.body = to_json(ev);
                   o.labels["classification"] = ev.classification;
                   o.constants["diameter"] = ev.diameter;
                   o.constants["converged_starts"] = ev.converged_starts;
                   int longest = 0;
                   for (const auto& tr : ev.traces) longest = std::max(longest, tr.iterations_used);
                   o.constants["max_iterations_used"] = longest;
                   return o;
                 }});
    return d;
  }();
  return defs;
}

const CheckDef* find_check(const std::string& id) {
  for (const auto& d : registry())
    if (d.info.id == id) return &d;
  return nullptr;
}

void validate_expect(const json& e, const std::string& path) {
  if (!e.is_object()) schema(path, "expected an object");
  only_keys(e, {"verdict", "constants", "flags", "labels"}, path);
  if (e.contains("verdict")) {
    guarded(sub(path, "verdict"), [&] { return parse_verdict(text(e["verdict"], sub(path, "verdict"))); });
  }
  if (e.contains("constants")) {
    const json& cs = e["constants"];
    if (!cs.is_object()) schema(sub(path, "constants"), "expected an object");
    for (const auto& [k, v] : cs.items()) {
      const std::string p = sub(sub(path, "constants"), k);
      if (v.is_number()) continue;
      only_keys(v, {"value", "tol", "min", "max"}, p);
      if (v.contains("value") != v.contains("tol")) schema(p, "'value' and 'tol' go together");
      if (!v.contains("value") && !v.contains("min") && !v.contains("max")) schema(p, "empty bound");
      for (const auto& [bk, bv] : v.items()) number(bv, sub(p, bk));
    }
  }
  if (e.contains("flags")) {
    const json& fs = e["flags"];
    if (!fs.is_object()) schema(sub(path, "flags"), "expected an object");
    for (const auto& [k, v] : fs.items()) {
      const std::string p = sub(sub(path, "flags"), k);
      guarded(p, [&] { return parse_verdict(text(v, p)); });
    }
  }
  if (e.contains("labels") && !e["labels"].is_object()) schema(sub(path, "labels"), "expected an object");
}

CheckSpec Loader::parse_check(const json& j, std::size_t index, const Experiment& e) {
  const std::string path = "$.checks[" + std::to_string(index) + "]";
  if (!j.is_object()) schema(path, "expected an object");
  CheckSpec c;
  c.index = index;
  c.id = text(field(j, "id", path), sub(path, "id"));
  const CheckDef* def = find_check(c.id);
  if (!def) throw SpecError(ExitCode::unknown_check, path + ": unknown check id '" + c.id + "'");

  const bool has_op = j.contains("operator");
  const bool has_map = j.contains("map");
  if (has_op == has_map) schema(path, "exactly one of 'operator' or 'map' is required");
  c.target_kind = has_op ? "operator" : "map";
  c.target = text(j[c.target_kind], sub(path, c.target_kind));
  int dim = 0;
  if (has_op) {
    const auto it = e.operators.find(c.target);
    if (it == e.operators.end()) schema(sub(path, "operator"), "undeclared operator '" + c.target + "'");
    dim = it->second.dim();
  } else {
    const auto it = e.maps.find(c.target);
    if (it == e.maps.end()) schema(sub(path, "map"), "undeclared map '" + c.target + "'");
    dim = it->second.dim();
  }

  for (const auto& [k, v] : j.items()) {
    if (k == "id" || k == "operator" || k == "map") continue;
    if (k == "expect") {
      validate_expect(v, sub(path, "expect"));
      c.expect = v;
      continue;
    }
    if (std::find(def->params.begin(), def->params.end(), k) == def->params.end()) {
      schema(sub(path, k), "parameter not accepted by " + c.id);
    }
    c.params[k] = v;
  }

  auto dim_error = [&](const std::string& p, long got) {
    throw SpecError(ExitCode::dimension_mismatch, p + ": dimension " + std::to_string(got) +
                                                      " does not match target dimension " +
                                                      std::to_string(dim));
  };
  if (c.params.contains("dim")) {
    const int declared = integer(c.params["dim"], sub(path, "dim"));
    if (declared != dim) dim_error(sub(path, "dim"), declared);
  }
  if (c.params.contains("x0")) {
    const Vector x0 = vec(c.params["x0"], sub(path, "x0"));
    if (x0.size() != dim) dim_error(sub(path, "x0"), static_cast<long>(x0.size()));
  }
  if (c.params.contains("targets")) {
    const CheckParams p(c.params, path);
    for (const auto& y : p.vectors("targets"))
      if (y.size() != dim) dim_error(sub(path, "targets"), static_cast<long>(y.size()));
  }
  if (std::find(def->params.begin(), def->params.end(), "seed") != def->params.end() &&
      !c.params.contains("seed")) {
    schema(path, "missing field 'seed'");
  }
  return c;
}

// ---------------------------------------------------------------------------
// Expectations and running

std::string show(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

std::vector<std::string> compare(const Outcome& o, const json& expect) {
  std::vector<std::string> fails;
  if (expect.contains("verdict")) {
    const Verdict want = parse_verdict(expect["verdict"].get<std::string>());
    if (!o.verdict) {
      fails.push_back("verdict expected but the check reports none");
    } else if (*o.verdict != want) {
      fails.push_back("verdict " + to_string(*o.verdict) + ", expected " + to_string(want));
    }
  }
  if (expect.contains("constants")) {
    for (const auto& [k, b] : expect["constants"].items()) {
      const auto it = o.constants.find(k);
      if (it == o.constants.end()) {
        fails.push_back("constant '" + k + "' not reported");
        continue;
      }
      const double v = it->second;
      if (b.is_number()) {
        if (v != b.get<double>()) fails.push_back(k + " = " + show(v) + ", expected " + show(b.get<double>()));
        continue;
      }
      if (b.contains("value") && !(std::abs(v - b["value"].get<double>()) <= b["tol"].get<double>())) {
        fails.push_back(k + " = " + show(v) + ", expected " + show(b["value"].get<double>()) + " +- " +
                        show(b["tol"].get<double>()));
      }
      if (b.contains("min") && !(v >= b["min"].get<double>()))
        fails.push_back(k + " = " + show(v) + " below " + show(b["min"].get<double>()));
      if (b.contains("max") && !(v <= b["max"].get<double>()))
        fails.push_back(k + " = " + show(v) + " above " + show(b["max"].get<double>()));
    }
  }
  if (expect.contains("flags")) {
    for (const auto& [k, want] : expect["flags"].items()) {
      const auto it = o.flags.find(k);
      const std::string w = to_string(parse_verdict(want.get<std::string>()));
      if (it == o.flags.end()) {
        fails.push_back("flag '" + k + "' not reported");
      } else if (it->second != w) {
        fails.push_back("flag " + k + " = " + it->second + ", expected " + w);
      }
    }
  }
  if (expect.contains("labels")) {
    for (const auto& [k, want] : expect["labels"].items()) {
      const std::string w = want.is_string() ? want.get<std::string>() : want.dump();
      const auto it = o.labels.find(k);
      if (it == o.labels.end()) {
        fails.push_back("label '" + k + "' not reported");
      } else if (it->second != w) {
        fails.push_back("label " + k + " = " + it->second + ", expected " + w);
      }
    }
  }
  return fails;
}

struct Slot {
  json result;
  ExitCode error = ExitCode::ok;
  bool expectation_failed = false;
  double ms = 0.0;
};

Slot run_one(const Experiment& e, const CheckSpec& c) {
  Slot s;
  const auto start = std::chrono::steady_clock::now();
  const CheckDef& def = *find_check(c.id);
  s.result = {{"index", c.index}, {"id", c.id}, {"target", {{"kind", c.target_kind}, {"name", c.target}}}};

  Target t;
  t.kind = c.target_kind;
  t.name = c.target;
  if (c.target_kind == "operator") {
    t.op = e.operators.at(c.target);
    t.map = t.op->resolvent();
  } else {
    t.map = e.maps.at(c.target);
    if (def.use == Use::op) t.op = from_firm(*t.map, c.target);
  }
  s.result["target"]["describe"] = t.map->describe();

  auto fail = [&](ExitCode code, const char* kind, const std::string& msg) {
    s.error = code;
    s.result["error"] = {{"kind", kind}, {"message", msg}};
  };
  try {
    const CheckParams p(c.params, "$.checks[" + std::to_string(c.index) + "]");
    Outcome o = def.run(t, p);
    s.result["outcome"] = std::move(o.body);
    if (c.expect) {
      const auto fails = compare(o, *c.expect);
      s.expectation_failed = !fails.empty();
      s.result["expectation"] = {{"declared", *c.expect}, {"met", fails.empty()}, {"failures", fails}};
    }
  } catch (const SpecError& ex) {
    fail(ex.code(), "spec", ex.what());
  } catch (const DimensionError& ex) {
    fail(ExitCode::dimension_mismatch, "dimension", ex.what());
  } catch (const ConvergenceError& ex) {
    fail(ExitCode::numerical_failure, "convergence", ex.what());
  } catch (const SingularMatrixError& ex) {
    fail(ExitCode::numerical_failure, "singular_matrix", ex.what());
  } catch (const MonotonicityError& ex) {
    fail(ExitCode::numerical_failure, "monotonicity", ex.what());
  } catch (const InvalidArgument& ex) {
    fail(ExitCode::schema_error, "invalid_argument", ex.what());
  } catch (const std::exception& ex) {
    fail(ExitCode::numerical_failure, "internal", ex.what());
  }
  s.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return s;
}

}  // namespace

const std::vector<CheckInfo>& check_catalogue() {
  static const std::vector<CheckInfo> infos = [] {
    std::vector<CheckInfo> out;
    for (const auto& d : registry()) out.push_back(d.info);
    return out;
  }();
  return infos;
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

Experiment load_experiment(const std::string& text, const std::string& name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // e.byte is the 1-based offset of the character that failed.
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1;
    std::size_t line_start = 0;
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        line_start = i + 1;
      }
    }
    std::string msg = e.what();
    if (const auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw SpecError(ExitCode::parse_error, name + ":" + std::to_string(line) + ":" +
                                               std::to_string(end - line_start + 1) + ": " + msg);
  }
  try {
    return Loader(doc).load(name, fnv1a_hex(text));
  } catch (const json::exception& e) {
    throw SpecError(ExitCode::schema_error, name + ": " + e.what());
  }
}

RunResult run_experiment(const Experiment& e, const RunOptions& opts) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Slot> slots(e.checks.size());
  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(e.checks.size())));
  if (jobs == 1) {
    for (std::size_t i = 0; i < e.checks.size(); ++i) slots[i] = run_one(e, e.checks[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < e.checks.size(); i = next++) slots[i] = run_one(e, e.checks[i]);
      });
    }
    for (auto& th : pool) th.join();
  }

  RunResult out;
  json results = json::array();
  json timings = json::array();
  std::size_t declared = 0;
  std::size_t unmet = 0;
  std::size_t errors = 0;
  for (auto& s : slots) {
    if (s.result.contains("expectation")) ++declared;
    if (s.expectation_failed) ++unmet;
    if (s.error != ExitCode::ok) {
      ++errors;
      if (out.code == ExitCode::ok) out.code = s.error;
    }
    timings.push_back(s.ms);
    results.push_back(std::move(s.result));
  }
  if (out.code == ExitCode::ok && unmet > 0) out.code = ExitCode::expectation_failed;

  out.document = {
      {"tool", "minty"},
      {"version", MINTY_VERSION},
      {"spec", e.name},
      {"spec_hash", "fnv1a64:" + e.hash},
      {"results", std::move(results)},
      {"summary",
       {{"checks", e.checks.size()},
        {"expectations_declared", declared},
        {"expectations_unmet", unmet},
        {"errors", errors},
        {"ok", out.code == ExitCode::ok}}},
      {"timing",
       {{"check_ms", std::move(timings)},
        {"total_ms",
         std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count()},
        {"jobs", jobs}}},
  };
  return out;
}

std::string render_text(const json& doc) {
  std::ostringstream s;
  s << doc.value("tool", "") << ' ' << doc.value("version", "") << "  spec " << doc.value("spec", "")
    << " (" << doc.value("spec_hash", "") << ")\n";
  for (const auto& r : doc["results"]) {
    s << '#' << r["index"].get<std::size_t>() << ' ' << r["id"].get<std::string>() << "  "
      << r["target"]["kind"].get<std::string>() << ' ' << r["target"]["name"].get<std::string>();
    if (r.contains("error")) {
      s << "  ERROR " << r["error"]["kind"].get<std::string>() << ": "
        << r["error"]["message"].get<std::string>() << '\n';
      continue;
    }
    const json& o = r["outcome"];
    if (o.contains("verdict")) s << "  " << o["verdict"].get<std::string>();
    if (o.contains("classification")) s << "  " << o["classification"].get<std::string>();
    if (o.contains("consistent")) s << (o["consistent"].get<bool>() ? "  consistent" : "  INCONSISTENT");
    if (o.contains("converged")) s << (o["converged"].get<bool>() ? "  converged" : "  not converged");
    if (r.contains("expectation")) {
      s << (r["expectation"]["met"].get<bool>() ? "  [expected]" : "  [UNEXPECTED]");
    }
    s << '\n';
    if (o.contains("constants")) {
      for (const auto& [k, v] : o["constants"].items()) s << "    " << k << " = " << v.dump() << '\n';
    }
    if (o.contains("beta_estimate")) s << "    beta = " << o["beta_estimate"].dump() << '\n';
    if (r.contains("expectation"))
      for (const auto& f : r["expectation"]["failures"]) s << "    ! " << f.get<std::string>() << '\n';
  }
  const json& sum = doc["summary"];
  s << sum["checks"].get<std::size_t>() << " checks, " << sum["expectations_unmet"].get<std::size_t>()
    << " unmet expectations, " << sum["errors"].get<std::size_t>() << " errors\n";
  return s.str();
}

void write_file_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SpecError(ExitCode::io_error, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw SpecError(ExitCode::io_error, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw SpecError(ExitCode::io_error, "cannot move output into place at " + path + ": " + ec.message());
  }
}

}  // namespace minty
