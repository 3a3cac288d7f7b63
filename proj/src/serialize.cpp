#include "minty/serialize.hpp"

namespace minty {

using nlohmann::json;

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

json to_json(const Witness& w) {
  json pts = json::array();
  for (const auto& p : w.points) pts.push_back(to_json(p));
  return {{"inequality", to_string(w.inequality)},
          {"points", std::move(pts)},
          {"params", w.params},
          {"lhs", w.lhs},
          {"rhs", w.rhs},
          {"margin", w.margin}};
}

json to_json(const SubCheck& s) {
  json out{{"verdict", to_string(s.verdict)}};
  if (s.witness) out["witness"] = to_json(*s.witness);
  return out;
}

json to_json(const PropertyReport& r) {
  json out{{"property_id", r.property_id},
           {"verdict", to_string(r.verdict)},
           {"constants", r.constants},
           {"sample_count", r.sample_count},
           {"seed", r.seed}};
  if (!r.target.empty()) out["target"] = r.target;
  if (r.witness) out["witness"] = to_json(*r.witness);
  if (!r.flags.empty()) {
    json flags = json::object();
    for (const auto& [k, v] : r.flags) flags[k] = to_json(v);
    out["flags"] = std::move(flags);
  }
  if (!r.labels.empty()) out["labels"] = r.labels;
  if (!r.notes.empty()) out["notes"] = r.notes;
  return out;
}

json to_json(const ModulusEstimate& m) {
  json inf = json::array();
  for (const auto& v : m.bin_inf) inf.push_back(v ? json(*v) : json("empty"));
  return {{"bin_edges", m.bin_edges},
          {"bin_inf", std::move(inf)},
          {"bin_counts", m.bin_counts},
          {"nondecreasing", m.nondecreasing},
          {"note", m.note}};
}

json to_json(const DualityRow& row) {
  json out{{"property_id", row.property_id},
           {"relation", to_string(row.relation)},
           {"verdict_primal", to_string(row.verdict_primal)},
           {"verdict_dual", to_string(row.verdict_dual)},
           {"consistent", row.consistent}};
  if (row.relation == Relation::dual_pair) out["partner_id"] = row.partner_id;
  if (row.trend_primal) out["trend_primal"] = *row.trend_primal;
  if (row.trend_dual) out["trend_dual"] = *row.trend_dual;
  if (row.report_primal) out["report_primal"] = to_json(*row.report_primal);
  if (row.report_dual) out["report_dual"] = to_json(*row.report_dual);
  return out;
}

json to_json(const DualitySuiteResult& d) {
  json rows = json::array();
  for (const auto& r : d.rows) rows.push_back(to_json(r));
  return {{"target", d.target}, {"seed", d.seed}, {"consistent", d.consistent()}, {"rows", std::move(rows)}};
}

json to_json(const ContractionAnalysis& c) {
  return {{"target", c.target},
          {"beta_estimate", c.beta_estimate},
          {"exact", c.exact},
          {"condition_i", to_json(c.condition_i)},
          {"condition_ii", to_json(c.condition_ii)},
          {"condition_iii", to_json(c.condition_iii)},
          {"agree", c.agree},
          {"sample_count", c.sample_count},
          {"seed", c.seed}};
}

json to_json(const IterationTrace& t, std::size_t max_inline_residuals) {
  json out{{"iterations_used", t.iterations_used},
           {"converged", t.converged},
           {"diverged", t.diverged},
           {"final_residual", t.residuals.empty() ? 0.0 : t.residuals.back()},
           {"final_iterate", to_json(t.iterates.back())}};
  if (t.limit_point) out["limit_point"] = to_json(*t.limit_point);
  if (t.residuals.size() <= max_inline_residuals) out["residuals"] = t.residuals;
  return out;
}

json to_json(const FixedPointEvidence& e) {
  json traces = json::array();
  for (const auto& t : e.traces) traces.push_back(to_json(t, 0));
  return {{"classification", e.classification},
          {"diameter", e.diameter},
          {"converged_starts", e.converged_starts},
          {"starts", e.traces.size()},
          {"traces", std::move(traces)}};
}

Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw InvalidArgument("expected an array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InvalidArgument("expected an array of numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw InvalidArgument("expected a nonempty array of rows");
  const auto cols = j[0].is_array() ? j[0].size() : 0;
  Matrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Vector row = vector_from_json(j[r]);
    if (static_cast<std::size_t>(row.size()) != cols) throw InvalidArgument("ragged matrix rows");
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

}  // namespace minty
