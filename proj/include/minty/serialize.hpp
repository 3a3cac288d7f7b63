#pragma once

#include <json.hpp>

#include "minty/duality.hpp"
#include "minty/splitting.hpp"

namespace minty {

nlohmann::json to_json(const Vector& v);
nlohmann::json to_json(const Witness& w);
nlohmann::json to_json(const SubCheck& s);
nlohmann::json to_json(const PropertyReport& r);
nlohmann::json to_json(const ModulusEstimate& m);
nlohmann::json to_json(const DualityRow& row);
nlohmann::json to_json(const DualitySuiteResult& d);
nlohmann::json to_json(const ContractionAnalysis& c);
/// Summary of a trace; the residual history is inlined up to
/// `max_inline_residuals` entries (use write_trace_csv for the rest).
nlohmann::json to_json(const IterationTrace& t, std::size_t max_inline_residuals = 200);
nlohmann::json to_json(const FixedPointEvidence& e);

Vector vector_from_json(const nlohmann::json& j);
/// Row-major nested arrays.
Matrix matrix_from_json(const nlohmann::json& j);

}  // namespace minty
