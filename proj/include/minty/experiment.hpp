#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "minty/catalog.hpp"

namespace minty {

/// Process exit codes of the `run` command.
enum class ExitCode : int {
  ok = 0,
  expectation_failed = 1,
  usage = 2,
  parse_error = 3,
  schema_error = 4,
  unknown_check = 5,
  dimension_mismatch = 6,
  numerical_failure = 7,
  io_error = 8,
};

/// Load-time failure carrying the exit code it maps to.
class SpecError : public Error {
 public:
  SpecError(ExitCode code, const std::string& what) : Error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

struct CheckInfo {
  std::string id;
  std::string summary;
};

/// Every check id accepted in a spec, in a fixed order.
const std::vector<CheckInfo>& check_catalogue();

struct CheckSpec {
  std::size_t index = 0;
  std::string id;
  /// "operator" or "map".
  std::string target_kind;
  std::string target;
  nlohmann::json params = nlohmann::json::object();
  std::optional<nlohmann::json> expect;
};

struct Experiment {
  std::string name;
  std::string hash;
  std::map<std::string, MonotoneOperator> operators;
  std::map<std::string, Map> maps;
  std::vector<CheckSpec> checks;
  std::optional<std::string> output_path;
  std::optional<std::string> output_format;
};

/// Parses and validates a spec document: every reference resolves, every
/// check id is known, dimensions match. Throws SpecError.
Experiment load_experiment(const std::string& text, const std::string& name = "spec");

struct RunOptions {
  int jobs = 1;
};

struct RunResult {
  nlohmann::json document;
  ExitCode code = ExitCode::ok;
};

/// Runs the checks (in parallel when jobs > 1) and assembles the report in
/// declaration order. Timing lives under the top-level "timing" key only.
RunResult run_experiment(const Experiment& e, const RunOptions& opts = {});

std::string render_text(const nlohmann::json& document);

/// Writes through a temporary file in the same directory and renames it.
void write_file_atomically(const std::string& path, const std::string& content);

/// 64-bit FNV-1a, as 16 hex digits.
std::string fnv1a_hex(const std::string& data);

}  // namespace minty
