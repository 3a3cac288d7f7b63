#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "minty/experiment.hpp"

namespace {

int code(minty::ExitCode c) { return static_cast<int>(c); }

int run(const std::string& spec_path, const std::string& out_opt, const std::string& format_opt,
        int jobs) {
  using minty::ExitCode;
  std::ifstream in(spec_path, std::ios::binary);
  if (!in) {
    std::cerr << "minty: cannot read " << spec_path << '\n';
    return code(ExitCode::io_error);
  }
  std::stringstream buf;
  buf << in.rdbuf();

  const std::string name = std::filesystem::path(spec_path).filename().string();
  try {
    const auto exp = minty::load_experiment(buf.str(), name);
    const std::string format = !format_opt.empty() ? format_opt : exp.output_format.value_or("json");
    if (format != "json" && format != "text") {
      std::cerr << "minty: unknown format '" << format << "'\n";
      return code(ExitCode::usage);
    }
    const auto result = minty::run_experiment(exp, {jobs});
    const std::string rendered =
        format == "json" ? result.document.dump(2) + "\n" : minty::render_text(result.document);
    const std::string out = !out_opt.empty() ? out_opt : exp.output_path.value_or("");
    if (out.empty() || out == "-") {
      std::cout << rendered;
    } else {
      minty::write_file_atomically(out, rendered);
    }
    const auto& sum = result.document["summary"];
    std::cerr << "minty: " << sum["checks"] << " checks, " << sum["expectations_unmet"]
              << " unmet expectations, " << sum["errors"] << " errors\n";
    for (const auto& r : result.document["results"]) {
      if (r.contains("error")) {
        std::cerr << "  #" << r["index"] << ' ' << r["id"].get<std::string>() << ": "
                  << r["error"]["message"].get<std::string>() << '\n';
      } else if (r.contains("expectation") && !r["expectation"]["met"].get<bool>()) {
        for (const auto& f : r["expectation"]["failures"])
          std::cerr << "  #" << r["index"] << ' ' << r["id"].get<std::string>() << ": "
                    << f.get<std::string>() << '\n';
      }
    }
    return code(result.code);
  } catch (const minty::SpecError& e) {
    std::cerr << "minty: " << e.what() << '\n';
    return code(e.code());
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampled checks of firmly nonexpansive maps and maximally monotone operators"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out;
  std::string format;
  int jobs = 1;
  auto* run_cmd = app.add_subcommand("run", "Run the checks declared in a JSON spec");
  run_cmd->add_option("spec", spec_path, "Spec file")->required();
  run_cmd->add_option("--out", out, "Report path ('-' for stdout)");
  run_cmd->add_option("--format", format, "json or text")->check(CLI::IsMember({"json", "text"}));
  run_cmd->add_option("--jobs", jobs, "Checks run concurrently")->check(CLI::PositiveNumber);

  auto* list_cmd = app.add_subcommand("list-checks", "List check ids");
  auto* version_cmd = app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : code(minty::ExitCode::usage);
  }

  if (*run_cmd) return run(spec_path, out, format, jobs);
  if (*list_cmd) {
    for (const auto& c : minty::check_catalogue()) {
      std::cout << c.id << std::string(c.id.size() < 34 ? 34 - c.id.size() : 1, ' ') << c.summary << '\n';
    }
    return 0;
  }
  if (*version_cmd) std::cout << "minty " << MINTY_VERSION << '\n';
  return 0;
}
