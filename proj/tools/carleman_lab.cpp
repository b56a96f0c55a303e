// Command-line front end: parses one experiment config, dispatches a
// subcommand through run_experiment, prints the check ledger, and maps
// library errors to a machine-readable record on stderr (exit 2).

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <typeinfo>
#include <utility>
#include <vector>

#if defined(__GNUG__)
#include <cxxabi.h>
#endif

#include <CLI11.hpp>
#include <json.hpp>

#include "carlab/errors.hpp"
#include "carlab/experiment.hpp"

namespace {

std::string error_kind(const std::exception& e) {
  const char* raw = typeid(e).name();
  std::string out = raw;
#if defined(__GNUG__)
  int status = 0;
  char* dem = abi::__cxa_demangle(raw, nullptr, nullptr, &status);
  if (status == 0 && dem) out = dem;
  std::free(dem);
#endif
  const std::string ns = "carlab::";
  if (out.rfind(ns, 0) == 0) out = out.substr(ns.size());
  return out;
}

void emit_error_record(const std::string& subcommand, const std::exception& e) {
  nlohmann::json rec;
  rec["error"] = error_kind(e);
  rec["message"] = e.what();
  rec["subcommand"] = subcommand;
  std::cerr << rec.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for weighted estimates of the transport equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  unsigned long long seed = 0;
  bool require_observability = false;

  const std::vector<std::pair<std::string, std::string>> subs = {
      {"partition", "split the horizon so the direction field stays inside each cone"},
      {"weight", "assemble the piecewise quadratic weight and check its pointwise bounds"},
      {"solve", "transport the initial profile exactly along characteristics"},
      {"verify-carleman", "measure both sides of the weighted estimate over a solution family"},
      {"verify-observability", "compare boundary traces against peak interior norms"},
      {"counterexample", "run the rotating bump whose boundary trace vanishes"},
  };
  for (const auto& [name, desc] : subs) {
    auto* cmd = app.add_subcommand(name, desc);
    cmd->add_option("--config", config_path, "experiment description (json)")
        ->required();
    cmd->add_option("--out", out_dir, "output directory (overrides output.dir)");
    cmd->add_option("--seed", seed, "seed for the manufactured solution family");
    cmd->add_flag("--require-observability", require_observability,
                  "promote the observability time condition to a hard check");
  }

  CLI11_PARSE(app, argc, argv);

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    const carlab::ExperimentConfig config = carlab::load_config(config_path);
    const carlab::RunArtifact art =
        carlab::run_experiment(config, sub, seed, require_observability, out_dir);

    for (const auto& c : art.checks) {
      std::printf("%-4s %-4s %-44s %s%s%s\n", c.pass ? "ok" : "FAIL",
                  c.hard ? "hard" : "info", c.name.c_str(),
                  carlab::format_g17(c.value).c_str(), c.note.empty() ? "" : "  ",
                  c.note.c_str());
    }
    for (const auto& p : art.csv_paths) std::printf("wrote %s\n", p.c_str());
    return art.exit_code;
  } catch (const carlab::Error& e) {
    emit_error_record(sub, e);
    return 2;
  } catch (const std::exception& e) {
    emit_error_record(sub, e);
    return 3;
  }
}
