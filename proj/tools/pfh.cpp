// pfh: periodic-domain phase-field toolkit.
//
//   pfh <mode> [--config file.json] [--set key=value ...] [--out dir]
//   pfh preset <name> [--out dir]
//
// Modes: flow, homogenize, profile, counterexample, stochastic, energy.
// All outputs land under --out; on failure the last stdout line is a
// machine-readable error JSON and the exit code is nonzero.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pfh/config.hpp"
#include "pfh/io.hpp"
#include "pfh/runner.hpp"
#include "pfh/version.hpp"

namespace {

struct ModeArgs {
  std::string config_file;
  std::string preset_name;
  std::vector<std::string> overrides;
  std::string out_dir = "pfh_out";
};

int fail_json(const std::string& type, const std::string& message, int code) {
  pfh::json err{{"error", {{"type", type}, {"message", message}}}};
  std::cout << err.dump() << std::endl;
  return code;
}

void check_thread_cap() {
  // Computation is deterministic and single-threaded; the cap is validated so
  // configs stay portable to parallel builds.
  if (const char* env = std::getenv("PFH_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw pfh::ConfigError("PFH_THREADS must be a positive integer, got '" + std::string(env) + "'");
  }
}

int run_mode(const std::string& mode, const ModeArgs& args) {
  check_thread_cap();
  pfh::json doc;
  if (!args.preset_name.empty()) {
    doc = pfh::preset(args.preset_name);
    if (doc.at("mode") != mode)
      throw pfh::ConfigError("preset '" + args.preset_name + "' is a " +
                             doc.at("mode").get<std::string>() + " config, not " + mode);
  } else if (!args.config_file.empty()) {
    try {
      doc = pfh::json::parse(pfh::read_text(args.config_file), nullptr, true, true);
    } catch (const pfh::json::parse_error& e) {
      throw pfh::ConfigError(args.config_file + ": " + e.what());
    }
  } else {
    doc = pfh::json{{"mode", mode}};
  }
  doc["mode"] = mode;
  for (const std::string& ov : args.overrides) pfh::apply_override(doc, ov);

  const pfh::RunConfig rc = pfh::parse_config(doc);
  const pfh::RunManifest manifest = pfh::run(rc, args.out_dir);
  std::cout << (std::filesystem::path(args.out_dir) / "manifest.json").string() << std::endl;
  std::cerr << "done in " << pfh::format_double(manifest.wall_time_s) << " s, "
            << manifest.outputs.size() << " output(s) under " << args.out_dir << "\n";
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"periodic-domain phase-field simulation and verification toolkit"};
  app.set_version_flag("--version", std::string(pfh::version));
  app.require_subcommand(1);

  const std::vector<std::string> modes = {"flow",           "homogenize", "profile",
                                          "counterexample", "stochastic", "energy"};
  std::map<std::string, ModeArgs> mode_args;
  for (const std::string& mode : modes) {
    auto* sub = app.add_subcommand(mode, mode + " run");
    ModeArgs& args = mode_args[mode];
    sub->add_option("--config", args.config_file, "JSON config file");
    if (mode == "flow")
      sub->add_option("--preset", args.preset_name,
                      "built-in experiment preset (hex, random, wells, exponent, homogeneous)");
    sub->add_option("--set", args.overrides, "dotted-path override, e.g. potential.delta=0.2");
    sub->add_option("--out", args.out_dir, "output directory");
  }

  std::string preset_name;
  std::string preset_out;
  auto* preset_cmd = app.add_subcommand("preset", "print a full experiment config");
  preset_cmd->add_option("name", preset_name, "hex, random, wells, exponent or homogeneous")
      ->required();
  preset_cmd->add_option("--out", preset_out, "also write the config to <out>/config.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (preset_cmd->parsed()) {
      const pfh::json doc = pfh::preset(preset_name);
      std::cout << doc.dump(2) << std::endl;
      if (!preset_out.empty()) {
        std::filesystem::create_directories(preset_out);
        pfh::write_text(std::filesystem::path(preset_out) / "config.json", doc.dump(2) + "\n");
      }
      return 0;
    }
    for (const std::string& mode : modes)
      if (app.get_subcommand(mode)->parsed()) return run_mode(mode, mode_args[mode]);
    return fail_json("usage", "no subcommand given", 1);
  } catch (const pfh::ConfigError& e) {
    return fail_json("config", e.what(), 1);
  } catch (const std::exception& e) {
    return fail_json("runtime", e.what(), 2);
  }
}
