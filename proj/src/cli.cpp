#include "relu/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "relu/pipeline.hpp"
#include "relu/presets.hpp"

namespace relu {

namespace {

struct CliOptions {
  std::string config_path;
  std::string preset_name;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<long> coeff_bound;
  std::optional<std::size_t> max_minors;
  std::vector<std::size_t> grid;
  bool no_timing = false;
  bool list = false;
};

void add_common_options(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("-c,--config", opts.config_path, "analysis config JSON");
  cmd->add_option("--preset", opts.preset_name, "built-in configuration name");
  cmd->add_option("--out", opts.out_path, "write the result here instead of stdout");
  cmd->add_option("--seed", opts.seed, "master seed for the sample streams");
  cmd->add_option("--samples", opts.samples, "verification samples per constraint");
  cmd->add_option("--coeff-bound", opts.coeff_bound, "integer sampling bound");
  cmd->add_option("--max-minors", opts.max_minors, "cap on materialized minors");
  cmd->add_option("--grid", opts.grid, "region grid width and height")->expected(2);
  cmd->add_flag("--no-timing", opts.no_timing, "omit the timing section");
}

AnalysisConfig load_config(const CliOptions& opts) {
  if (!opts.config_path.empty() && !opts.preset_name.empty()) {
    throw ConfigError("config error: pass either --config or --preset, not both");
  }
  AnalysisConfig config;
  if (!opts.preset_name.empty()) {
    config = preset_config(opts.preset_name);
  } else if (!opts.config_path.empty()) {
    config = config_from_file(opts.config_path);
  } else {
    throw ConfigError("config error: a --config file or --preset name is required");
  }
  if (opts.seed) config.verify.master_seed = *opts.seed;
  if (opts.samples) config.verify.num_samples = *opts.samples;
  if (opts.coeff_bound) config.verify.coeff_bound = *opts.coeff_bound;
  if (opts.max_minors) config.limits.max_minors = *opts.max_minors;
  if (!opts.grid.empty()) {
    if (!config.regions) throw ConfigError("config error: --grid needs a regions section");
    config.regions->width = opts.grid[0];
    config.regions->height = opts.grid[1];
  }
  config.validate();
  return config;
}

void emit(const std::string& text, const CliOptions& opts, std::ostream& out) {
  if (opts.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(opts.out_path);
  if (!file) throw ConfigError("config error: cannot write " + opts.out_path);
  file << text;
}

int run_pipeline(const CliOptions& opts, RunMode mode, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const AnalysisConfig config = load_config(opts);
  const AnalysisOutcome outcome = run_analysis(config, mode);

  nlohmann::json document;
  document["report"] = outcome.report;
  if (!opts.no_timing) {
    const auto elapsed = std::chrono::steady_clock::now() - start;
    document["timing"] = {
        {"total_ms",
         std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count()}};
  }
  emit(document.dump(2) + "\n", opts, out);
  return outcome.all_hold ? 0 : 1;
}

int run_regions(const CliOptions& opts, std::ostream& out) {
  const AnalysisConfig config = load_config(opts);
  if (!config.regions) {
    throw ConfigError("config error at regions: a slice section is required");
  }
  ParamAssignment theta =
      config.params ? *config.params
                    : sample_params(config.architecture, config.rank_spec(), 0);
  const RegionScanResult scan = region_scan(config.architecture, theta, *config.regions);
  std::ostringstream csv;
  write_region_csv(scan, csv);
  emit(csv.str(), opts, out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"determinantal invariants and functional dimension of ReLU "
               "activation regions"};
  app.require_subcommand(1);
  CliOptions opts;

  auto* invariants = app.add_subcommand("invariants", "construct the constraint catalog");
  auto* verify = app.add_subcommand("verify", "construct and verify the constraints");
  auto* dimension = app.add_subcommand("dimension", "Jacobian-rank dimension analysis");
  auto* transform = app.add_subcommand("transform", "dataset transform of the constraints");
  auto* regions = app.add_subcommand("regions", "scan a 2D input slice into a region CSV");
  auto* report = app.add_subcommand("report", "full pipeline report");
  auto* preset = app.add_subcommand("preset", "run a built-in configuration");
  for (CLI::App* cmd : {invariants, verify, dimension, transform, regions, report, preset}) {
    add_common_options(cmd, opts);
  }
  std::string preset_positional;
  preset->add_option("name", preset_positional, "preset name");
  preset->add_flag("--list", opts.list, "list the available presets");

  try {
    // CLI11 parses argv-style reversed vectors.
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& help) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& error) {
    err << error.what() << "\n";
    return 2;
  }

  try {
    if (preset->parsed()) {
      if (opts.list) {
        for (const PresetEntry& entry : list_presets()) {
          out << entry.name << "\t" << entry.description << "\n";
        }
        return 0;
      }
      if (preset_positional.empty()) {
        throw ConfigError("config error: preset needs a name (or --list)");
      }
      opts.preset_name = preset_positional;
      return run_pipeline(opts, RunMode::Report, out);
    }
    if (regions->parsed()) return run_regions(opts, out);
    RunMode mode = RunMode::Report;
    if (invariants->parsed()) mode = RunMode::Invariants;
    if (verify->parsed()) mode = RunMode::Verify;
    if (dimension->parsed()) mode = RunMode::Dimension;
    if (transform->parsed()) mode = RunMode::Transform;
    return run_pipeline(opts, mode, out);
  } catch (const ConfigError& error) {
    err << error.what() << "\n";
    return 2;
  } catch (const std::exception& error) {
    err << "error: " << error.what() << "\n";
    return 2;
  }
}

}  // namespace relu
