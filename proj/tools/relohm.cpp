// SPDX-License-Identifier: Apache-2.0
//
// relohm: transform conductivities between inertial frames and check the
// covariance of Ohm's law.
//
//   relohm transform --model m.json --velocity 0.6,0,0 --omega 1 --k 0,0,0
//   relohm sweep     --model m.json --velocity 0.3,0,0 --omega 0.5,1,2 --k "0,0,0;1,0,0"
//   relohm verify    --samples 1000 --seed 7
//   relohm ohm       --model m.json --velocity 0.6,0,0 --omega 1 --E 0,1,0
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include "relohm/cli.hpp"

namespace {

using relohm::cli::CommandOutput;
using relohm::cli::RunConfig;

struct Flags {
  std::string config;
  std::string model;
  std::string velocity;
  std::string c;
  std::string omega;
  std::string k;
  std::string e_field;
  std::string formulas;
  std::string seed;
  std::string samples;
  std::string output;
  std::string format;
  bool inject_fault = false;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration; flags override its fields");
  cmd->add_option("--model", f.model, "material model file (JSON, or a sweep CSV)");
  cmd->add_option("--velocity", f.velocity, "frame velocity vx,vy,vz");
  cmd->add_option("--c", f.c, "speed of light in the chosen units (default 1)");
  cmd->add_option("--omega", f.omega, "comma-separated angular frequencies");
  cmd->add_option("--k", f.k, "semicolon-separated wavevectors kx,ky,kz;...");
  cmd->add_option("--output", f.output, "write data here instead of stdout");
  cmd->add_option("--format", f.format, "csv | structured");
}

RunConfig resolve(const Flags& f) {
  using namespace relohm::cli;
  RunConfig cfg;
  if (!f.config.empty()) load_config_file(cfg, f.config);
  if (!f.c.empty()) {
    const auto v = parse_list(f.c, "--c");
    if (v.size() != 1) throw relohm::ParseError("--c: expected one value");
    cfg.units = relohm::UnitsConfig(v[0]);
  }
  if (!f.model.empty()) cfg.model = relohm::load_model_file(f.model);
  if (!f.velocity.empty()) cfg.velocity = parse_triple(f.velocity, "--velocity");
  if (!f.omega.empty()) cfg.omega_list = parse_list(f.omega, "--omega");
  if (!f.k.empty()) cfg.k_list = parse_triples(f.k, "--k");
  if (!f.e_field.empty()) cfg.e_field = parse_complex_triple(f.e_field, "--E");
  if (!f.formulas.empty()) {
    cfg.formulas.clear();
    std::stringstream ss(f.formulas);
    std::string item;
    while (std::getline(ss, item, ',')) cfg.formulas.push_back(item);
  }
  if (!f.seed.empty()) {
    try {
      cfg.seed = std::stoull(f.seed);
    } catch (const std::exception&) {
      throw relohm::ParseError("--seed: not an unsigned integer");
    }
  }
  if (!f.samples.empty()) {
    try {
      if (f.samples.find('-') != std::string::npos) throw std::invalid_argument("negative");
      cfg.samples = std::stoull(f.samples);
    } catch (const std::exception&) {
      throw relohm::ParseError("--samples: not an unsigned integer");
    }
  }
  if (!f.output.empty()) cfg.output_path = f.output;
  if (!f.format.empty()) cfg.format = parse_format(f.format);
  if (f.inject_fault) cfg.inject_fault = true;
  return cfg;
}

int emit(const CommandOutput& out, const RunConfig& cfg) {
  std::cerr << out.diagnostics;
  if (!out.data.empty()) {
    if (cfg.output_path.empty()) {
      std::cout << out.data;
    } else {
      std::ofstream file(cfg.output_path);
      if (!file) {
        std::cerr << "error: cannot write '" << cfg.output_path << "'\n";
        return relohm::cli::kExitConfig;
      }
      file << out.data;
    }
  }
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"relohm: relativistic conductivity transforms and Ohm's-law checks"};
  app.require_subcommand(1);
  Flags flags;

  auto* transform = app.add_subcommand("transform", "transform sigma at one (k, omega)");
  auto* sweep = app.add_subcommand("sweep", "transform sigma over a grid of points");
  auto* verify = app.add_subcommand("verify", "run the randomized invariant suites");
  auto* ohm = app.add_subcommand("ohm", "compare generalized and textbook Ohm's laws");
  for (auto* cmd : {transform, sweep, verify, ohm}) add_common(cmd, flags);

  verify->add_option("--seed", flags.seed, "random seed");
  verify->add_option("--samples", flags.samples, "samples per suite (default 1000)");
  verify->add_flag("--inject-fault", flags.inject_fault,
                   "perturb the closed-form boost prefactor by 1e-6 (the suites must fail)");
  ohm->add_option("--E", flags.e_field, "electric field ex,ey,ez or 6 values as re,im pairs");
  ohm->add_option("--formulas", flags.formulas, "generalized,textbook,nonrelativistic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : relohm::cli::kExitConfig;
  }

  RunConfig cfg;
  try {
    cfg = resolve(flags);
  } catch (const relohm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return relohm::cli::kExitConfig;
  }

  using namespace relohm::cli;
  if (transform->parsed()) return emit(cmd_transform(cfg), cfg);
  if (sweep->parsed()) return emit(cmd_sweep(cfg), cfg);
  if (verify->parsed()) return emit(cmd_verify(cfg), cfg);
  return emit(cmd_ohm(cfg), cfg);
}
