#include <iostream>

#include <CLI11.hpp>

#include "eprenorm/commands.hpp"
#include "eprenorm/error.hpp"

using namespace eprenorm;
using namespace eprenorm::cli;

namespace {

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidParameter:
    case ErrorCode::StepTooLarge:
      return kValidation;
    case ErrorCode::OrderCheckFailed:
      return kCheck;
    default:
      return kSolver;
  }
}

void add_g_sweep(CLI::App* sub, GSweep& s) {
  sub->add_option("--g-min", s.min_khz, "lowest coupling G/2pi in kHz")->capture_default_str();
  sub->add_option("--g-max", s.max_khz, "highest coupling G/2pi in kHz")->capture_default_str();
  sub->add_option("--g-points", s.points, "number of grid points (1 = point query at --g-min)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exceptional points of an optomechanical system with a structured mechanical bath"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--config", global.config, "YAML parameter file (defaults to the built-in parameters)");
  app.add_option("--out", global.out, "write data to this path instead of stdout");
  app.add_flag("--json", global.json, "structured JSON output (a .json twin next to --out)");
  app.add_flag("--quiet", global.quiet, "no summary lines on stderr");

  auto* ep = app.add_subcommand("ep", "Markovian, perturbative and exact exceptional points");

  EigsOptions eigs;
  auto* eigs_cmd = app.add_subcommand("eigs", "eigenvalue branches of the 3x3 drift matrix over G");
  add_g_sweep(eigs_cmd, eigs.g);
  eigs_cmd->add_option("--delta-mode", eigs.delta_mode, "markovian | exact | value:<kHz>")->capture_default_str();
  eigs_cmd->add_flag("--markovian-ref", eigs.markovian_ref, "add 2x2 Markovian eigenvalues at Delta = -omega_m");

  PetermannOptions pet;
  auto* pet_cmd = app.add_subcommand("petermann", "Petermann factors over G");
  add_g_sweep(pet_cmd, pet.g);
  pet_cmd->add_option("--delta-mode", pet.delta_mode, "markovian | exact | value:<kHz>")->capture_default_str();
  pet_cmd->add_flag("--both-calibrations", pet.both_calibrations, "emit the Markovian and exact detuning sweeps");
  pet_cmd->add_flag("--at-ep", pet.at_ep, "single point at the exact EP coordinates");

  SpectrumOptions spec;
  auto* spec_cmd = app.add_subcommand("spectrum", "cavity reflection spectrum and transparency dip");
  spec_cmd->add_option("--omega-min", spec.omega_min_khz, "lowest probe frequency in kHz (default omega_m - 25 gamma)");
  spec_cmd->add_option("--omega-max", spec.omega_max_khz, "highest probe frequency in kHz (default omega_m + 25 gamma)");
  spec_cmd->add_option("--omega-points", spec.omega_points, "number of grid points")->capture_default_str();
  spec_cmd->add_flag("--markovian-only", spec.markovian_only, "only the Markovian curve");
  spec_cmd->add_option("--at", spec.at, "ep (each model at its own EP) | config")->capture_default_str();

  EmbedcheckOptions emb;
  auto* emb_cmd = app.add_subcommand("embedcheck", "pseudomode embedding versus direct memory integration");
  emb_cmd->add_option("--t-final", emb.t_final_kappa, "integration time in units of 1/kappa")->capture_default_str();
  emb_cmd->add_option("--dt-divisor", emb.dt_divisor, "step dt = 1/(N omega_m)")->capture_default_str();
  emb_cmd->add_option("--at", emb.at, "ep | config")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    thread_budget();  // reject a malformed EPRENORM_THREADS up front
    if (*ep) return cmd_ep(global);
    if (*eigs_cmd) return cmd_eigs(global, eigs);
    if (*pet_cmd) return cmd_petermann(global, pet);
    if (*spec_cmd) return cmd_spectrum(global, spec);
    if (*emb_cmd) return cmd_embedcheck(global, emb);
  } catch (const ConfigError& e) {
    std::cerr << "eprenorm: " << e.what() << "\n";
    return kValidation;
  } catch (const Error& e) {
    std::cerr << "eprenorm: " << e.what() << "\n";
    return exit_status(e.code());
  } catch (const std::exception& e) {
    std::cerr << "eprenorm: " << e.what() << "\n";
    return kSolver;
  }
  return kValidation;
}
