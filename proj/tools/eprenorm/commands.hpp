#pragma once

#include <optional>
#include <string>

#include "eprenorm/config.hpp"
#include "eprenorm/output.hpp"

namespace eprenorm::cli {

enum ExitStatus : int { kOk = 0, kValidation = 1, kSolver = 2, kCheck = 3 };

struct GlobalOptions {
  std::optional<std::string> config;
  std::optional<std::string> out;
  bool json = false;
  bool quiet = false;
};

struct GSweep {
  double min_khz = 40.0;
  double max_khz = 60.0;
  std::size_t points = 401;
};

struct EigsOptions {
  GSweep g;
  std::string delta_mode = "markovian";
  bool markovian_ref = false;
};

struct PetermannOptions {
  GSweep g;
  std::string delta_mode = "exact";
  bool both_calibrations = false;
  bool at_ep = false;
};

struct SpectrumOptions {
  std::optional<double> omega_min_khz;
  std::optional<double> omega_max_khz;
  std::size_t omega_points = 4001;
  bool markovian_only = false;
  std::string at = "ep";  // "ep": each model at its own EP; "config": the config drive
};

struct EmbedcheckOptions {
  double t_final_kappa = 20.0;  // in units of 1/kappa
  double dt_divisor = 100.0;    // dt = 1 / (divisor * omega_m)
  std::string at = "ep";
};

/// Worker-thread count: hardware concurrency, capped by EPRENORM_THREADS.
unsigned thread_budget();

Config resolve_config(const GlobalOptions& g);

int cmd_ep(const GlobalOptions& g);
int cmd_eigs(const GlobalOptions& g, const EigsOptions& o);
int cmd_petermann(const GlobalOptions& g, const PetermannOptions& o);
int cmd_spectrum(const GlobalOptions& g, const SpectrumOptions& o);
int cmd_embedcheck(const GlobalOptions& g, const EmbedcheckOptions& o);

}  // namespace eprenorm::cli
