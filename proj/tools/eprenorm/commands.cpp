#include "eprenorm/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <fmt/format.h>

#include "eprenorm/embedcheck.hpp"
#include "eprenorm/epsolver.hpp"
#include "eprenorm/grid.hpp"
#include "eprenorm/response.hpp"
#include "eprenorm/spectral.hpp"
#include "eprenorm/units.hpp"

namespace eprenorm::cli {

namespace {

using units::angular_to_khz;
using units::khz_to_angular;

struct DeltaChoice {
  std::string label;
  double delta;
};

double parse_khz(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || !std::isfinite(v)) throw ConfigError(what + ": '" + text + "' is not a number");
  return v;
}

DeltaChoice resolve_delta(const std::string& mode, const SystemParams& p) {
  if (mode == "markovian") return {"markovian", -p.omega_m()};
  if (mode == "exact") return {"exact", solve_exact_ep(p).delta_ep};
  if (mode.rfind("value:", 0) == 0) return {"value", khz_to_angular(parse_khz(mode.substr(6), "--delta-mode value"))};
  throw ConfigError("--delta-mode must be markovian, exact or value:<kHz>, got '" + mode + "'");
}

std::vector<double> g_grid(const GSweep& s) {
  if (!(s.min_khz >= 0.0) || !(s.max_khz >= s.min_khz)) throw ConfigError("need 0 <= --g-min <= --g-max");
  if (s.points == 0) throw ConfigError("--g-points must be >= 1");
  // A single point is evaluated as a degenerate two-point sweep.
  if (s.points == 1) return {khz_to_angular(s.min_khz), khz_to_angular(s.min_khz)};
  if (s.max_khz == s.min_khz) throw ConfigError("--g-min and --g-max coincide; use --g-points 1");
  return LinearGrid(khz_to_angular(s.min_khz), khz_to_angular(s.max_khz), s.points).values();
}

RunManifest base_manifest(const std::string& sub, const Config& cfg) {
  RunManifest m{sub, cfg.source, cfg.system, std::nullopt, {}, {}, {}, {}};
  return m;
}

OutputOptions output_options(const GlobalOptions& g) {
  OutputOptions o;
  if (g.out) o.out = *g.out;
  o.json = g.json;
  return o;
}

std::array<double, 2> khz_pair(cplx z) { return {angular_to_khz(z.real()), angular_to_khz(z.imag())}; }

nlohmann::ordered_json solution_json(const EpSolution& s) {
  return {{"delta_khz", angular_to_khz(s.delta_ep)},
          {"g_khz", angular_to_khz(s.g_ep)},
          {"lambda_khz", khz_pair(s.lambda_ep)},
          {"lambda3_khz", khz_pair(s.lambda_3)},
          {"residual_p", s.residual_p},
          {"residual_dp", s.residual_dp}};
}

std::string solution_line(const EpSolution& s) {
  const auto l = khz_pair(s.lambda_ep);
  const auto l3 = khz_pair(s.lambda_3);
  return fmt::format("{:<13} {:>18.10g} {:>16.10g} {:>16.10g} {:>16.10g} {:>16.10g} {:>16.10g}\n", to_string(s.kind),
                     angular_to_khz(s.delta_ep), angular_to_khz(s.g_ep), l[0], l[1], l3[0], l3[1]);
}

DriveParams config_drive(const Config& cfg, const std::string& flag) {
  if (!cfg.drive) throw ConfigError(flag + " config needs a 'drive' section in the config file");
  return *cfg.drive;
}

}  // namespace

unsigned thread_budget() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EPRENORM_THREADS")) {
    unsigned cap = 0;
    const char* end = env + std::char_traits<char>::length(env);
    const auto [ptr, ec] = std::from_chars(env, end, cap);
    if (ec != std::errc{} || ptr != end || cap == 0) {
      throw ConfigError(std::string("EPRENORM_THREADS must be a positive integer, got '") + env + "'");
    }
    n = std::min(n, cap);
  }
  return n;
}

Config resolve_config(const GlobalOptions& g) { return g.config ? load_config(*g.config) : default_config(); }

int cmd_ep(const GlobalOptions& g) {
  const Config cfg = resolve_config(g);
  const SystemParams& p = cfg.system;
  const EpSolution mk = markovian_ep(p);
  const EpSolution pt = perturbative_ep(p);
  const EpSolution ex = solve_exact_ep(p);
  const EpShift shift = perturbative_shift(p);
  const OrderCertificate cert = order_certificate(p, ex);
  const double tol = 1e-8;
  const bool certified = cert.rel_p < tol && cert.rel_dp < tol && cert.rel_d2p > tol;

  std::string text = "rates are f/2pi in kHz\n";
  text += fmt::format("{:<13} {:>18} {:>16} {:>16} {:>16} {:>16} {:>16}\n", "kind", "delta_khz", "g_khz",
                      "re_lambda_khz", "im_lambda_khz", "re_lambda3_khz", "im_lambda3_khz");
  text += solution_line(mk) + solution_line(pt) + solution_line(ex);
  text += fmt::format("perturbative shift: d_delta_khz={:.10g} d_g_khz={:.10g}\n", angular_to_khz(shift.delta),
                      angular_to_khz(shift.g));
  text += fmt::format("exact shift:        d_delta_khz={:.10g} d_g_khz={:.10g}\n",
                      angular_to_khz(ex.delta_ep - mk.delta_ep), angular_to_khz(ex.g_ep - mk.g_ep));
  text += fmt::format("order-two certificate: rel_p={:.3e} rel_dp={:.3e} rel_d2p={:.3e} {}\n", cert.rel_p, cert.rel_dp,
                      cert.rel_d2p, certified ? "PASS" : "FAIL");

  nlohmann::ordered_json doc;
  doc["markovian"] = solution_json(mk);
  doc["perturbative"] = solution_json(pt);
  doc["exact"] = solution_json(ex);
  doc["perturbative_shift_khz"] = {{"delta", angular_to_khz(shift.delta)}, {"g", angular_to_khz(shift.g)}};
  doc["exact_shift_khz"] = {{"delta", angular_to_khz(ex.delta_ep - mk.delta_ep)}, {"g", angular_to_khz(ex.g_ep - mk.g_ep)}};
  doc["certificate"] = {{"rel_p", cert.rel_p}, {"rel_dp", cert.rel_dp}, {"rel_d2p", cert.rel_d2p},
                        {"tolerance", tol}, {"passed", certified}};

  emit_report(text, doc, base_manifest("ep", cfg), output_options(g));
  return certified ? kOk : kCheck;
}

int cmd_eigs(const GlobalOptions& g, const EigsOptions& o) {
  const Config cfg = resolve_config(g);
  const SystemParams& p = cfg.system;
  const DeltaChoice delta = resolve_delta(o.delta_mode, p);
  const auto grid = g_grid(o.g);
  SweepOptions sopt;
  sopt.threads = thread_budget();
  if (o.markovian_ref) sopt.markovian_reference_delta = -p.omega_m();
  auto rows = sweep_eigs(p, delta.delta, grid, sopt);
  if (o.g.points == 1) rows.resize(1);

  Table t;
  t.columns = {"g_khz", "re_l1", "re_l2", "re_l3", "im_l1", "im_l2", "im_l3", "pseudo_branch", "hybrid_gap_khz"};
  if (o.markovian_ref) t.columns.insert(t.columns.end(), {"re_mk1", "re_mk2", "im_mk1", "im_mk2"});
  std::size_t argmin = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& r = rows[i];
    std::vector<Cell> row{r.coordinate_hz * 1e-3};
    for (int k = 0; k < 3; ++k) row.emplace_back(r.eigen_hz[k].real() * 1e-3);
    for (int k = 0; k < 3; ++k) row.emplace_back(r.eigen_hz[k].imag() * 1e-3);
    row.emplace_back(static_cast<std::int64_t>(r.pseudomode_branch + 1));
    row.emplace_back(r.hybrid_gap_hz() * 1e-3);
    if (r.markovian_hz) {
      for (int k = 0; k < 2; ++k) row.emplace_back((*r.markovian_hz)[k].real() * 1e-3);
      for (int k = 0; k < 2; ++k) row.emplace_back((*r.markovian_hz)[k].imag() * 1e-3);
    }
    t.rows.push_back(std::move(row));
    if (r.hybrid_gap_hz() < rows[argmin].hybrid_gap_hz()) argmin = i;
  }
  const double gap = rows[argmin].hybrid_gap_hz() * 1e-3;
  const double at = rows[argmin].coordinate_hz * 1e-3;
  t.summary.push_back("min hybrid gap: " + format_number(gap) + " kHz at g_khz=" + format_number(at));
  t.summary_json = {{"min_hybrid_gap_khz", gap}, {"min_gap_g_khz", at}};

  RunManifest m = base_manifest("eigs", cfg);
  m.settings = {{"delta_mode", o.delta_mode}, {"delta_khz", format_number(angular_to_khz(delta.delta))},
                {"markovian_ref", o.markovian_ref ? "on" : "off"}};
  m.grids = {{"g", o.g.min_khz, o.g.points == 1 ? o.g.min_khz : o.g.max_khz, o.g.points}};
  emit_table(t, m, output_options(g));
  if (!g.quiet) std::cerr << "eigs: min hybrid gap " << format_number(gap) << " kHz at G = " << format_number(at) << " kHz\n";
  return kOk;
}

int cmd_petermann(const GlobalOptions& g, const PetermannOptions& o) {
  const Config cfg = resolve_config(g);
  const SystemParams& p = cfg.system;

  std::vector<DeltaChoice> calibrations;
  GSweep sweep = o.g;
  std::optional<EpSolution> ep;
  if (o.at_ep) {
    ep = solve_exact_ep(p);
    calibrations.push_back({"exact", ep->delta_ep});
    sweep = {angular_to_khz(ep->g_ep), angular_to_khz(ep->g_ep), 1};
  } else if (o.both_calibrations) {
    calibrations = {{"markovian", -p.omega_m()}, {"exact", solve_exact_ep(p).delta_ep}};
  } else {
    calibrations.push_back(resolve_delta(o.delta_mode, p));
  }
  std::vector<double> grid;
  if (ep) {
    grid = {ep->g_ep, ep->g_ep};
  } else {
    grid = g_grid(sweep);
  }

  Table t;
  t.columns = {"calibration", "delta_khz", "g_khz", "k_plus", "k_minus", "k_3", "div_plus", "div_minus", "div_3"};
  SweepOptions sopt;
  sopt.threads = thread_budget();
  for (const auto& cal : calibrations) {
    auto rows = sweep_petermann(p, cal.delta, grid, sopt);
    if (sweep.points == 1) rows.resize(1);
    double kmax = 0.0, kmax_at = 0.0;
    for (const SweepRow& r : rows) {
      auto [a, b] = r.hybrid_branches();
      if (r.eigen_hz[a].imag() < r.eigen_hz[b].imag()) std::swap(a, b);
      const auto& kp = r.petermann[a];
      const auto& km = r.petermann[b];
      const auto& k3 = r.petermann[r.pseudomode_branch];
      t.rows.push_back({cal.label, angular_to_khz(cal.delta), r.coordinate_hz * 1e-3, kp.value, km.value, k3.value,
                        std::int64_t{kp.divergent}, std::int64_t{km.divergent}, std::int64_t{k3.divergent}});
      const double k = std::max(kp.value, km.value);
      if (k > kmax) {
        kmax = k;
        kmax_at = r.coordinate_hz * 1e-3;
      }
    }
    t.summary.push_back("max K+- (" + cal.label + "): " + format_number(kmax) + " at g_khz=" + format_number(kmax_at));
    t.summary_json[cal.label] = {{"delta_khz", angular_to_khz(cal.delta)}, {"max_k_pm", kmax}, {"max_g_khz", kmax_at}};
    if (!g.quiet) {
      std::cerr << "petermann (" << cal.label << "): max K+- " << format_number(kmax) << " at G = " << format_number(kmax_at)
                << " kHz\n";
    }
  }

  RunManifest m = base_manifest("petermann", cfg);
  std::string mode = o.at_ep ? "exact-ep-point" : o.both_calibrations ? "both" : o.delta_mode;
  m.settings = {{"delta_mode", mode}};
  m.grids = {{"g", sweep.min_khz, sweep.points == 1 ? sweep.min_khz : sweep.max_khz, sweep.points}};
  emit_table(t, m, output_options(g));
  return kOk;
}

int cmd_spectrum(const GlobalOptions& g, const SpectrumOptions& o) {
  const Config cfg = resolve_config(g);
  const SystemParams& p = cfg.system;

  const double half = p.gamma() > 0.0 ? 25.0 * p.gamma() : p.kappa();
  const double lo = o.omega_min_khz.value_or(angular_to_khz(p.omega_m() - half));
  const double hi = o.omega_max_khz.value_or(angular_to_khz(p.omega_m() + half));
  if (!(hi > lo)) throw ConfigError("need --omega-min < --omega-max");
  if (o.omega_points < 2) throw ConfigError("--omega-points must be >= 2");
  const LinearGrid grid(khz_to_angular(lo), khz_to_angular(hi), o.omega_points);
  const auto omegas = grid.values();

  DriveParams d_mk(-p.omega_m(), 0.0), d_nm(-p.omega_m(), 0.0);
  if (o.at == "ep") {
    d_mk = markovian_ep(p).drive();
    if (!o.markovian_only) d_nm = solve_exact_ep(p).drive();
  } else if (o.at == "config") {
    d_mk = d_nm = config_drive(cfg, "--at");
  } else {
    throw ConfigError("--at must be ep or config, got '" + o.at + "'");
  }

  const unsigned threads = thread_budget();
  const auto mk = spectrum(p, d_mk, omegas, MechanicalModel::Markovian, threads);
  std::vector<SpectrumPoint> nm;
  if (!o.markovian_only) nm = spectrum(p, d_nm, omegas, MechanicalModel::NonMarkovian, threads);

  Table t;
  t.columns = {"omega_khz", "r_sq_markovian"};
  if (!o.markovian_only) t.columns.push_back("r_sq_nonmarkovian");
  for (std::size_t i = 0; i < omegas.size(); ++i) {
    std::vector<Cell> row{angular_to_khz(omegas[i]), mk[i].r_sq};
    if (!o.markovian_only) row.emplace_back(nm[i].r_sq);
    t.rows.push_back(std::move(row));
  }

  const auto dip_block = [&](const std::string& name, const DriveParams& d, MechanicalModel model) {
    const DipMetrics dm = dip_metrics(p, d, model);
    t.summary.push_back("dip " + name + ": omega_min_khz=" + format_number(angular_to_khz(dm.omega_min)) +
                        " r_sq_min=" + format_number(dm.r_sq_min) +
                        " r_sq_at_omega_m=" + format_number(dm.r_sq_at_omega_m));
    t.summary_json["dip_" + name] = {{"omega_min_khz", angular_to_khz(dm.omega_min)},
                                     {"r_sq_min", dm.r_sq_min},
                                     {"r_sq_at_omega_m", dm.r_sq_at_omega_m}};
    if (!g.quiet) {
      std::cerr << "spectrum: " << name << " dip |r|^2 = " << format_number(dm.r_sq_min) << " at "
                << format_number(angular_to_khz(dm.omega_min)) << " kHz\n";
    }
  };
  dip_block("markovian", d_mk, MechanicalModel::Markovian);
  if (!o.markovian_only) {
    dip_block("nonmarkovian", d_nm, MechanicalModel::NonMarkovian);
    if (mech_renorm(p).gamma_eff > 0.0 && p.gamma() > 0.0) {
      const Cooperativity c = cooperativity(p, d_nm);
      t.summary.push_back("cooperativity: C=" + format_number(c.c) + " C_eff=" + format_number(c.c_eff) +
                          " ratio=" + format_number(c.c_eff / c.c));
      t.summary_json["cooperativity"] = {{"c", c.c}, {"c_eff", c.c_eff}, {"ratio", c.c_eff / c.c}};
    }
  }

  RunManifest m = base_manifest("spectrum", cfg);
  m.settings = {{"at", o.at}, {"models", o.markovian_only ? "markovian" : "markovian,nonmarkovian"}};
  if (o.at == "config") m.drive = d_nm;
  m.grids = {{"omega", lo, hi, o.omega_points}};
  emit_table(t, m, output_options(g));
  return kOk;
}

int cmd_embedcheck(const GlobalOptions& g, const EmbedcheckOptions& o) {
  const Config cfg = resolve_config(g);
  const SystemParams& p = cfg.system;
  if (!(o.t_final_kappa > 0.0) || !(o.dt_divisor > 0.0)) throw ConfigError("--t-final and --dt-divisor must be > 0");
  DriveParams d(-p.omega_m(), 0.0);
  if (o.at == "ep") {
    d = solve_exact_ep(p).drive();
  } else if (o.at == "config") {
    d = config_drive(cfg, "--at");
  } else {
    throw ConfigError("--at must be ep or config, got '" + o.at + "'");
  }
  const double t_final = o.t_final_kappa / p.kappa();
  const double dt = 1.0 / (o.dt_divisor * p.omega_m());
  const std::array<cplx, 2> init{cplx{1.0, 0.0}, cplx{}};

  const ConvergenceEstimate c = embedding_convergence(p, d, init, t_final, dt);
  const double limit = 1e-5;
  const bool passed = c.err_coarse <= limit;

  std::optional<KernelFourierCheck> kernel;
  if (p.omega_c() > 0.0 && p.gamma() > 0.0) kernel = kernel_fourier_check(p, 1.0 / p.omega_c());

  std::string text;
  text += fmt::format("t_final = {:.6g} s ({:g}/kappa), dt = {:.6g} s (1/({:g} omega_m))\n", t_final, o.t_final_kappa, dt,
                      o.dt_divisor);
  text += fmt::format("max_rel_err      {:.6e}\n", c.err_coarse);
  text += fmt::format("max_rel_err dt/2 {:.6e}\n", c.err_fine);
  text += fmt::format("halving ratio    {:.6g}\n", c.ratio);
  text += fmt::format("order estimate   {:.4f}\n", c.order);
  if (kernel) text += fmt::format("kernel fourier   {:.6e} (t = 1/Omega_c)\n", kernel->rel_err);
  text += std::string(passed ? "PASS" : "FAIL") + fmt::format(" (limit {:.0e})\n", limit);

  nlohmann::ordered_json doc;
  doc["max_rel_err"] = c.err_coarse;
  doc["max_rel_err_half_dt"] = c.err_fine;
  doc["ratio"] = c.ratio;
  doc["order"] = c.order;
  doc["kernel_fourier_rel_err"] = kernel ? nlohmann::ordered_json(kernel->rel_err) : nlohmann::ordered_json(nullptr);
  doc["limit"] = limit;
  doc["passed"] = passed;

  RunManifest m = base_manifest("embedcheck", cfg);
  m.drive = d;
  m.settings = {{"t_final_kappa", format_number(o.t_final_kappa)}, {"dt_divisor", format_number(o.dt_divisor)},
                {"at", o.at}};
  emit_report(text, doc, m, output_options(g));
  return passed ? kOk : kCheck;
}

}  // namespace eprenorm::cli
