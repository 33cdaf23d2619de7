#include "eprenorm/response.hpp"

#include <cmath>
#include <limits>

#include "eprenorm/epsolver.hpp"
#include "eprenorm/error.hpp"
#include "eprenorm/parallel.hpp"

namespace eprenorm {
namespace {

constexpr cplx I{0.0, 1.0};
constexpr int kDipScanPoints = 4001;
constexpr double kDipHalfWidth = 25.0;  // in units of gamma

cplx mechanical_inv(const SystemParams& p, cplx omega, MechanicalModel model) {
  cplx inv = 0.5 * p.gamma() - I * (omega - p.omega_m());
  if (model == MechanicalModel::NonMarkovian && p.g_c_sq() != 0.0) {
    inv -= p.g_c_sq() / (p.omega_c() - I * omega);
  }
  return inv;
}

}  // namespace

Susceptibilities susceptibilities(const SystemParams& p, const DriveParams& d, double omega) {
  Susceptibilities s;
  s.chi_a_inv = 0.5 * p.kappa() - I * (omega + d.delta());
  s.chi_b_inv = 0.5 * p.gamma() - I * (omega - p.omega_m());
  s.chi_c_inv = p.omega_c() - I * omega;
  s.chi_b_eff_inv = s.chi_b_inv;
  if (p.g_c_sq() != 0.0) s.chi_b_eff_inv -= p.g_c_sq() / s.chi_c_inv;
  s.d_denom = s.chi_a_inv * s.chi_b_eff_inv + d.g() * d.g();
  s.eta = s.chi_c_inv == cplx{} ? cplx{} : -std::sqrt(p.gamma()) * I * omega / s.chi_c_inv;
  return s;
}

cplx response_determinant(const SystemParams& p, const DriveParams& d, cplx omega, MechanicalModel model) {
  const cplx chi_a_inv = 0.5 * p.kappa() - I * (omega + d.delta());
  return chi_a_inv * mechanical_inv(p, omega, model) + d.g() * d.g();
}

SpectrumPoint reflection(const SystemParams& p, const DriveParams& d, double omega, MechanicalModel model) {
  const Susceptibilities s = susceptibilities(p, d, omega);
  const cplx mech_inv = model == MechanicalModel::NonMarkovian ? s.chi_b_eff_inv : s.chi_b_inv;
  const cplx denom = s.chi_a_inv * mech_inv + d.g() * d.g();
  if (std::abs(denom) < 1e-12 * p.kappa() * p.omega_m()) {
    throw Error(ErrorCode::SingularDenominator, "D(omega) vanishes at omega = " + std::to_string(omega));
  }
  SpectrumPoint pt;
  pt.omega = omega;
  pt.s_aa = 1.0 - p.kappa() * mech_inv / denom;
  // Bath noise couples only through the pseudomode-embedded mechanics.
  pt.s_axi = model == MechanicalModel::NonMarkovian ? I * std::sqrt(p.kappa()) * d.g() * s.eta / denom
                                                    : I * std::sqrt(p.kappa()) * d.g() * std::sqrt(p.gamma()) / denom;
  pt.r = pt.s_aa;
  pt.r_sq = std::norm(pt.r);
  return pt;
}

std::vector<SpectrumPoint> spectrum(const SystemParams& p, const DriveParams& d,
                                    std::span<const double> omegas, MechanicalModel model, unsigned threads) {
  if (omegas.empty()) throw Error(ErrorCode::InvalidParameter, "spectrum grid is empty");
  std::vector<SpectrumPoint> out(omegas.size());
  parallel_for(omegas.size(), threads, [&](std::size_t i) {
    try {
      out[i] = reflection(p, d, omegas[i], model);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularDenominator) throw;
      constexpr double nan = std::numeric_limits<double>::quiet_NaN();
      out[i].omega = omegas[i];
      out[i].r = out[i].s_aa = out[i].s_axi = {nan, nan};
      out[i].r_sq = nan;
      out[i].singular = true;
    }
  });
  return out;
}

DipMetrics dip_metrics(const SystemParams& p, const DriveParams& d, MechanicalModel model) {
  const auto r_sq = [&](double w) {
    try {
      return reflection(p, d, w, model).r_sq;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularDenominator) throw;
      return std::numeric_limits<double>::infinity();
    }
  };

  DipMetrics m{};
  m.r_sq_at_omega_m = r_sq(p.omega_m());
  const double half = kDipHalfWidth * p.gamma();
  if (half == 0.0) {
    m.omega_min = p.omega_m();
    m.r_sq_min = m.r_sq_at_omega_m;
    return m;
  }

  const double lo = p.omega_m() - half;
  const double step = 2.0 * half / (kDipScanPoints - 1);
  int best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kDipScanPoints; ++i) {
    const double v = r_sq(lo + step * i);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }

  // Golden-section on the bracketing cells.
  double a = lo + step * std::max(best - 1, 0);
  double b = lo + step * std::min(best + 1, kDipScanPoints - 1);
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  const double resolution = 1e-3 * p.gamma();
  double x1 = b - ratio * (b - a), x2 = a + ratio * (b - a);
  double f1 = r_sq(x1), f2 = r_sq(x2);
  while (b - a > resolution) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      f1 = r_sq(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      f2 = r_sq(x2);
    }
  }
  const double mid = 0.5 * (a + b);
  const double fmid = r_sq(mid);
  if (fmid <= best_val) {
    m.omega_min = mid;
    m.r_sq_min = fmid;
  } else {
    m.omega_min = lo + step * best;
    m.r_sq_min = best_val;
  }
  return m;
}

Cooperativity cooperativity(const SystemParams& p, const DriveParams& d) {
  const double g2 = d.g() * d.g();
  const double gamma_eff = mech_renorm(p).gamma_eff;
  if (!(gamma_eff > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "cooperativity needs gamma_eff > 0");
  }
  return {4.0 * g2 / (p.kappa() * p.gamma()), 4.0 * g2 / (p.kappa() * gamma_eff)};
}

}  // namespace eprenorm
