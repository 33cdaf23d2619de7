#pragma once

#include <span>
#include <vector>

#include "eprenorm/model.hpp"

namespace eprenorm {

/// Which mechanical susceptibility enters the cavity response.
enum class MechanicalModel { Markovian, NonMarkovian };

/// Inverse susceptibilities at probe frequency omega (offset from the control
/// laser, rad/s), the determinant D of the reduced a-b system and the bath
/// noise transfer amplitude eta.
struct Susceptibilities {
  cplx chi_a_inv;
  cplx chi_b_inv;
  cplx chi_b_eff_inv;
  cplx chi_c_inv;
  cplx d_denom;
  cplx eta;
};

Susceptibilities susceptibilities(const SystemParams& p, const DriveParams& d, double omega);

/// D(omega) continued to complex frequency. Its zeros sit at omega = i lambda
/// for eigenvalues lambda of the drift.
cplx response_determinant(const SystemParams& p, const DriveParams& d, cplx omega,
                          MechanicalModel model = MechanicalModel::NonMarkovian);

struct SpectrumPoint {
  double omega = 0.0;
  cplx r;
  double r_sq = 0.0;
  cplx s_aa;
  cplx s_axi;
  /// Set by spectrum() when D(omega) vanished; r fields are then NaN.
  bool singular = false;
};

/// Reflection amplitude of the one-sided cavity, r = 1 - kappa / (chi_a^-1 +
/// G^2 chi_b). With MechanicalModel::Markovian the bare mechanical
/// susceptibility replaces the dressed one. Throws SingularDenominator when
/// |D| < 1e-12 kappa omega_m.
SpectrumPoint reflection(const SystemParams& p, const DriveParams& d, double omega, MechanicalModel model);

/// Pointwise reflection; singular points are returned flagged, not thrown.
std::vector<SpectrumPoint> spectrum(const SystemParams& p, const DriveParams& d,
                                    std::span<const double> omegas, MechanicalModel model,
                                    unsigned threads = 1);

struct DipMetrics {
  double omega_min;
  double r_sq_min;
  /// |r|^2 exactly at omega = omega_m, for comparison with the true minimum.
  double r_sq_at_omega_m;
};

/// Minimum of |r|^2 over omega_m +- 25 gamma: 4001-point scan followed by
/// golden-section refinement to 1e-3 gamma.
DipMetrics dip_metrics(const SystemParams& p, const DriveParams& d, MechanicalModel model);

struct Cooperativity {
  double c;
  double c_eff;
};

/// C = 4 G^2 / (kappa gamma) and its memory-renormalised counterpart using
/// gamma_eff from mech_renorm.
Cooperativity cooperativity(const SystemParams& p, const DriveParams& d);

}  // namespace eprenorm
