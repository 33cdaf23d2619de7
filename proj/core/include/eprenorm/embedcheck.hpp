#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "eprenorm/model.hpp"

namespace eprenorm {

/// Mean amplitudes sampled on a uniform time grid (s). Each entry of
/// `amplitudes` holds (a, b) or (a, b, c).
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXcd> amplitudes;
};

/// Largest step accepted by the integrators: 1 / (50 max(omega_m, Omega_c)).
double max_stable_step(const SystemParams& p);

/// Classical RK4 on x' = M x with M the 3x3 non-Markovian drift. The step is
/// shrunk to t_final / ceil(t_final / dt) so the grid ends exactly at t_final.
/// Throws StepTooLarge when dt exceeds max_stable_step(p).
Trajectory integrate_pseudomode(const SystemParams& p, const DriveParams& d, const std::array<cplx, 3>& init,
                                double t_final, double dt);

/// Two-mode dynamics with the memory term (gamma Omega_c / 2) * integral of
/// exp(-Omega_c (t - tau)) b(tau) carried by the accumulator u, u' = -Omega_c u
/// + b, u(0) = 0. (a, b) advance with RK4; u advances in integrating-factor
/// (Lawson) form, so the exponential decay is exact within each step.
Trajectory integrate_nonmarkovian(const SystemParams& p, const DriveParams& d, const std::array<cplx, 2>& init,
                                  double t_final, double dt);

/// max_t |(a,b)_pseudo - (a,b)_direct| / max_t |(a,b)_direct| with c(0) = 0.
/// Zero for a zero initial state.
double compare_embeddings(const SystemParams& p, const DriveParams& d, const std::array<cplx, 2>& init_ab,
                          double t_final, double dt);

struct ConvergenceEstimate {
  double err_coarse;  // compare_embeddings at dt
  double err_fine;    // compare_embeddings at dt / 2
  double ratio;
  double order;       // log2(ratio)
};

ConvergenceEstimate embedding_convergence(const SystemParams& p, const DriveParams& d,
                                          const std::array<cplx, 2>& init_ab, double t_final, double dt);

/// Trapezoidal inverse Fourier transform of (spectral_density - gamma) over
/// [-window Omega_c, window Omega_c] at time t, plus the leading asymptotic
/// tail beyond the window, against the closed-form exponential kernel.
struct KernelFourierCheck {
  double quadrature;
  double closed_form;
  double rel_err;
};

KernelFourierCheck kernel_fourier_check(const SystemParams& p, double t, double window = 50.0,
                                        std::size_t points = 200001);

}  // namespace eprenorm
