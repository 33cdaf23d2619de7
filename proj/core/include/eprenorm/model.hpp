#pragma once

#include <complex>

#include <Eigen/Dense>

namespace eprenorm {

using cplx = std::complex<double>;

/// Bare physical rates of the cavity, the mechanical mode and its structured
/// bath. All values are angular frequencies in rad/s.
///
/// The pseudomode coupling g_c is not stored; it is recomputed from gamma and
/// omega_c so that g_c^2 == gamma * omega_c / 2 always holds.
class SystemParams {
 public:
  /// omega_m and kappa must be > 0. gamma and omega_c must be >= 0; zero
  /// values select the memoryless limits (g_c = 0).
  SystemParams(double omega_m, double kappa, double gamma, double omega_c);

  /// Same as the constructor but with every rate given as ordinary frequency.
  static SystemParams from_hz(double freq_hz, double kappa_hz, double gamma_hz, double cutoff_hz);

  double omega_m() const noexcept { return omega_m_; }
  double kappa() const noexcept { return kappa_; }
  double gamma() const noexcept { return gamma_; }
  double omega_c() const noexcept { return omega_c_; }

  double g_c_sq() const noexcept { return 0.5 * gamma_ * omega_c_; }
  double g_c() const noexcept;

  /// omega_m > kappa and omega_m > gamma. Violations are legal but the
  /// rotating-wave model behind the drift matrix loses accuracy.
  bool resolved_sideband() const noexcept { return omega_m_ > kappa_ && omega_m_ > gamma_; }

  SystemParams with_gamma(double gamma) const { return {omega_m_, kappa_, gamma, omega_c_}; }
  SystemParams with_omega_c(double omega_c) const { return {omega_m_, kappa_, gamma_, omega_c}; }
  SystemParams with_kappa(double kappa) const { return {omega_m_, kappa, gamma_, omega_c_}; }

 private:
  double omega_m_;
  double kappa_;
  double gamma_;
  double omega_c_;
};

/// Control-laser detuning and linearized optomechanical coupling (rad/s).
class DriveParams {
 public:
  DriveParams(double delta, double g);
  static DriveParams from_hz(double detuning_hz, double coupling_hz);

  double delta() const noexcept { return delta_; }
  double g() const noexcept { return g_; }

 private:
  double delta_;
  double g_;
};

/// omega_m/2pi = 1 MHz, kappa/2pi = 0.2 MHz, gamma/2pi = 5 kHz, Omega_c/2pi = 1 MHz.
SystemParams representative_params();

/// Linear generator of the mean-field dynamics in the mode basis (a, b) or
/// (a, b, c). Always square, dimension 2 or 3.
class DriftMatrix {
 public:
  explicit DriftMatrix(Eigen::MatrixXcd entries);

  int dim() const noexcept { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXcd& entries() const noexcept { return entries_; }
  cplx operator()(int row, int col) const { return entries_(row, col); }

 private:
  Eigen::MatrixXcd entries_;
};

/// Bath spectral function gamma * w^2 / (w^2 + Omega_c^2), even in w.
double spectral_density(const SystemParams& p, double omega);

/// Exponential part of the memory kernel, -(gamma Omega_c / 2) exp(-Omega_c |t|).
/// The gamma * delta(t) part is never sampled; it enters the drift as the
/// local damping -gamma/2.
double memory_kernel_smooth(const SystemParams& p, double t);

/// 2x2 drift with memoryless mechanical damping.
DriftMatrix drift_markovian(const SystemParams& p, const DriveParams& d);

/// 3x3 drift with the bath pseudomode c appended.
DriftMatrix drift_nonmarkovian(const SystemParams& p, const DriveParams& d);

}  // namespace eprenorm
