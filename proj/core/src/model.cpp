#include "eprenorm/model.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "eprenorm/error.hpp"
#include "eprenorm/units.hpp"

namespace eprenorm {
namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidParameter, std::string(name) + " must be finite and > 0");
  }
}

void require_non_negative(double v, const char* name) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw Error(ErrorCode::InvalidParameter, std::string(name) + " must be finite and >= 0");
  }
}

constexpr cplx I{0.0, 1.0};

}  // namespace

SystemParams::SystemParams(double omega_m, double kappa, double gamma, double omega_c)
    : omega_m_(omega_m), kappa_(kappa), gamma_(gamma), omega_c_(omega_c) {
  require_positive(omega_m, "omega_m");
  require_positive(kappa, "kappa");
  require_non_negative(gamma, "gamma");
  require_non_negative(omega_c, "omega_c");
}

SystemParams SystemParams::from_hz(double freq_hz, double kappa_hz, double gamma_hz,
                                   double cutoff_hz) {
  using units::hz_to_angular;
  return {hz_to_angular(freq_hz), hz_to_angular(kappa_hz), hz_to_angular(gamma_hz),
          hz_to_angular(cutoff_hz)};
}

double SystemParams::g_c() const noexcept { return std::sqrt(g_c_sq()); }

DriveParams::DriveParams(double delta, double g) : delta_(delta), g_(g) {
  if (!std::isfinite(delta)) throw Error(ErrorCode::InvalidParameter, "detuning must be finite");
  require_non_negative(g, "coupling G");
}

DriveParams DriveParams::from_hz(double detuning_hz, double coupling_hz) {
  return {units::hz_to_angular(detuning_hz), units::hz_to_angular(coupling_hz)};
}

SystemParams representative_params() { return SystemParams::from_hz(1.0e6, 0.2e6, 5.0e3, 1.0e6); }

DriftMatrix::DriftMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || (entries_.rows() != 2 && entries_.rows() != 3)) {
    throw Error(ErrorCode::InvalidParameter, "drift matrix must be 2x2 or 3x3");
  }
}

double spectral_density(const SystemParams& p, double omega) {
  const double w2 = omega * omega;
  const double c2 = p.omega_c() * p.omega_c();
  if (w2 + c2 == 0.0) return 0.0;
  return p.gamma() * w2 / (w2 + c2);
}

double memory_kernel_smooth(const SystemParams& p, double t) {
  return -0.5 * p.gamma() * p.omega_c() * std::exp(-p.omega_c() * std::abs(t));
}

DriftMatrix drift_markovian(const SystemParams& p, const DriveParams& d) {
  Eigen::MatrixXcd m(2, 2);
  m(0, 0) = I * d.delta() - 0.5 * p.kappa();
  m(0, 1) = -I * d.g();
  m(1, 0) = -I * d.g();
  m(1, 1) = -(I * p.omega_m() + 0.5 * p.gamma());
  return DriftMatrix(std::move(m));
}

DriftMatrix drift_nonmarkovian(const SystemParams& p, const DriveParams& d) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(3, 3);
  m.topLeftCorner<2, 2>() = drift_markovian(p, d).entries();
  m(1, 2) = -p.g_c();
  m(2, 1) = -p.g_c();
  m(2, 2) = -p.omega_c();
  return DriftMatrix(std::move(m));
}

}  // namespace eprenorm
