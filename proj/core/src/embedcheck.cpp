#include "eprenorm/embedcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "eprenorm/error.hpp"
#include "eprenorm/units.hpp"

namespace eprenorm {
namespace {

std::size_t step_count(const SystemParams& p, double t_final, double dt) {
  if (!(t_final > 0.0) || !(dt > 0.0)) {
    throw Error(ErrorCode::StepTooLarge, "t_final and dt must be positive");
  }
  const double limit = max_stable_step(p);
  if (dt > limit * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "dt = " << dt << " s exceeds 1/(50 max(omega_m, Omega_c)); use dt <= " << limit << " s";
    throw Error(ErrorCode::StepTooLarge, msg.str());
  }
  return static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
}

}  // namespace

double max_stable_step(const SystemParams& p) {
  return 1.0 / (50.0 * std::max(p.omega_m(), p.omega_c()));
}

Trajectory integrate_pseudomode(const SystemParams& p, const DriveParams& d, const std::array<cplx, 3>& init,
                                double t_final, double dt) {
  const std::size_t n = step_count(p, t_final, dt);
  const double h = t_final / static_cast<double>(n);
  const Eigen::Matrix3cd m = drift_nonmarkovian(p, d).entries();

  Trajectory traj;
  traj.times.reserve(n + 1);
  traj.amplitudes.reserve(n + 1);
  Eigen::Vector3cd x(init[0], init[1], init[2]);
  traj.times.push_back(0.0);
  traj.amplitudes.emplace_back(x);
  for (std::size_t i = 1; i <= n; ++i) {
    const Eigen::Vector3cd k1 = m * x;
    const Eigen::Vector3cd k2 = m * (x + 0.5 * h * k1);
    const Eigen::Vector3cd k3 = m * (x + 0.5 * h * k2);
    const Eigen::Vector3cd k4 = m * (x + h * k3);
    x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    traj.times.push_back(h * static_cast<double>(i));
    traj.amplitudes.emplace_back(x);
  }
  return traj;
}

Trajectory integrate_nonmarkovian(const SystemParams& p, const DriveParams& d, const std::array<cplx, 2>& init,
                                  double t_final, double dt) {
  const std::size_t n = step_count(p, t_final, dt);
  const double h = t_final / static_cast<double>(n);
  const Eigen::Matrix2cd local = drift_markovian(p, d).entries();
  const double memory = 0.5 * p.gamma() * p.omega_c();
  const double oc = p.omega_c();

  // State (a, b, w) within a step starting at t_n, with u(t_n + s) = exp(-Oc s) w.
  struct State {
    Eigen::Vector2cd ab;
    cplx w;
  };
  const auto rhs = [&](double s, const State& st) {
    const double decay = std::exp(-oc * s);
    State out;
    out.ab = local * st.ab;
    out.ab(1) += memory * decay * st.w;
    out.w = st.ab(1) / decay;
    return out;
  };
  const auto axpy = [](const State& x, double a, const State& k) {
    return State{x.ab + a * k.ab, x.w + a * k.w};
  };

  Trajectory traj;
  traj.times.reserve(n + 1);
  traj.amplitudes.reserve(n + 1);
  State x{Eigen::Vector2cd(init[0], init[1]), cplx{}};
  traj.times.push_back(0.0);
  traj.amplitudes.emplace_back(x.ab);
  const double step_decay = std::exp(-oc * h);
  for (std::size_t i = 1; i <= n; ++i) {
    const State k1 = rhs(0.0, x);
    const State k2 = rhs(0.5 * h, axpy(x, 0.5 * h, k1));
    const State k3 = rhs(0.5 * h, axpy(x, 0.5 * h, k2));
    const State k4 = rhs(h, axpy(x, h, k3));
    x.ab += (h / 6.0) * (k1.ab + 2.0 * k2.ab + 2.0 * k3.ab + k4.ab);
    x.w += (h / 6.0) * (k1.w + 2.0 * k2.w + 2.0 * k3.w + k4.w);
    x.w *= step_decay;
    traj.times.push_back(h * static_cast<double>(i));
    traj.amplitudes.emplace_back(x.ab);
  }
  return traj;
}

double compare_embeddings(const SystemParams& p, const DriveParams& d, const std::array<cplx, 2>& init_ab,
                          double t_final, double dt) {
  const Trajectory pseudo = integrate_pseudomode(p, d, {init_ab[0], init_ab[1], cplx{}}, t_final, dt);
  const Trajectory direct = integrate_nonmarkovian(p, d, init_ab, t_final, dt);
  double max_diff = 0.0;
  double max_norm = 0.0;
  for (std::size_t i = 0; i < direct.amplitudes.size(); ++i) {
    const Eigen::VectorXcd& ref = direct.amplitudes[i];
    max_diff = std::max(max_diff, (pseudo.amplitudes[i].head<2>() - ref).norm());
    max_norm = std::max(max_norm, ref.norm());
  }
  return max_norm == 0.0 ? 0.0 : max_diff / max_norm;
}

ConvergenceEstimate embedding_convergence(const SystemParams& p, const DriveParams& d,
                                          const std::array<cplx, 2>& init_ab, double t_final, double dt) {
  ConvergenceEstimate e{};
  e.err_coarse = compare_embeddings(p, d, init_ab, t_final, dt);
  e.err_fine = compare_embeddings(p, d, init_ab, t_final, 0.5 * dt);
  e.ratio = e.err_fine > 0.0 ? e.err_coarse / e.err_fine : 0.0;
  e.order = e.ratio > 0.0 ? std::log2(e.ratio) : 0.0;
  return e;
}

KernelFourierCheck kernel_fourier_check(const SystemParams& p, double t, double window, std::size_t points) {
  if (points < 3 || !(window > 0.0) || !(p.omega_c() > 0.0)) {
    throw Error(ErrorCode::InvalidParameter, "kernel check needs Omega_c > 0, window > 0, >= 3 points");
  }
  const double cutoff = window * p.omega_c();
  const double h = 2.0 * cutoff / static_cast<double>(points - 1);
  // (spectral_density - gamma) is even, so only the cosine part survives.
  const auto integrand = [&](double w) { return (spectral_density(p, w) - p.gamma()) * std::cos(w * t); };
  double sum = 0.5 * (integrand(-cutoff) + integrand(cutoff));
  for (std::size_t i = 1; i + 1 < points; ++i) sum += integrand(-cutoff + h * static_cast<double>(i));
  double value = sum * h / units::kTwoPi;

  // Tail |w| > cutoff: -(gamma Oc^2 / pi) * int_A^inf cos(w t) / w^2 dw, by parts
  // = -(gamma Oc^2 / pi) * (-sin(A t) / (t A^2) + 2 cos(A t) / (t^2 A^3) + ...).
  if (t != 0.0) {
    const double a = cutoff;
    const double tail = -std::sin(a * t) / (t * a * a) + 2.0 * std::cos(a * t) / (t * t * a * a * a);
    value -= p.gamma() * p.omega_c() * p.omega_c() / std::numbers::pi * tail;
  }

  KernelFourierCheck c{};
  c.quadrature = value;
  c.closed_form = memory_kernel_smooth(p, t);
  c.rel_err = c.closed_form == 0.0 ? std::abs(value) : std::abs(value - c.closed_form) / std::abs(c.closed_form);
  return c;
}

}  // namespace eprenorm
