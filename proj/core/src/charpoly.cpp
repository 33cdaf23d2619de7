#include "eprenorm/charpoly.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "eprenorm/error.hpp"

namespace eprenorm {
namespace {

constexpr cplx I{0.0, 1.0};

void check_pseudomode_pole(const SystemParams& p, cplx lambda) {
  if (std::abs(lambda + p.omega_c()) < 1e-9 * p.omega_c()) {
    throw Error(ErrorCode::PolePseudomode, "evaluation at lambda = -Omega_c");
  }
}

bool root_order(cplx a, cplx b) {
  if (a.imag() != b.imag()) return a.imag() < b.imag();
  return a.real() < b.real();
}

}  // namespace

double CubicPoly::residual_scale() const noexcept {
  const double s = std::abs(c2);
  return std::max(1.0, s * s * s);
}

FactorTriple factors(const SystemParams& p, cplx lambda) {
  const cplx f = lambda + I * p.omega_m() + 0.5 * p.gamma();
  const cplx g = lambda + p.omega_c();
  return {f, g, g * f - p.g_c_sq()};
}

cplx self_energy(const SystemParams& p, cplx lambda) {
  if (p.g_c_sq() == 0.0) return {0.0, 0.0};
  check_pseudomode_pole(p, lambda);
  return p.g_c_sq() / (p.omega_c() + lambda);
}

CubicPoly char_cubic(const SystemParams& p, const DriveParams& d) {
  // (lambda + Oc)[(lambda + A)(lambda + B) + G^2] - gc^2 (lambda + B)
  const cplx a = I * p.omega_m() + 0.5 * p.gamma();
  const cplx b = -I * d.delta() + 0.5 * p.kappa();
  const double oc = p.omega_c();
  const double g2 = d.g() * d.g();
  const double gc2 = p.g_c_sq();
  CubicPoly q;
  q.c2 = a + b + oc;
  q.c1 = a * b + g2 + oc * (a + b) - gc2;
  q.c0 = oc * (a * b + g2) - gc2 * b;
  return q;
}

CubicPoly char_cubic(const Eigen::Matrix3cd& m) {
  const cplx minors = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) + m(0, 0) * m(2, 2) -
                      m(0, 2) * m(2, 0) + m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
  CubicPoly q;
  q.c2 = -m.trace();
  q.c1 = minors;
  q.c0 = -m.determinant();
  return q;
}

cplx char_compact(const SystemParams& p, const DriveParams& d, cplx lambda) {
  const FactorTriple t = factors(p, lambda);
  return (lambda - I * d.delta() + 0.5 * p.kappa()) * t.h + t.g * d.g() * d.g();
}

std::array<cplx, 3> cubic_roots(const CubicPoly& q) {
  const CubicPoly mq{1.0, q.c2 / q.c3, q.c1 / q.c3, q.c0 / q.c3};

  // Rescale lambda = s mu so the companion matrix is O(1); the rates in this
  // problem span ~13 orders of magnitude across the coefficients.
  const double s = std::max({std::abs(mq.c2), std::sqrt(std::abs(mq.c1)), std::cbrt(std::abs(mq.c0))});
  std::array<cplx, 3> roots{};
  if (s == 0.0) return roots;

  Eigen::Matrix3cd companion = Eigen::Matrix3cd::Zero();
  companion(0, 0) = -mq.c2 / s;
  companion(0, 1) = -mq.c1 / (s * s);
  companion(0, 2) = -mq.c0 / (s * s * s);
  companion(1, 0) = 1.0;
  companion(2, 1) = 1.0;

  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> solver(companion, /*computeEigenvectors=*/false);
  for (int i = 0; i < 3; ++i) roots[i] = s * solver.eigenvalues()(i);

  for (cplx& r : roots) {
    const cplx pr = mq(r);
    const cplx dp = mq.derivative(r);
    if (dp == cplx{}) continue;
    const cplx candidate = r - pr / dp;
    // Near a double root p' ~ 0 and a raw step can throw the root away.
    if (std::isfinite(candidate.real()) && std::isfinite(candidate.imag()) &&
        std::abs(mq(candidate)) <= std::abs(pr)) {
      r = candidate;
    }
  }
  std::sort(roots.begin(), roots.end(), root_order);
  return roots;
}

Eigen::Matrix2cd schur_effective_block(const SystemParams& p, const DriveParams& d, cplx lambda) {
  Eigen::Matrix2cd m = drift_markovian(p, d).entries();
  m(1, 1) += self_energy(p, lambda);
  return m;
}

cplx third_root_viete(const SystemParams& p, double delta, cplx lambda_ep) {
  const cplx root_sum = -(p.omega_c() + 0.5 * p.gamma() + 0.5 * p.kappa() +
                          I * (p.omega_m() - delta));
  return root_sum - 2.0 * lambda_ep;
}

}  // namespace eprenorm
