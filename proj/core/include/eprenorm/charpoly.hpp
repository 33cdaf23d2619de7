#pragma once

#include <array>

#include <Eigen/Dense>

#include "eprenorm/model.hpp"

namespace eprenorm {

/// Monic cubic lambda^3 + c2 lambda^2 + c1 lambda + c0.
struct CubicPoly {
  cplx c3{1.0, 0.0};
  cplx c2;
  cplx c1;
  cplx c0;

  cplx operator()(cplx x) const noexcept { return ((c3 * x + c2) * x + c1) * x + c0; }
  cplx derivative(cplx x) const noexcept { return (3.0 * c3 * x + 2.0 * c2) * x + c1; }
  cplx second_derivative(cplx x) const noexcept { return 6.0 * c3 * x + 2.0 * c2; }

  /// Magnitude used for relative root residuals: max(1, |c2|^3).
  double residual_scale() const noexcept;
};

/// f = lambda + i omega_m + gamma/2, g = lambda + Omega_c, h = g f - g_c^2.
struct FactorTriple {
  cplx f;
  cplx g;
  cplx h;
};

FactorTriple factors(const SystemParams& p, cplx lambda);

/// g_c^2 / (Omega_c + lambda). Throws PolePseudomode when
/// |lambda + Omega_c| < 1e-9 Omega_c.
cplx self_energy(const SystemParams& p, cplx lambda);

/// det(lambda I - M) of the 3x3 drift, expanded into monomial coefficients.
CubicPoly char_cubic(const SystemParams& p, const DriveParams& d);

/// Characteristic polynomial of an arbitrary 3x3 matrix from its invariants
/// (trace, sum of principal 2x2 minors, determinant).
CubicPoly char_cubic(const Eigen::Matrix3cd& m);

/// The factored form (lambda - i Delta + kappa/2) h(lambda) + g(lambda) G^2.
/// Evaluates the same polynomial as char_cubic through a separate code path.
cplx char_compact(const SystemParams& p, const DriveParams& d, cplx lambda);

/// Roots of a monic cubic, each polished by one guarded Newton step. Sorted by
/// ascending imaginary part, ties broken by ascending real part. Repeated
/// roots are reported with multiplicity.
std::array<cplx, 3> cubic_roots(const CubicPoly& q);

/// Effective optomechanical block after eliminating the pseudomode:
/// [[i Delta - kappa/2, -iG], [-iG, -(i omega_m + gamma/2) + Sigma(lambda)]].
Eigen::Matrix2cd schur_effective_block(const SystemParams& p, const DriveParams& d, cplx lambda);

/// Third root from the root sum once the double root is known.
cplx third_root_viete(const SystemParams& p, double delta, cplx lambda_ep);

}  // namespace eprenorm
