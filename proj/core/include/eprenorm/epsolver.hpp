#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "eprenorm/error.hpp"
#include "eprenorm/model.hpp"

namespace eprenorm {

enum class EpKind { Markovian, Perturbative, Exact };

std::string_view to_string(EpKind kind) noexcept;

/// A second-order exceptional point: drive coordinates (delta_ep, g_ep), the
/// coalesced eigenvalue and the remaining simple root. Residuals are the
/// magnitudes of p and p' of the relevant characteristic polynomial at
/// lambda_ep; second_deriv_mag is |p''(lambda_ep)|.
struct EpSolution {
  EpKind kind = EpKind::Exact;
  cplx lambda_ep;
  double delta_ep = 0.0;
  double g_ep = 0.0;
  cplx lambda_3;
  double residual_p = 0.0;
  double residual_dp = 0.0;
  double second_deriv_mag = 0.0;

  DriveParams drive() const { return {delta_ep, g_ep}; }
};

struct MechRenorm {
  double omega_eff;
  double gamma_eff;
};

/// Closed-form EP of the memoryless 2x2 problem. Throws NoMarkovianEp when
/// kappa <= gamma.
EpSolution markovian_ep(const SystemParams& p);

/// Mechanical frequency and damping dressed by the self-energy evaluated at
/// the bare mechanical pole.
MechRenorm mech_renorm(const SystemParams& p);

/// Markovian EP shifted by the leading-order memory corrections, which are
/// linear in gamma. lambda_ep is the centre of the closest root pair of the
/// full cubic at the shifted coordinates.
EpSolution perturbative_ep(const SystemParams& p);

/// Leading-order shifts alone: (delta shift, coupling shift), rad/s.
struct EpShift {
  double delta;
  double g;
};
EpShift perturbative_shift(const SystemParams& p);

/// Values of G^2 and Delta that make lambda a double root. Both are complex in
/// general; only real values with G^2 > 0 and Delta < 0 are physical.
struct EpCandidates {
  cplx g_sq;
  cplx delta;
};

/// Throws DegenerateDenominator when |g^2 + g_c^2| < 1e-12 |g|^2.
EpCandidates ep_candidates(const SystemParams& p, cplx lambda);

struct ExactEpOptions {
  /// Newton start; defaults to the Markovian coalescence value.
  std::optional<cplx> seed;
  /// Run every restart seed and keep every distinct physical root instead of
  /// stopping at the first physical one.
  bool explore_all = false;
};

/// Double-root EP of the full cubic via the two reality conditions on the
/// parametrised (G^2, Delta). Throws NoMarkovianEp (kappa <= gamma),
/// NoConvergence or NonPhysicalEp.
EpSolution solve_exact_ep(const SystemParams& p, const ExactEpOptions& options = {});

/// All distinct physical EPs reachable from the default seed and its restart
/// perturbations, best first (largest Re lambda).
std::vector<EpSolution> exact_ep_candidates(const SystemParams& p);

/// Normalised magnitudes of p, p', p'' of the full cubic at an EP. With
/// s = max(1, |c2|): rel_p = |p| / (|p''| s^2), rel_dp = |p'| / (|p''| s),
/// rel_d2p = |p''| / s.
struct OrderCertificate {
  double p_mag;
  double dp_mag;
  double d2p_mag;
  double scale;
  double rel_p;
  double rel_dp;
  double rel_d2p;
};

OrderCertificate order_certificate(const SystemParams& p, const EpSolution& sol);

class OrderCheckFailed : public Error {
 public:
  OrderCheckFailed(const OrderCertificate& cert, double tolerance);
  const OrderCertificate& certificate() const noexcept { return cert_; }

 private:
  OrderCertificate cert_;
};

/// Certifies a double (not triple) root: rel_p and rel_dp below `tolerance`,
/// rel_d2p above it. Throws OrderCheckFailed otherwise.
OrderCertificate certify_order_two(const SystemParams& p, const EpSolution& sol,
                                   double tolerance = 1e-8);

}  // namespace eprenorm
