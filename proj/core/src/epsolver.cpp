#include "eprenorm/epsolver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "eprenorm/charpoly.hpp"

namespace eprenorm {
namespace {

constexpr cplx I{0.0, 1.0};

void require_markovian_ep(const SystemParams& p) {
  if (!(p.kappa() > p.gamma())) {
    throw Error(ErrorCode::NoMarkovianEp,
                "kappa <= gamma: the Markovian EP coupling (kappa - gamma)/4 is not positive");
  }
}

// Newton settings for the reality conditions.
constexpr int kMaxIterations = 100;
constexpr int kMaxHalvings = 30;
constexpr double kResidualTol = 1e-12;  // times omega_m
constexpr double kFdStep = 1e-6;        // times max(|lambda|, Omega_c)

struct Residual {
  double r1;
  double r2;
  double norm() const { return std::hypot(r1, r2); }
};

// r1 ~ Im G (rate units), r2 = Im Delta. Both vanish exactly on a physical EP.
Residual reality_residual(const SystemParams& p, cplx lambda) {
  const EpCandidates c = ep_candidates(p, lambda);
  const double norm = 2.0 * std::max(std::sqrt(std::abs(c.g_sq)), 1e-6 * p.omega_m());
  return {c.g_sq.imag() / norm, c.delta.imag()};
}

std::optional<cplx> newton_reality(const SystemParams& p, cplx seed) {
  cplx lambda = seed;
  const double tol = kResidualTol * p.omega_m();
  Residual r;
  try {
    r = reality_residual(p, lambda);
  } catch (const Error&) {
    return std::nullopt;
  }
  for (int it = 0; it < kMaxIterations; ++it) {
    if (std::abs(r.r1) < tol && std::abs(r.r2) < tol) return lambda;

    const double h = kFdStep * std::max(std::abs(lambda), p.omega_c());
    Residual rx, ry;
    try {
      rx = reality_residual(p, lambda + h);
      ry = reality_residual(p, lambda + I * h);
    } catch (const Error&) {
      return std::nullopt;
    }
    const double j11 = (rx.r1 - r.r1) / h, j12 = (ry.r1 - r.r1) / h;
    const double j21 = (rx.r2 - r.r2) / h, j22 = (ry.r2 - r.r2) / h;
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
    const double dx = -(j22 * r.r1 - j12 * r.r2) / det;
    const double dy = -(-j21 * r.r1 + j11 * r.r2) / det;

    double scale = 1.0;
    bool accepted = false;
    for (int k = 0; k <= kMaxHalvings; ++k, scale *= 0.5) {
      const cplx trial = lambda + scale * cplx{dx, dy};
      try {
        const Residual rt = reality_residual(p, trial);
        if (std::isfinite(rt.norm()) && rt.norm() < r.norm()) {
          lambda = trial;
          r = rt;
          accepted = true;
          break;
        }
      } catch (const Error&) {
      }
    }
    if (!accepted) {
      // Stalled at round-off: accept if already essentially converged.
      if (std::abs(r.r1) < 10 * tol && std::abs(r.r2) < 10 * tol) return lambda;
      return std::nullopt;
    }
  }
  if (std::abs(r.r1) < tol && std::abs(r.r2) < tol) return lambda;
  return std::nullopt;
}

void fill_residuals(const SystemParams& p, EpSolution& sol) {
  const CubicPoly q = char_cubic(p, sol.drive());
  sol.residual_p = std::abs(q(sol.lambda_ep));
  sol.residual_dp = std::abs(q.derivative(sol.lambda_ep));
  sol.second_deriv_mag = std::abs(q.second_derivative(sol.lambda_ep));
}

std::optional<EpSolution> physical_solution(const SystemParams& p, cplx lambda) {
  const EpCandidates c = ep_candidates(p, lambda);
  if (!(c.g_sq.real() > 0.0) || !(-c.delta.real() > 0.0)) return std::nullopt;
  EpSolution sol;
  sol.kind = EpKind::Exact;
  sol.lambda_ep = lambda;
  sol.g_ep = std::sqrt(c.g_sq.real());
  sol.delta_ep = c.delta.real();
  sol.lambda_3 = third_root_viete(p, sol.delta_ep, lambda);
  fill_residuals(p, sol);
  return sol;
}

std::vector<cplx> restart_seeds(cplx seed) {
  std::vector<cplx> seeds;
  for (const double m : {0.01, 0.02, 0.05}) {
    for (const double sx : {1.0, -1.0}) {
      for (const double sy : {1.0, -1.0}) {
        seeds.emplace_back(seed.real() * (1.0 + sx * m), seed.imag() * (1.0 + sy * m));
      }
    }
  }
  return seeds;
}

cplx markovian_coalescence(const SystemParams& p) {
  return {-0.25 * (p.kappa() + p.gamma()), -p.omega_m()};
}

struct SearchOutcome {
  std::vector<EpSolution> physical;
  bool any_converged = false;
};

SearchOutcome search(const SystemParams& p, cplx seed, bool explore_all) {
  SearchOutcome out;
  std::vector<cplx> seeds{seed};
  const std::vector<cplx> restarts = restart_seeds(seed);
  seeds.insert(seeds.end(), restarts.begin(), restarts.end());

  for (const cplx s : seeds) {
    const std::optional<cplx> root = newton_reality(p, s);
    if (!root) continue;
    out.any_converged = true;
    const std::optional<EpSolution> sol = physical_solution(p, *root);
    if (!sol) continue;
    const bool duplicate = std::any_of(out.physical.begin(), out.physical.end(), [&](const EpSolution& e) {
      return std::abs(e.lambda_ep - sol->lambda_ep) <= 1e-6 * std::abs(sol->lambda_ep);
    });
    if (!duplicate) out.physical.push_back(*sol);
    if (!explore_all) break;
  }
  // The slowest-decaying pair dominates experimentally.
  std::stable_sort(out.physical.begin(), out.physical.end(), [](const EpSolution& a, const EpSolution& b) {
    return a.lambda_ep.real() > b.lambda_ep.real();
  });
  return out;
}

}  // namespace

std::string_view to_string(EpKind kind) noexcept {
  switch (kind) {
    case EpKind::Markovian: return "markovian";
    case EpKind::Perturbative: return "perturbative";
    case EpKind::Exact: return "exact";
  }
  return "unknown";
}

EpSolution markovian_ep(const SystemParams& p) {
  require_markovian_ep(p);
  EpSolution sol;
  sol.kind = EpKind::Markovian;
  sol.delta_ep = -p.omega_m();
  sol.g_ep = 0.25 * (p.kappa() - p.gamma());
  sol.lambda_ep = markovian_coalescence(p);
  // Pseudomode decoupled: its eigenvalue stays at -Omega_c.
  sol.lambda_3 = -p.omega_c();

  // Residuals of the 2x2 characteristic quadratic.
  const cplx lam = sol.lambda_ep;
  const cplx u = lam - I * sol.delta_ep + 0.5 * p.kappa();
  const cplx v = lam + I * p.omega_m() + 0.5 * p.gamma();
  sol.residual_p = std::abs(u * v + sol.g_ep * sol.g_ep);
  sol.residual_dp = std::abs(u + v);
  sol.second_deriv_mag = 2.0;
  return sol;
}

MechRenorm mech_renorm(const SystemParams& p) {
  const double oc2 = p.omega_c() * p.omega_c();
  const double wm2 = p.omega_m() * p.omega_m();
  const double denom = oc2 + wm2;
  return {p.omega_m() * (1.0 - p.gamma() * p.omega_c() / (2.0 * denom)),
          p.gamma() * wm2 / denom};
}

EpShift perturbative_shift(const SystemParams& p) {
  const double oc = p.omega_c();
  const double denom = oc * oc + p.omega_m() * p.omega_m();
  return {p.omega_m() * p.gamma() * oc / (2.0 * denom), p.gamma() * oc * oc / (4.0 * denom)};
}

EpSolution perturbative_ep(const SystemParams& p) {
  const EpSolution base = markovian_ep(p);
  const EpShift shift = perturbative_shift(p);
  EpSolution sol;
  sol.kind = EpKind::Perturbative;
  sol.delta_ep = base.delta_ep + shift.delta;
  sol.g_ep = base.g_ep + shift.g;

  const std::array<cplx, 3> roots = cubic_roots(char_cubic(p, sol.drive()));
  std::size_t a = 0, b = 1;
  double best = std::abs(roots[0] - roots[1]);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i + 1; j < 3; ++j) {
      if (std::abs(roots[i] - roots[j]) < best) {
        best = std::abs(roots[i] - roots[j]);
        a = i;
        b = j;
      }
    }
  }
  sol.lambda_ep = 0.5 * (roots[a] + roots[b]);
  sol.lambda_3 = third_root_viete(p, sol.delta_ep, sol.lambda_ep);
  fill_residuals(p, sol);
  return sol;
}

EpCandidates ep_candidates(const SystemParams& p, cplx lambda) {
  const FactorTriple t = factors(p, lambda);
  const cplx denom = t.g * t.g + p.g_c_sq();
  const double scale = std::max(std::norm(t.g), p.g_c_sq());
  if (scale == 0.0 || std::abs(denom) < 1e-12 * scale) {
    throw Error(ErrorCode::DegenerateDenominator, "g(lambda)^2 + g_c^2 vanishes");
  }
  return {t.h * t.h / denom, -I * (lambda + 0.5 * p.kappa() + t.g * t.h / denom)};
}

EpSolution solve_exact_ep(const SystemParams& p, const ExactEpOptions& options) {
  require_markovian_ep(p);
  const cplx seed = options.seed.value_or(markovian_coalescence(p));
  const SearchOutcome out = search(p, seed, options.explore_all);
  if (!out.physical.empty()) return out.physical.front();
  std::ostringstream msg;
  msg << "reality conditions from seed (" << seed.real() << ", " << seed.imag() << ") rad/s";
  if (!out.any_converged) {
    throw Error(ErrorCode::NoConvergence, msg.str() + " did not converge after 12 restarts");
  }
  throw Error(ErrorCode::NonPhysicalEp, msg.str() + " converged only to roots with G^2 <= 0 or Delta >= 0");
}

std::vector<EpSolution> exact_ep_candidates(const SystemParams& p) {
  require_markovian_ep(p);
  return search(p, markovian_coalescence(p), /*explore_all=*/true).physical;
}

OrderCertificate order_certificate(const SystemParams& p, const EpSolution& sol) {
  const CubicPoly q = char_cubic(p, sol.drive());
  OrderCertificate c{};
  c.p_mag = std::abs(q(sol.lambda_ep));
  c.dp_mag = std::abs(q.derivative(sol.lambda_ep));
  c.d2p_mag = std::abs(q.second_derivative(sol.lambda_ep));
  c.scale = std::max(1.0, std::abs(q.c2));
  const double d2 = c.d2p_mag > 0.0 ? c.d2p_mag : 1e-300;
  c.rel_p = c.p_mag / (d2 * c.scale * c.scale);
  c.rel_dp = c.dp_mag / (d2 * c.scale);
  c.rel_d2p = c.d2p_mag / c.scale;
  return c;
}

namespace {
std::string describe(const OrderCertificate& c, double tol) {
  std::ostringstream s;
  s << "|p| = " << c.p_mag << ", |p'| = " << c.dp_mag << ", |p''| = " << c.d2p_mag
    << " (normalised " << c.rel_p << ", " << c.rel_dp << ", " << c.rel_d2p << "; tolerance " << tol
    << ")";
  return s.str();
}
}  // namespace

OrderCheckFailed::OrderCheckFailed(const OrderCertificate& cert, double tolerance)
    : Error(ErrorCode::OrderCheckFailed, describe(cert, tolerance)), cert_(cert) {}

OrderCertificate certify_order_two(const SystemParams& p, const EpSolution& sol, double tolerance) {
  const OrderCertificate c = order_certificate(p, sol);
  if (!(c.rel_p < tolerance && c.rel_dp < tolerance && c.rel_d2p > tolerance)) {
    throw OrderCheckFailed(c, tolerance);
  }
  return c;
}

}  // namespace eprenorm
