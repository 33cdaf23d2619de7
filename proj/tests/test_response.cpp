#include <doctest.h>

#include <cmath>
#include <vector>

#include "eprenorm/epsolver.hpp"
#include "eprenorm/grid.hpp"
#include "eprenorm/response.hpp"
#include "eprenorm/units.hpp"
#include "support/oracles.hpp"

using namespace eprenorm;

namespace {

// r = 1 - kappa [(-i omega - M)^{-1}]_{aa} by a dense linear solve.
cplx resolvent_reflection(const SystemParams& p, const DriveParams& d, double omega, MechanicalModel model) {
  const Eigen::MatrixXcd m = (model == MechanicalModel::NonMarkovian ? drift_nonmarkovian(p, d) : drift_markovian(p, d)).entries();
  const Eigen::Index n = m.rows();
  const Eigen::MatrixXcd a = cplx{0.0, -omega} * Eigen::MatrixXcd::Identity(n, n) - m;
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
  e(0) = 1.0;
  return 1.0 - p.kappa() * a.partialPivLu().solve(e)(0);
}

}  // namespace

TEST_CASE("susceptibility closed forms") {
  const SystemParams p = representative_params();
  const DriveParams d(-p.omega_m(), units::khz_to_angular(48.75));
  CHECK(susceptibilities(p, d, 0.0).eta == cplx{0.0, 0.0});
  // Omega_c == omega_m at the mechanical resonance.
  const Susceptibilities s = susceptibilities(p, d, p.omega_m());
  CHECK(oracle::rel_err(s.chi_b_eff_inv, cplx{p.gamma() / 4, -p.gamma() / 4}) < 1e-12);
  CHECK(oracle::rel_err(s.chi_a_inv, cplx{p.kappa() / 2, 0.0}) < 1e-12);
}

TEST_CASE("reflection matches the resolvent of the drift matrix") {
  oracle::ParamSampler sampler(51);
  for (int i = 0; i < 50; ++i) {
    const SystemParams p = sampler.system();
    const DriveParams d = sampler.drive(p);
    const double omega = p.omega_m() * sampler.uniform(0.5, 1.5);
    for (auto model : {MechanicalModel::Markovian, MechanicalModel::NonMarkovian}) {
      const SpectrumPoint pt = reflection(p, d, omega, model);
      CHECK(oracle::rel_err(pt.r, resolvent_reflection(p, d, omega, model)) < 1e-10);
      CHECK(pt.r_sq == doctest::Approx(std::norm(pt.r)));
    }
    // Two-port unitarity of the non-Markovian scattering row.
    const SpectrumPoint nm = reflection(p, d, omega, MechanicalModel::NonMarkovian);
    CHECK(std::norm(nm.s_aa) + std::norm(nm.s_axi) == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("bare cavity reflection") {
  const SystemParams p = representative_params();
  const DriveParams d(-p.omega_m(), 0.0);
  CHECK(std::abs(reflection(p, d, p.omega_m(), MechanicalModel::NonMarkovian).r - cplx{-1.0, 0.0}) < 1e-12);
  // Without coupling the spectrum is flat at unity.
  const LinearGrid grid(p.omega_m() - 5 * p.kappa(), p.omega_m() + 5 * p.kappa(), 101);
  for (const auto& pt : spectrum(p, d, grid.values(), MechanicalModel::NonMarkovian)) {
    CHECK(pt.r_sq == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("far detuned reflection approaches unity") {
  const SystemParams p = representative_params();
  const DriveParams d(-p.omega_m(), units::khz_to_angular(48.75));
  for (double off : {-50.0, 50.0}) {
    const SpectrumPoint pt = reflection(p, d, p.omega_m() + off * p.kappa(), MechanicalModel::NonMarkovian);
    CHECK(pt.r_sq > 0.99);
  }
}

TEST_CASE("dressed poles are zeros of the response determinant") {
  oracle::ParamSampler sampler(52);
  for (int i = 0; i < 30; ++i) {
    const SystemParams p = sampler.system();
    const DriveParams d = sampler.drive(p);
    const double scale = p.omega_m() * p.kappa();
    for (cplx lam : oracle::dense_eigenvalues(drift_nonmarkovian(p, d).entries())) {
      CHECK(std::abs(response_determinant(p, d, cplx{0.0, 1.0} * lam, MechanicalModel::NonMarkovian)) < 1e-8 * scale);
    }
    for (cplx lam : oracle::dense_eigenvalues(drift_markovian(p, d).entries())) {
      CHECK(std::abs(response_determinant(p, d, cplx{0.0, 1.0} * lam, MechanicalModel::Markovian)) < 1e-8 * scale);
    }
  }
}

TEST_CASE("transparency dip at the Markovian calibration") {
  const SystemParams p = representative_params();
  const DriveParams d = markovian_ep(p).drive();
  const double closed = std::pow(1.0 - p.kappa() * p.gamma() / 2 / (p.kappa() * p.gamma() / 4 + d.g() * d.g()), 2);
  CHECK(closed == doctest::Approx(0.6555).epsilon(1e-4));

  const DipMetrics mk = dip_metrics(p, d, MechanicalModel::Markovian);
  CHECK(mk.r_sq_at_omega_m == doctest::Approx(closed).epsilon(1e-12));
  CHECK(std::abs(mk.r_sq_min - 0.65) < 0.01);
  CHECK(std::abs(mk.omega_min - p.omega_m()) < 0.01 * p.gamma());

  const DipMetrics nm = dip_metrics(p, d, MechanicalModel::NonMarkovian);
  CHECK(std::abs(nm.r_sq_min - 0.81) < 0.01);
  CHECK(nm.r_sq_min <= nm.r_sq_at_omega_m);
  CHECK(std::abs(nm.r_sq_at_omega_m - 0.81) < 0.01);
  CHECK(std::abs(nm.omega_min - p.omega_m()) < 2.0 * p.gamma());
}

TEST_CASE("non-Markovian dip at the exact EP") {
  const SystemParams p = representative_params();
  const DipMetrics nm = dip_metrics(p, solve_exact_ep(p).drive(), MechanicalModel::NonMarkovian);
  CHECK(std::abs(nm.r_sq_min - 0.81) < 0.01);
  CHECK(std::abs(nm.omega_min - p.omega_m()) < 25.0 * p.gamma());
}

TEST_CASE("dip metrics without mechanical damping") {
  const SystemParams p = representative_params().with_gamma(0.0);
  const DriveParams d(-p.omega_m(), units::khz_to_angular(48.75));
  const DipMetrics m = dip_metrics(p, d, MechanicalModel::Markovian);
  CHECK(m.omega_min == p.omega_m());
  CHECK(m.r_sq_min == m.r_sq_at_omega_m);
}

TEST_CASE("cooperativity") {
  const SystemParams p = representative_params();
  const EpSolution ep = solve_exact_ep(p);
  const Cooperativity c = cooperativity(p, ep.drive());
  CHECK(c.c == doctest::Approx(9.75).epsilon(0.01));
  CHECK(c.c_eff / c.c == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(cooperativity(p.with_gamma(0.0), ep.drive()), Error);
}

TEST_CASE("singular points are flagged in a spectrum") {
  // gamma = 0 and G = 0 put a pole of the mechanical response on the real axis.
  const SystemParams p = representative_params().with_gamma(0.0);
  const DriveParams d(-p.omega_m(), 0.0);
  CHECK_THROWS_AS(reflection(p, d, p.omega_m(), MechanicalModel::Markovian), Error);
  const std::vector<double> omegas{0.9 * p.omega_m(), p.omega_m()};
  const auto s = spectrum(p, d, omegas, MechanicalModel::Markovian);
  CHECK(!s[0].singular);
  CHECK(s[1].singular);
  CHECK(std::isnan(s[1].r_sq));
  const std::vector<double> none;
  CHECK_THROWS_AS(spectrum(p, d, none, MechanicalModel::Markovian), Error);
}
