#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "eprenorm/epsolver.hpp"
#include "eprenorm/grid.hpp"
#include "eprenorm/spectral.hpp"
#include "eprenorm/units.hpp"
#include "support/oracles.hpp"

using namespace eprenorm;

namespace {

double residual(const Eigen::MatrixXcd& m, const EigenMode& mode) {
  const double right = (m * mode.right - mode.lambda * mode.right).norm() / mode.right.norm();
  const double left = (m.adjoint() * mode.left - std::conj(mode.lambda) * mode.left).norm() / mode.left.norm();
  return std::max(right, left) / m.norm();
}

std::vector<double> sorted_k(const Eigensystem& es) {
  std::vector<double> k;
  for (const auto& m : es.modes) k.push_back(m.petermann.value);
  std::sort(k.begin(), k.end());
  return k;
}

std::vector<double> khz_grid(double lo, double hi, std::size_t n) {
  const LinearGrid g(units::khz_to_angular(lo), units::khz_to_angular(hi), n);
  return g.values();
}

}  // namespace

TEST_CASE("normal matrices have unit Petermann factor") {
  SUBCASE("diagonal") {
    Eigen::MatrixXcd m(3, 3);
    m << cplx{-1, 2}, 0, 0, 0, cplx{-3, 0}, 0, 0, 0, cplx{-0.5, -4};
    const Eigensystem es = eigensystem(DriftMatrix(m));
    CHECK(!es.defective_pairing);
    for (const auto& mode : es.modes) {
      CHECK(mode.petermann.value == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(!mode.petermann.divergent);
    }
  }
  SUBCASE("hermitian") {
    Eigen::MatrixXcd m(3, 3);
    m << 2.0, cplx{1, 1}, 0.5, cplx{1, -1}, -1.0, cplx{0, 2}, 0.5, cplx{0, -2}, 0.3;
    for (const auto& mode : eigensystem(DriftMatrix(m)).modes) {
      CHECK(mode.petermann.value == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("eigenvectors satisfy the eigen equations and are biorthogonal") {
  oracle::ParamSampler s(41);
  for (int i = 0; i < 50; ++i) {
    const SystemParams p = s.system();
    const DriveParams d = s.drive(p);
    const DriftMatrix m = drift_nonmarkovian(p, d);
    const Eigensystem es = eigensystem(m);
    REQUIRE(es.modes.size() == 3);
    if (es.defective_pairing) continue;
    for (int a = 0; a < 3; ++a) {
      CHECK(residual(m.entries(), es.modes[a]) < 1e-10);
      for (int b = 0; b < 3; ++b) {
        if (a == b) continue;
        const cplx overlap = es.modes[a].left.dot(es.modes[b].right);
        CHECK(std::abs(overlap) < 1e-8 * es.modes[a].left.norm() * es.modes[b].right.norm());
      }
    }
    std::vector<cplx> mine;
    for (const auto& mode : es.modes) mine.push_back(mode.lambda);
    const auto dense = oracle::dense_eigenvalues(m.entries());
    CHECK(oracle::set_distance(mine, dense) < 1e-9 * m.entries().norm());
    CHECK(oracle::set_distance(dense, mine) < 1e-9 * m.entries().norm());

    const auto ref = oracle::dense_petermann(m.entries());
    std::vector<double> sref(ref.begin(), ref.end());
    std::sort(sref.begin(), sref.end());
    const auto got = sorted_k(es);
    for (int j = 0; j < 3; ++j) CHECK(oracle::rel_err(got[j], sref[j]) < 1e-6);
  }
}

TEST_CASE("2x2 exceptional point is flagged") {
  Eigen::MatrixXcd m(2, 2);
  m << 0.0, 1.0, 0.0, 0.0;  // Jordan block
  const Eigensystem es = eigensystem(DriftMatrix(m));
  CHECK(es.defective_pairing);
  for (const auto& mode : es.modes) CHECK(mode.petermann.divergent);

  const SystemParams p = representative_params();
  const EpSolution mk = markovian_ep(p);
  const Eigensystem markov = eigensystem(drift_markovian(p, mk.drive()));
  for (const auto& mode : markov.modes) CHECK(mode.petermann.divergent);
}

TEST_CASE("Petermann factors at the exact EP") {
  const SystemParams p = representative_params();
  const EpSolution ep = solve_exact_ep(p);
  const Eigensystem es = eigensystem(drift_nonmarkovian(p, ep.drive()));
  int divergent = 0;
  for (const auto& mode : es.modes) {
    if (std::abs(mode.lambda - ep.lambda_3) < 1e-3 * std::abs(ep.lambda_3)) {
      CHECK(!mode.petermann.divergent);
      CHECK(mode.petermann.value == doctest::Approx(1.0025).epsilon(0.0005));
    } else {
      CHECK(mode.petermann.value >= 1e10);
      CHECK(mode.petermann.divergent);
      ++divergent;
    }
  }
  CHECK(divergent == 2);
}

TEST_CASE("Petermann factors at the Markovian calibration stay finite") {
  const SystemParams p = representative_params();
  const auto k = petermann_at(p, markovian_ep(p).drive());
  std::vector<double> v;
  for (const auto& f : k) {
    CHECK(!f.divergent);
    v.push_back(f.value);
  }
  std::sort(v.begin(), v.end());
  CHECK(v[0] == doctest::Approx(1.0025).epsilon(0.0005));
  CHECK(v[1] == doctest::Approx(27.6).epsilon(0.5 / 27.6));
  CHECK(v[2] == doctest::Approx(27.6).epsilon(0.5 / 27.6));
}

TEST_CASE("decoupled cavity leaves the mechanics-pseudomode block") {
  const SystemParams p = representative_params();
  const DriveParams d(-p.omega_m(), 0.0);
  const DriftMatrix m = drift_nonmarkovian(p, d);
  const auto k = sorted_k(eigensystem(m));
  CHECK(k[0] == doctest::Approx(1.0).epsilon(1e-12));
  const Eigen::MatrixXcd block = m.entries().bottomRightCorner(2, 2);
  auto ref = oracle::dense_petermann(block);
  std::sort(ref.begin(), ref.end());
  CHECK(oracle::rel_err(k[1], ref[0]) < 1e-9);
  CHECK(oracle::rel_err(k[2], ref[1]) < 1e-9);
}

TEST_CASE("weak drive keeps modes near-orthogonal") {
  const SystemParams p = representative_params();
  const EpSolution ep = solve_exact_ep(p);
  for (const auto& f : petermann_at(p, DriveParams(ep.delta_ep, ep.g_ep / 10))) CHECK(f.value < 2.0);
}

TEST_CASE("Petermann growth under grid refinement toward the EP") {
  const SystemParams p = representative_params();
  const EpSolution ep = solve_exact_ep(p);
  double prev = 0.0;
  for (double frac : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const auto k = petermann_at(p, DriveParams(ep.delta_ep, ep.g_ep * (1.0 - frac)));
    double kmax = 0.0;
    for (const auto& f : k) kmax = std::max(kmax, f.value);
    CHECK(kmax > prev);
    prev = kmax;
  }
  CHECK(prev > 100.0);
}

TEST_CASE("eigenvalue sweep tracks branches through the EP") {
  const SystemParams p = representative_params();
  const EpSolution ep = solve_exact_ep(p);
  const auto g = khz_grid(40, 60, 401);
  const auto rows = sweep_eigs(p, ep.delta_ep, g, {.markovian_reference_delta = -p.omega_m()});
  REQUIRE(rows.size() == g.size());

  std::size_t argmin = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].hybrid_gap_hz() < rows[argmin].hybrid_gap_hz()) argmin = i;
    CHECK(rows[i].markovian_hz.has_value());
    // The pseudomode-like branch sits near -Omega_c on the real axis.
    const cplx pm = rows[i].eigen_hz[rows[i].pseudomode_branch];
    CHECK(std::abs(pm.real() + units::angular_to_hz(p.omega_c())) < 0.01 * units::angular_to_hz(p.omega_c()));
  }
  CHECK(std::abs(rows[argmin].coordinate_hz - units::angular_to_hz(ep.g_ep)) <= 50.0 + 1e-6);
  // Set equality with the dense oracle row by row.
  for (std::size_t i = 0; i < rows.size(); i += 40) {
    const auto dense = oracle::dense_eigenvalues(drift_nonmarkovian(p, DriveParams(ep.delta_ep, g[i])).entries());
    std::vector<cplx> mine;
    for (cplx v : rows[i].eigen_hz) mine.push_back(units::hz_to_angular(v));
    CHECK(oracle::set_distance(mine, dense) < 1e-6 * p.omega_m());
    CHECK(oracle::set_distance(dense, mine) < 1e-6 * p.omega_m());
  }
  // Continuity: no branch jumps by more than a few grid steps of eigenvalue motion.
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (int b = 0; b < 3; ++b) {
      CHECK(std::abs(rows[i].eigen_hz[b] - rows[i - 1].eigen_hz[b]) < 5e3);
    }
  }
}

TEST_CASE("Petermann sweep peaks at the EP") {
  const SystemParams p = representative_params();
  const EpSolution ep = solve_exact_ep(p);
  const auto g = khz_grid(40, 60, 401);
  const auto rows = sweep_petermann(p, ep.delta_ep, g);
  std::size_t argmax = 0;
  double kmax = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (const auto& f : rows[i].petermann) {
      if (f.value > kmax) {
        kmax = f.value;
        argmax = i;
      }
    }
  }
  CHECK(std::abs(rows[argmax].coordinate_hz - units::angular_to_hz(ep.g_ep)) <= 50.0 + 1e-6);
}

TEST_CASE("sweep input validation") {
  const SystemParams p = representative_params();
  const std::vector<double> one{1.0};
  CHECK_THROWS_AS(sweep_eigs(p, -p.omega_m(), one), Error);
  const std::vector<double> bad{1.0, -1.0};
  CHECK_THROWS_AS(sweep_eigs(p, -p.omega_m(), bad), Error);
}
