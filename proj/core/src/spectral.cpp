#include "eprenorm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "eprenorm/charpoly.hpp"
#include "eprenorm/error.hpp"
#include "eprenorm/parallel.hpp"
#include "eprenorm/units.hpp"

namespace eprenorm {
namespace {

constexpr double kPairingRatio = 1e-3;
constexpr double kDivergenceRatio = 1e-30;

bool root_order(cplx a, cplx b) {
  if (a.imag() != b.imag()) return a.imag() < b.imag();
  return a.real() < b.real();
}

std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& m) {
  if (m.rows() == 3) {
    const auto r = cubic_roots(char_cubic(Eigen::Matrix3cd(m)));
    return {r.begin(), r.end()};
  }
  const cplx half_trace = 0.5 * (m(0, 0) + m(1, 1));
  const cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  const cplx root = std::sqrt(half_trace * half_trace - det);
  std::vector<cplx> v{half_trace - root, half_trace + root};
  std::sort(v.begin(), v.end(), root_order);
  return v;
}

Eigen::VectorXcd cross(const Eigen::Vector3cd& a, const Eigen::Vector3cd& b) {
  // Bilinear (unconjugated) cross product: orthogonal to both rows under the
  // plain dot product, which is what A v = 0 needs.
  Eigen::VectorXcd c(3);
  c(0) = a(1) * b(2) - a(2) * b(1);
  c(1) = a(2) * b(0) - a(0) * b(2);
  c(2) = a(0) * b(1) - a(1) * b(0);
  return c;
}

Eigen::VectorXcd inverse_iteration(const Eigen::MatrixXcd& m, cplx lambda) {
  const Eigen::Index n = m.rows();
  const double shift = 1e-10 * std::max(m.norm(), 1.0);
  const Eigen::MatrixXcd a = m - (lambda + shift) * Eigen::MatrixXcd::Identity(n, n);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  Eigen::VectorXcd x = Eigen::VectorXcd::Ones(n);
  for (int k = 0; k < 3; ++k) {
    x = lu.solve(x);
    x /= x.norm();
  }
  return x;
}

// Null vector of (m - lambda I).
Eigen::VectorXcd null_vector(const Eigen::MatrixXcd& m, cplx lambda) {
  const Eigen::Index n = m.rows();
  const Eigen::MatrixXcd a = m - lambda * Eigen::MatrixXcd::Identity(n, n);
  const double norm2 = m.squaredNorm();
  Eigen::VectorXcd best;
  double best_norm = -1.0;
  if (n == 2) {
    Eigen::VectorXcd v1(2), v2(2);
    v1 << -a(0, 1), a(0, 0);
    v2 << a(1, 1), -a(1, 0);
    best = v1.norm() >= v2.norm() ? v1 : v2;
    best_norm = best.norm();
  } else {
    const Eigen::Vector3cd r0 = a.row(0).transpose();
    const Eigen::Vector3cd r1 = a.row(1).transpose();
    const Eigen::Vector3cd r2 = a.row(2).transpose();
    for (const Eigen::VectorXcd& c : {cross(r0, r1), cross(r0, r2), cross(r1, r2)}) {
      if (c.norm() > best_norm) {
        best_norm = c.norm();
        best = c;
      }
    }
  }
  if (!(best_norm > 1e-12 * norm2)) return inverse_iteration(m, lambda);
  return best / best_norm;
}

}  // namespace

PetermannFactor petermann(const EigenMode& mode) {
  const double ll = mode.left.squaredNorm();
  const double rr = mode.right.squaredNorm();
  const double overlap = std::norm(mode.left.dot(mode.right));
  PetermannFactor k;
  if (overlap == 0.0) {
    k.value = std::numeric_limits<double>::max();
    k.divergent = true;
    return k;
  }
  k.value = ll * rr / overlap;
  k.divergent = mode.defective || overlap < kDivergenceRatio * ll * rr;
  return k;
}

Eigensystem eigensystem(const DriftMatrix& drift) {
  const Eigen::MatrixXcd& m = drift.entries();
  const Eigen::Index n = m.rows();
  const Eigen::MatrixXcd adj = m.adjoint();

  const std::vector<cplx> right_vals = eigenvalues(m);
  std::vector<cplx> left_vals = eigenvalues(adj);
  for (cplx& v : left_vals) v = std::conj(v);

  const cplx centroid = m.trace() / static_cast<double>(n);
  const double spread = (m - centroid * Eigen::MatrixXcd::Identity(n, n)).norm();
  const double tol = kPairingRatio * spread;

  // Greedy nearest matching: repeatedly take the globally closest pair.
  std::vector<int> match(n, -1);
  std::vector<bool> used(n, false);
  for (Eigen::Index round = 0; round < n; ++round) {
    double best = std::numeric_limits<double>::infinity();
    int bi = -1, bj = -1;
    for (int i = 0; i < n; ++i) {
      if (match[i] >= 0) continue;
      for (int j = 0; j < n; ++j) {
        if (used[j]) continue;
        const double dist = std::abs(right_vals[i] - left_vals[j]);
        if (dist < best) {
          best = dist;
          bi = i;
          bj = j;
        }
      }
    }
    match[bi] = bj;
    used[bj] = true;
  }

  Eigensystem out;
  out.modes.resize(n);
  for (int i = 0; i < n; ++i) {
    EigenMode& mode = out.modes[i];
    mode.lambda = right_vals[i];
    const cplx paired = left_vals[match[i]];
    double gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j != i) gap = std::min(gap, std::abs(right_vals[i] - right_vals[j]));
    }
    mode.defective = std::abs(mode.lambda - paired) > tol || gap < tol;
    out.defective_pairing = out.defective_pairing || mode.defective;

    mode.right = null_vector(m, mode.lambda);
    mode.left = null_vector(adj, std::conj(paired));
  }
  for (EigenMode& mode : out.modes) mode.petermann = petermann(mode);
  return out;
}

std::array<PetermannFactor, 3> petermann_at(const SystemParams& p, const DriveParams& d) {
  const Eigensystem es = eigensystem(drift_nonmarkovian(p, d));
  return {es.modes[0].petermann, es.modes[1].petermann, es.modes[2].petermann};
}

std::array<int, 2> SweepRow::hybrid_branches() const {
  std::array<int, 2> idx{};
  int k = 0;
  for (int i = 0; i < 3; ++i) {
    if (i != pseudomode_branch) idx[k++] = i;
  }
  return idx;
}

double SweepRow::hybrid_gap_hz() const {
  const auto [a, b] = hybrid_branches();
  return std::abs(eigen_hz[a] - eigen_hz[b]);
}

namespace {

template <std::size_t N>
std::array<int, N> best_permutation(const std::array<cplx, N>& prev, const std::array<cplx, N>& next) {
  std::array<int, N> perm{};
  std::iota(perm.begin(), perm.end(), 0);
  std::array<int, N> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t k = 0; k < N; ++k) cost += std::abs(prev[k] - next[perm[k]]);
    if (cost < best_cost) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

int closest_to(const std::array<cplx, 3>& v, cplx target) {
  int best = 0;
  for (int i = 1; i < 3; ++i) {
    if (std::abs(v[i] - target) < std::abs(v[best] - target)) best = i;
  }
  return best;
}

}  // namespace

std::vector<SweepRow> sweep_eigs(const SystemParams& p, double delta, std::span<const double> g_values,
                                 const SweepOptions& options) {
  if (g_values.size() < 2) throw Error(ErrorCode::InvalidParameter, "sweep grid needs at least 2 points");

  std::vector<SweepRow> rows(g_values.size());
  parallel_for(g_values.size(), options.threads, [&](std::size_t i) {
    const DriveParams d(delta, g_values[i]);
    const Eigensystem es = eigensystem(drift_nonmarkovian(p, d));
    SweepRow& row = rows[i];
    row.coordinate_hz = units::angular_to_hz(g_values[i]);
    for (int k = 0; k < 3; ++k) {
      row.eigen_hz[k] = units::angular_to_hz(es.modes[k].lambda);
      row.petermann[k] = es.modes[k].petermann;
    }
    if (options.markovian_reference_delta) {
      const Eigensystem mk = eigensystem(drift_markovian(p, DriveParams(*options.markovian_reference_delta, g_values[i])));
      row.markovian_hz = std::array<cplx, 2>{units::angular_to_hz(mk.modes[0].lambda),
                                             units::angular_to_hz(mk.modes[1].lambda)};
    }
  });

  const cplx pseudo_hz = units::angular_to_hz(cplx{-p.omega_c(), 0.0});

  // First row: optomechanical branches first, pseudomode-like branch last.
  {
    SweepRow& first = rows.front();
    const int pm = closest_to(first.eigen_hz, pseudo_hz);
    std::array<int, 3> order{};
    int k = 0;
    for (int i = 0; i < 3; ++i) {
      if (i != pm) order[k++] = i;
    }
    order[2] = pm;
    const auto e = first.eigen_hz;
    const auto pk = first.petermann;
    for (int i = 0; i < 3; ++i) {
      first.eigen_hz[i] = e[order[i]];
      first.petermann[i] = pk[order[i]];
    }
    first.pseudomode_branch = 2;
  }

  for (std::size_t i = 1; i < rows.size(); ++i) {
    SweepRow& row = rows[i];
    const auto perm = best_permutation(rows[i - 1].eigen_hz, row.eigen_hz);
    const auto e = row.eigen_hz;
    const auto pk = row.petermann;
    for (int k = 0; k < 3; ++k) {
      row.eigen_hz[k] = e[perm[k]];
      row.petermann[k] = pk[perm[k]];
    }
    row.pseudomode_branch = closest_to(row.eigen_hz, pseudo_hz);
    if (row.markovian_hz && rows[i - 1].markovian_hz) {
      const auto mp = best_permutation(*rows[i - 1].markovian_hz, *row.markovian_hz);
      const auto mv = *row.markovian_hz;
      row.markovian_hz = std::array<cplx, 2>{mv[mp[0]], mv[mp[1]]};
    }
  }
  return rows;
}

std::vector<SweepRow> sweep_petermann(const SystemParams& p, double delta,
                                      std::span<const double> g_values, const SweepOptions& options) {
  return sweep_eigs(p, delta, g_values, options);
}

}  // namespace eprenorm
