#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "eprenorm/model.hpp"

namespace eprenorm {

/// Petermann factor of one mode. Near an exceptional point the computed value
/// is kept (finite, precision-limited) and `divergent` is set.
struct PetermannFactor {
  double value = 1.0;
  bool divergent = false;
};

/// One eigenvalue with its right eigenvector (M R = lambda R) and left
/// eigenvector (M^dagger L = conj(lambda) L).
struct EigenMode {
  cplx lambda;
  Eigen::VectorXcd right;
  Eigen::VectorXcd left;
  PetermannFactor petermann;
  /// Left/right pairing is ambiguous: the eigenvalue is (nearly) degenerate
  /// with another one, so the mode sits at or next to a defective point.
  bool defective = false;
};

struct Eigensystem {
  std::vector<EigenMode> modes;  // ordered as cubic_roots orders eigenvalues
  bool defective_pairing = false;
};

/// Eigenvalues from the characteristic polynomial (cubic_roots for 3x3,
/// quadratic formula for 2x2), eigenvectors from the null space of M - lambda I.
Eigensystem eigensystem(const DriftMatrix& m);

/// K = <L|L><R|R> / |<L|R>|^2. Divergent when |<L|R>|^2 < 1e-30 <L|L><R|R> or
/// when the mode is flagged defective.
PetermannFactor petermann(const EigenMode& mode);

/// Petermann factors of the three modes of the non-Markovian drift, in
/// eigensystem order.
std::array<PetermannFactor, 3> petermann_at(const SystemParams& p, const DriveParams& d);

/// One point of a coupling sweep. Frequencies are ordinary frequencies (Hz)
/// so rows can be written out directly.
struct SweepRow {
  double coordinate_hz = 0.0;
  std::array<cplx, 3> eigen_hz{};
  std::array<PetermannFactor, 3> petermann{};
  /// Branch whose eigenvalue lies closest to -Omega_c.
  int pseudomode_branch = 2;
  /// Eigenvalues of the memoryless 2x2 drift, when requested.
  std::optional<std::array<cplx, 2>> markovian_hz;

  /// Distance between the two optomechanical (non-pseudomode) branches.
  double hybrid_gap_hz() const;
  /// The two optomechanical branch indices, ascending.
  std::array<int, 2> hybrid_branches() const;
};

struct SweepOptions {
  /// Add 2x2 Markovian eigenvalues evaluated at this detuning (rad/s).
  std::optional<double> markovian_reference_delta;
  /// 0 = hardware concurrency.
  unsigned threads = 0;
};

/// Eigenvalues of the 3x3 drift along a coupling grid (G values in rad/s) at
/// fixed detuning. Consecutive rows are branch-matched by minimal total
/// eigenvalue displacement, so column k follows one continuous branch.
std::vector<SweepRow> sweep_eigs(const SystemParams& p, double delta, std::span<const double> g_values,
                                 const SweepOptions& options = {});

/// Same rows as sweep_eigs; the Petermann columns are the quantity of interest.
std::vector<SweepRow> sweep_petermann(const SystemParams& p, double delta,
                                      std::span<const double> g_values,
                                      const SweepOptions& options = {});

}  // namespace eprenorm
