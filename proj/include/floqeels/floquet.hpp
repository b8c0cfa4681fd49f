// Truncated Floquet eigenproblem for the periodically driven atom.
#pragma once

#include <Eigen/Dense>

#include "floqeels/common.hpp"
#include "floqeels/model.hpp"

namespace floqeels {

struct FloquetSolution {
  int n_levels = 0;
  int l_max = 0;
  double omega_l = 0.0;
  // Band-assigned quasienergies: band j is adiabatically connected to the
  // bare level j and its quasienergy is stored on the replica closest to
  // energies[j] (subject to the coupling-lattice sector constraint).
  Eigen::VectorXd omega_tilde;
  // Same bands folded into the fundamental window (-omega_l/2, omega_l/2].
  Eigen::VectorXd omega_folded;
  HarmonicTensor<double> coeffs;  // f(j, a, l) in the band-assigned gauge
  bool converged = false;
  double residual = 0.0;  // max quasienergy change over the last truncation step

  double f(int j, int a, int l) const { return coeffs.at(j, a, l); }
};

// Secular matrix of the harmonic recursion: dimension N(2 l_max + 1),
// diagonal blocks diag(eps_a - l omega_l), off-diagonal blocks rabi/2.
// Exactly symmetric since the Rabi matrix is.
Eigen::MatrixXd build_quasienergy_matrix(const AtomModel& model, const DriveParams& drive,
                                         int l_max);

// Diagonalizes the secular matrix, groups replicas into N bands, labels them
// by bare-level overlap and returns one sign-fixed representative per band.
// The truncation is raised (8, 16, ..., capped at numerics.l_max) until the
// quasienergies are stable to numerics.eig_tol.
FloquetSolution solve_floquet(const AtomModel& model, const DriveParams& drive,
                              const NumericsConfig& numerics);

// Dynamical Stark shift |omega_tilde_1 - omega_tilde_0| - omega0 of the
// two-level Floquet transition, with the photon multiple chosen to minimize
// the shift magnitude. Throws for n_levels != 2.
double stark_shift(const FloquetSolution& fs, const AtomModel& model);

// Branch-following variant for coupling sweeps: picks the replica whose shift
// is closest to the previous value, so the curve stays on one branch even
// when the shift exceeds half a photon.
double stark_shift(const FloquetSolution& fs, const AtomModel& model, double previous);

}  // namespace floqeels
