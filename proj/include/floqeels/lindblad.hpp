// Driven-dissipative steady state of the Lindblad master equation, as
// harmonic coefficients rho(a, a', l) in the level basis and rho(j, j', l)
// in the Floquet basis.
#pragma once

#include <Eigen/Dense>

#include "floqeels/common.hpp"
#include "floqeels/floquet.hpp"
#include "floqeels/model.hpp"

namespace floqeels {

enum class SteadyMethod { fourier_nullspace, time_propagation };

struct SteadyState {
  int n_levels = 0;
  int l_max = 0;
  HarmonicTensor<Complex> rho_level;    // rho(a, a', l)
  HarmonicTensor<Complex> rho_floquet;  // rho(j, j', l); empty until to_floquet_basis
  SteadyMethod method = SteadyMethod::fourier_nullspace;
  double residual = 0.0;
  double null_gap = 0.0;  // second-smallest singular value (fourier method only)
};

// d(rho)/dt: coherent commutator with H(t) plus jump gain/loss terms.
Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXcd& rho, double t, const AtomModel& model,
                              const DriveParams& drive);

// RK4 propagation from the ground state over many drive periods, then DFT
// extraction of the harmonics from the final period. residual = max change
// of any coefficient between the last two periods. l_max = 0 reuses
// numerics.l_max; callers normally pass the converged Floquet truncation.
SteadyState steady_state_time_domain(const AtomModel& model, const DriveParams& drive,
                                     const NumericsConfig& numerics, int l_max = 0);

// Stacks the harmonic components into one linear superoperator and extracts
// its one-dimensional nullspace from the smallest singular pair, rescaled to
// unit time-averaged trace. Throws if the nullspace is not one-dimensional.
SteadyState steady_state_fourier(const AtomModel& model, const DriveParams& drive,
                                 const NumericsConfig& numerics, int l_max = 0);

// Fills ss.rho_floquet from ss.rho_level and the Floquet coefficients.
void to_floquet_basis(SteadyState& ss, const FloquetSolution& fs);

// Inverse transform via completeness; used to cross-check to_floquet_basis.
HarmonicTensor<Complex> floquet_to_level(const SteadyState& ss, const FloquetSolution& fs);

}  // namespace floqeels
