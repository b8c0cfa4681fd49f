// Independent brute-force verifiers: one-period Schroedinger propagation for
// the Floquet bands, algebraic identity checks, and cross-method steady-state
// comparison. The integrators here share no code with the production solvers.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "floqeels/eels.hpp"
#include "floqeels/floquet.hpp"
#include "floqeels/lindblad.hpp"
#include "floqeels/model.hpp"

namespace floqeels {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  std::string table() const;
  nlohmann::json to_json() const;
};

// RK4 integration of i d(psi)/dt = H(t) psi from t0 over n_steps of size dt.
Eigen::VectorXcd schrodinger_rk4(const AtomModel& model, const DriveParams& drive,
                                 const Eigen::VectorXcd& psi0, double t0, double dt,
                                 int n_steps);

// Propagates each F_j(0) over one period and compares with the Floquet phase:
// residual = max_j || psi_j(T) - exp(-i omega_tilde_j T) F_j(0) ||.
// dt = 0 selects T/2000.
CheckResult monodromy_check(const AtomModel& model, const DriveParams& drive,
                            const FloquetSolution& fs, double dt = 0.0);

// Runs both steady-state solvers; residual = max elementwise |delta rho(a,a',l)|.
CheckResult cross_validate_steady(const AtomModel& model, const DriveParams& drive,
                                  const NumericsConfig& numerics, int l_max = 0);

// Full battery: model invariants, monodromy, orthogonality/completeness, sum
// rule, Hermiticity, trace, cross-method, appendix/main-text peak equivalence,
// parity selection rule, PINEM absence (when light and electron couple
// disjoint transitions), and gauge invariance.
ValidationReport run_full_validation(const Configuration& cfg);

}  // namespace floqeels
