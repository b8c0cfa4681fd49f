// Physical system definition: level energies, Rabi couplings, transition
// dipole ratios and decay rates, plus drive and numerics settings.
// All frequencies are in units of omega0 = energies[1] - energies[0], hbar = 1.
#pragma once

#include <string>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "floqeels/common.hpp"

namespace floqeels {

struct AtomModel {
  int n_levels = 0;
  Eigen::VectorXd energies;       // ascending, energies[1] - energies[0] > 0
  Eigen::MatrixXd rabi;           // symmetric, zero diagonal
  Eigen::MatrixXd dipole_ratio;   // symmetric, zero diagonal, relative to the g<->e dipole
  Eigen::MatrixXd decay;          // decay(a, a') = jump rate a -> a', nonnegative, zero diagonal

  double omega0() const { return energies[1] - energies[0]; }
  // Throws Error(Kind::input) naming the offending field.
  void validate() const;
};

struct DriveParams {
  double omega_l = 1.2;  // light frequency, units of omega0
  void validate() const;
};

struct NumericsConfig {
  int l_max = 20;                  // harmonic truncation cap for the Floquet ladder
  double eig_tol = 1e-10;
  double steady_tol = 1e-8;
  double peak_tol = 1e-8;
  double propagate_t_end = 0.0;    // 0 = auto: 20 / min(enabled decay rate)
  double propagate_dt = 0.0;       // 0 = auto: period / 600
  double broadening_fwhm = 0.01;   // Gaussian FWHM for spectra, units of omega0
  void validate() const;
};

struct Configuration {
  AtomModel model;
  DriveParams drive;
  NumericsConfig numerics;
};

enum class Scenario { two_level, lambda_a, lambda_b, lambda_c };

Scenario scenario_from_string(const std::string& name);
std::string to_string(Scenario s);

// Built-in systems: the driven two-level atom and the three Lambda-atom
// coupling configurations (levels g, m, e at 0, 0.7, 1, with light/electron
// channels selectively enabled).
Configuration builtin_scenario(Scenario s);

Configuration load_config(const std::string& path);
Configuration config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const Configuration& cfg);
void save_config(const Configuration& cfg, const std::string& path);

// Largest Rabi matrix entry; the sweep parameter Omega0 refers to this scale.
double rabi_scale(const AtomModel& model);
// Rescales the Rabi matrix so rabi_scale() == scale, preserving entry ratios.
AtomModel with_rabi_scale(const AtomModel& model, double scale);

}  // namespace floqeels
