// EELS peak energies/probabilities, broadened spectra, and 2D sweep maps.
#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "floqeels/common.hpp"
#include "floqeels/floquet.hpp"
#include "floqeels/lindblad.hpp"
#include "floqeels/model.hpp"

namespace floqeels {

struct Peak {
  int j = 0;
  int jp = 0;
  int l = 0;
  double omega = 0.0;  // omega_tilde_j - omega_tilde_j' + l omega_l
  double prob = 0.0;   // P / P0
};

struct PeakSet {
  std::vector<Peak> entries;  // sorted by |prob| descending
  int l_window = 0;           // |l| <= l_window retained
  double sum_prob = 0.0;      // signed sum over retained entries (primed sum)
  // Entries below -peak_tol are reported raw and counted here, not clamped.
  int negative_count = 0;
  double most_negative = 0.0;
};

struct SpectrumGrid {
  std::vector<double> omega;
  std::vector<double> gamma;  // probability density, unit-area peaks
  double fwhm = 0.0;
};

struct CouplingGeometry {
  double impact_parameter = 0.0;  // units of c / omega0
  double speed = 0.7;             // units of c
  double lorentz_factor() const { return 1.0 / std::sqrt(1.0 - speed * speed); }
  void validate() const;
};

// Transition matrix elements I(j, j', l) between Floquet bands, weighted by
// dipole ratios; support |l| <= 2 fs.l_max.
HarmonicTensor<double> compute_I(const FloquetSolution& fs, const AtomModel& model);

// Dense table P(j, j', l) over |l| <= window before pruning; the table keeps
// the zero-loss entry (j == j', l == 0) at zero.
HarmonicTensor<double> peak_table(const HarmonicTensor<double>& I, const SteadyState& ss,
                                  const FloquetSolution& fs, int window);

// Peak list from the Floquet transition amplitudes and the steady state.
// Window |l| <= fs.l_max - 2, entries with |prob| < peak_tol pruned.
PeakSet compute_peaks(const HarmonicTensor<double>& I, const SteadyState& ss,
                      const FloquetSolution& fs, const DriveParams& drive, double peak_tol);

// Independent evaluation through the N/M coupling coefficients in the
// small-separation limit; must agree with compute_peaks elementwise.
PeakSet appendix_peaks_oracle(const FloquetSolution& fs, const SteadyState& ss,
                              const AtomModel& model, const DriveParams& drive,
                              double peak_tol);

// Dense unpruned table of the appendix route, for elementwise comparison
// against peak_table.
HarmonicTensor<double> appendix_peak_table(const FloquetSolution& fs, const SteadyState& ss,
                                           const AtomModel& model, int window);

// Finite beam-sample separation suppression s(x) = x K1(x) with
// x = |omega| R_e / (v gamma); s -> 1 as x -> 0.
double coupling_factor(double omega, const CouplingGeometry& geom);

// Multiplies each peak probability by coupling_factor(omega)^2.
void apply_coupling_geometry(PeakSet& peaks, const CouplingGeometry& geom);

std::vector<double> linear_axis(double min, double max, int points);

// Sum of unit-area Gaussians of the given FWHM, one per peak, on the axis.
SpectrumGrid broaden_spectrum(const PeakSet& peaks, double fwhm,
                              const std::vector<double>& omega_axis);

enum class Exec { serial, parallel };
enum class SweepAxis { omega_l, rabi };

struct SweepSpec {
  SweepAxis axis = SweepAxis::omega_l;
  double min = 0.0;
  double max = 0.0;
  int points = 0;
};

struct AxisSpec {
  double min = -2.0;
  double max = 2.0;
  int points = 801;
};

struct PipelineResult {
  FloquetSolution floquet;
  SteadyState steady;
  HarmonicTensor<double> I;
  PeakSet peaks;
};

// floquet -> steady (fourier) -> floquet basis -> peaks.
PipelineResult run_pipeline(const AtomModel& model, const DriveParams& drive,
                            const NumericsConfig& numerics);

struct MapResult {
  SweepSpec sweep;
  std::vector<double> sweep_values;
  std::vector<double> omega_axis;
  Eigen::MatrixXd gamma;                // rows = sweep values, cols = omega axis
  std::vector<PeakSet> row_peaks;       // labeled peak trajectories per row
  std::vector<std::string> row_errors;  // empty = row ok
  int failed_rows() const;
};

// Runs the full pipeline per sweep row and stacks broadened spectra. Rows are
// independent; the parallel path distributes them over OpenMP threads and the
// output is identical to the serial path regardless of thread count. Row
// failures are recorded in row_errors and do not abort the map.
MapResult sweep_map(const AtomModel& model, const DriveParams& drive,
                    const NumericsConfig& numerics, const SweepSpec& sweep,
                    const AxisSpec& omega_axis, Exec exec = Exec::parallel);

}  // namespace floqeels
