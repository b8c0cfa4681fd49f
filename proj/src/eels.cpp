#include "floqeels/eels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace floqeels {

void CouplingGeometry::validate() const {
  if (!(speed > 0.0 && speed < 1.0))
    throw Error(Error::Kind::input, "geometry.speed: must lie in (0, 1) in units of c");
  if (!(impact_parameter >= 0.0))
    throw Error(Error::Kind::input, "geometry.impact_parameter: must be nonnegative");
}

HarmonicTensor<double> compute_I(const FloquetSolution& fs, const AtomModel& model) {
  if (!fs.converged)
    throw Error(Error::Kind::input, "compute_I: Floquet solution not converged");
  const int n = fs.n_levels;
  const int lm = fs.l_max;
  HarmonicTensor<double> I(n, n, 2 * lm);
  for (int j = 0; j < n; ++j)
    for (int jp = 0; jp < n; ++jp)
      for (int l = -2 * lm; l <= 2 * lm; ++l) {
        double acc = 0.0;
        for (int a = 0; a < n; ++a)
          for (int ap = 0; ap < n; ++ap) {
            const double dr = model.dipole_ratio(a, ap);
            if (dr == 0.0) continue;
            for (int lp = -lm; lp <= lm; ++lp)
              acc += fs.coeffs(j, a, lp) * fs.coeffs.at(jp, ap, lp - l) * dr;
          }
        I(j, jp, l) = acc;
      }
  return I;
}

HarmonicTensor<double> peak_table(const HarmonicTensor<double>& I, const SteadyState& ss,
                                  const FloquetSolution& fs, int window) {
  if (ss.rho_floquet.empty())
    throw Error(Error::Kind::input, "peak_table: steady state lacks rho_floquet "
                                    "(run to_floquet_basis first)");
  const int n = fs.n_levels;
  const int li = I.l_max();
  HarmonicTensor<double> table(n, n, window);
  for (int j = 0; j < n; ++j)
    for (int jp = 0; jp < n; ++jp)
      for (int l = -window; l <= window; ++l) {
        if (j == jp && l == 0) continue;
        const double ijl = I.at(j, jp, l);
        if (ijl == 0.0) continue;
        double inner = 0.0;
        for (int jpp = 0; jpp < n; ++jpp)
          for (int lp = -li; lp <= li; ++lp) {
            const double w = I.at(j, jpp, lp);
            if (w == 0.0) continue;
            inner += w * ss.rho_floquet.at(jpp, jp, lp - l).real();
          }
        table(j, jp, l) = ijl * inner;
      }
  return table;
}

namespace {

PeakSet collect_peaks(const HarmonicTensor<double>& table, const FloquetSolution& fs,
                      double omega_l, double peak_tol) {
  const int n = table.dim1();
  const int window = table.l_max();
  PeakSet out;
  out.l_window = window;
  for (int j = 0; j < n; ++j)
    for (int jp = 0; jp < n; ++jp)
      for (int l = -window; l <= window; ++l) {
        if (j == jp && l == 0) continue;
        const double p = table.at(j, jp, l);
        if (std::abs(p) < peak_tol) continue;
        Peak peak;
        peak.j = j;
        peak.jp = jp;
        peak.l = l;
        peak.omega = fs.omega_tilde[j] - fs.omega_tilde[jp] + l * omega_l;
        peak.prob = p;
        out.entries.push_back(peak);
        out.sum_prob += p;
        if (p < -peak_tol) {
          ++out.negative_count;
          out.most_negative = std::min(out.most_negative, p);
        }
      }
  std::stable_sort(out.entries.begin(), out.entries.end(), [](const Peak& x, const Peak& y) {
    if (std::abs(x.prob) != std::abs(y.prob)) return std::abs(x.prob) > std::abs(y.prob);
    if (x.j != y.j) return x.j < y.j;
    if (x.jp != y.jp) return x.jp < y.jp;
    return x.l < y.l;
  });
  return out;
}

}  // namespace

PeakSet compute_peaks(const HarmonicTensor<double>& I, const SteadyState& ss,
                      const FloquetSolution& fs, const DriveParams& drive, double peak_tol) {
  const int window = std::max(1, fs.l_max - 2);
  const HarmonicTensor<double> table = peak_table(I, ss, fs, window);
  return collect_peaks(table, fs, drive.omega_l, peak_tol);
}

HarmonicTensor<double> appendix_peak_table(const FloquetSolution& fs, const SteadyState& ss,
                                           const AtomModel& model, int window) {
  if (ss.rho_floquet.empty())
    throw Error(Error::Kind::input, "appendix_peak_table: steady state lacks rho_floquet");
  const int n = fs.n_levels;
  const int lm = fs.l_max;
  const int ln = 2 * lm;

  // Coupling coefficients in the small-separation limit, where the coupling
  // vector is constant and real and the P0 prefactor cancels:
  //   n(j, j', l) = sum_{a a' l'} f(j, a, l') f(j', a', l + l') d(a, a') / d10.
  HarmonicTensor<double> ncoef(n, n, ln);
  for (int jp = 0; jp < n; ++jp)
    for (int j = 0; j < n; ++j)
      for (int l = -ln; l <= ln; ++l) {
        double acc = 0.0;
        for (int lp = -lm; lp <= lm; ++lp)
          for (int a = 0; a < n; ++a) {
            const double fj = fs.coeffs(j, a, lp);
            if (fj == 0.0) continue;
            for (int ap = 0; ap < n; ++ap)
              acc += fj * fs.coeffs.at(jp, ap, l + lp) * model.dipole_ratio(a, ap);
          }
        ncoef(j, jp, l) = acc;
      }

  // m(j, j', l) = sum_{j'' l'} rho(j'', j', l - l') n(j, j'', l').
  HarmonicTensor<Complex> mcoef(n, n, ln);
  for (int j = 0; j < n; ++j)
    for (int jp = 0; jp < n; ++jp)
      for (int l = -ln; l <= ln; ++l) {
        Complex acc = 0.0;
        for (int jpp = 0; jpp < n; ++jpp)
          for (int lp = -ln; lp <= ln; ++lp) {
            const double nv = ncoef.at(j, jpp, lp);
            if (nv == 0.0) continue;
            acc += ss.rho_floquet.at(jpp, jp, l - lp) * nv;
          }
        mcoef(j, jp, l) = acc;
      }

  HarmonicTensor<double> table(n, n, window);
  for (int j = 0; j < n; ++j)
    for (int jp = 0; jp < n; ++jp)
      for (int l = -window; l <= window; ++l) {
        if (j == jp && l == 0) continue;
        table(j, jp, l) = (std::conj(mcoef.at(j, jp, -l)) * ncoef.at(j, jp, -l)).real();
      }
  return table;
}

PeakSet appendix_peaks_oracle(const FloquetSolution& fs, const SteadyState& ss,
                              const AtomModel& model, const DriveParams& drive,
                              double peak_tol) {
  const int window = std::max(1, fs.l_max - 2);
  const HarmonicTensor<double> table = appendix_peak_table(fs, ss, model, window);
  return collect_peaks(table, fs, drive.omega_l, peak_tol);
}

double coupling_factor(double omega, const CouplingGeometry& geom) {
  geom.validate();
  const double x =
      std::abs(omega) * geom.impact_parameter / (geom.speed * geom.lorentz_factor());
  if (x == 0.0) return 1.0;
  if (x > 700.0) return 0.0;  // x K1(x) below double underflow
  return x * std::cyl_bessel_k(1.0, x);
}

void apply_coupling_geometry(PeakSet& peaks, const CouplingGeometry& geom) {
  peaks.sum_prob = 0.0;
  for (Peak& p : peaks.entries) {
    const double s = coupling_factor(p.omega, geom);
    p.prob *= s * s;
    peaks.sum_prob += p.prob;
  }
}

std::vector<double> linear_axis(double min, double max, int points) {
  if (points < 2 || !(max > min))
    throw Error(Error::Kind::input, "axis: need max > min and at least 2 points");
  std::vector<double> axis(points);
  for (int i = 0; i < points; ++i)
    axis[i] = min + (max - min) * i / static_cast<double>(points - 1);
  return axis;
}

SpectrumGrid broaden_spectrum(const PeakSet& peaks, double fwhm,
                              const std::vector<double>& omega_axis) {
  if (!(fwhm > 0.0)) throw Error(Error::Kind::input, "broadening_fwhm: must be positive");
  if (!std::is_sorted(omega_axis.begin(), omega_axis.end()))
    throw Error(Error::Kind::input, "omega_axis: must be sorted ascending");
  const double sigma = fwhm / (2.0 * std::sqrt(2.0 * std::numbers::ln2));
  const double norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
  SpectrumGrid grid;
  grid.omega = omega_axis;
  grid.gamma.assign(omega_axis.size(), 0.0);
  grid.fwhm = fwhm;
  for (const Peak& p : peaks.entries) {
    for (std::size_t i = 0; i < omega_axis.size(); ++i) {
      const double u = (omega_axis[i] - p.omega) / sigma;
      if (std::abs(u) > 40.0) continue;
      grid.gamma[i] += p.prob * norm * std::exp(-0.5 * u * u);
    }
  }
  return grid;
}

PipelineResult run_pipeline(const AtomModel& model, const DriveParams& drive,
                            const NumericsConfig& numerics) {
  PipelineResult r;
  r.floquet = solve_floquet(model, drive, numerics);
  r.steady = steady_state_fourier(model, drive, numerics, r.floquet.l_max);
  to_floquet_basis(r.steady, r.floquet);
  r.I = compute_I(r.floquet, model);
  r.peaks = compute_peaks(r.I, r.steady, r.floquet, drive, numerics.peak_tol);
  return r;
}

int MapResult::failed_rows() const {
  int n = 0;
  for (const auto& e : row_errors)
    if (!e.empty()) ++n;
  return n;
}

namespace {

void run_map_row(const AtomModel& base_model, const DriveParams& base_drive,
                 const NumericsConfig& numerics, const SweepSpec& sweep, MapResult& map,
                 int row) {
  AtomModel model = base_model;
  DriveParams drive = base_drive;
  const double value = map.sweep_values[row];
  if (sweep.axis == SweepAxis::omega_l)
    drive.omega_l = value;
  else
    model = with_rabi_scale(base_model, value);
  try {
    const PipelineResult r = run_pipeline(model, drive, numerics);
    const SpectrumGrid spectrum =
        broaden_spectrum(r.peaks, numerics.broadening_fwhm, map.omega_axis);
    for (std::size_t c = 0; c < spectrum.gamma.size(); ++c)
      map.gamma(row, static_cast<int>(c)) = spectrum.gamma[c];
    map.row_peaks[row] = r.peaks;
  } catch (const std::exception& e) {
    map.row_errors[row] = e.what();
    map.gamma.row(row).setZero();
  }
}

}  // namespace

MapResult sweep_map(const AtomModel& model, const DriveParams& drive,
                    const NumericsConfig& numerics, const SweepSpec& sweep,
                    const AxisSpec& omega_axis, Exec exec) {
  model.validate();
  drive.validate();
  numerics.validate();
  if (sweep.points < 2)
    throw Error(Error::Kind::input, "sweep: range too short (need at least 2 points)");
  if (sweep.axis == SweepAxis::rabi && rabi_scale(model) == 0.0)
    throw Error(Error::Kind::input, "sweep: cannot sweep rabi with a zero coupling pattern");

  MapResult map;
  map.sweep = sweep;
  map.sweep_values = linear_axis(sweep.min, sweep.max, sweep.points);
  map.omega_axis = linear_axis(omega_axis.min, omega_axis.max, omega_axis.points);
  map.gamma = Eigen::MatrixXd::Zero(sweep.points, omega_axis.points);
  map.row_peaks.resize(sweep.points);
  map.row_errors.assign(sweep.points, "");

  if (exec == Exec::serial) {
    for (int row = 0; row < sweep.points; ++row)
      run_map_row(model, drive, numerics, sweep, map, row);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (int row = 0; row < sweep.points; ++row)
      run_map_row(model, drive, numerics, sweep, map, row);
  }
  return map;
}

}  // namespace floqeels
