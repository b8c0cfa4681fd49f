#include "floqeels/lindblad.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace floqeels {

namespace {

constexpr Complex kI{0.0, 1.0};

double min_enabled_decay(const AtomModel& model) {
  double k_min = 0.0;
  bool any = false;
  for (int a = 0; a < model.n_levels; ++a)
    for (int ap = 0; ap < model.n_levels; ++ap) {
      const double k = model.decay(a, ap);
      if (k > 0.0 && (!any || k < k_min)) {
        k_min = k;
        any = true;
      }
    }
  if (!any)
    throw Error(Error::Kind::input,
                "decay: steady-state solvers need at least one nonzero decay channel");
  return k_min;
}

// Jump gain/loss terms: gain delta_{aa'} sum_{a''} kappa_{a'' -> a} rho_{a''a''},
// loss -(kappa_a. + kappa_a'.) rho_{aa'} / 2 with kappa_a. the total rate out of a.
void add_dissipator(const Eigen::MatrixXcd& rho, const AtomModel& model, Eigen::MatrixXcd& out) {
  const int n = model.n_levels;
  Eigen::VectorXd total_out(n);
  for (int a = 0; a < n; ++a) total_out[a] = model.decay.row(a).sum();
  for (int a = 0; a < n; ++a) {
    for (int ap = 0; ap < n; ++ap) {
      Complex d = -0.5 * (total_out[a] + total_out[ap]) * rho(a, ap);
      if (a == ap)
        for (int app = 0; app < n; ++app) d += model.decay(app, a) * rho(app, app);
      out(a, ap) += d;
    }
  }
}

struct HarmonicIndex {
  int n, l_max;
  int idx(int a, int ap, int l) const { return ((l + l_max) * n + a) * n + ap; }
  int size() const { return n * n * (2 * l_max + 1); }
};

// DFT over one period: rho_l = (1/Ns) sum_k exp(+i l omega_l t_k) rho(t_k).
HarmonicTensor<Complex> extract_harmonics(const std::vector<Eigen::MatrixXcd>& samples,
                                          int n, int l_max) {
  const int ns = static_cast<int>(samples.size());
  HarmonicTensor<Complex> coeffs(n, n, l_max);
  for (int l = -l_max; l <= l_max; ++l) {
    for (int k = 0; k < ns; ++k) {
      const double phase = 2.0 * std::numbers::pi * l * k / ns;
      const Complex w = std::exp(kI * phase) / static_cast<double>(ns);
      for (int a = 0; a < n; ++a)
        for (int ap = 0; ap < n; ++ap) coeffs(a, ap, l) += w * samples[k](a, ap);
    }
  }
  return coeffs;
}

double max_abs_diff(const HarmonicTensor<Complex>& x, const HarmonicTensor<Complex>& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.data().size(); ++i)
    m = std::max(m, std::abs(x.data()[i] - y.data()[i]));
  return m;
}

}  // namespace

Eigen::MatrixXcd lindblad_rhs(const Eigen::MatrixXcd& rho, double t, const AtomModel& model,
                              const DriveParams& drive) {
  const int n = model.n_levels;
  Eigen::MatrixXcd h = model.energies.asDiagonal();
  h += std::cos(drive.omega_l * t) * model.rabi;
  Eigen::MatrixXcd out = -kI * (h * rho - rho * h);
  add_dissipator(rho, model, out);
  return out;
}

SteadyState steady_state_time_domain(const AtomModel& model, const DriveParams& drive,
                                     const NumericsConfig& numerics, int l_max) {
  model.validate();
  drive.validate();
  numerics.validate();
  if (l_max <= 0) l_max = numerics.l_max;
  const int n = model.n_levels;
  const double k_min = min_enabled_decay(model);
  const double period = 2.0 * std::numbers::pi / drive.omega_l;

  // Sample grid: >= 4 l_max + 1 points per period, subdivided so RK4 steps
  // stay below both period/600 and any user-requested dt.
  const int n_samples = 4 * l_max + 4;
  int substeps = (600 + n_samples - 1) / n_samples;
  if (numerics.propagate_dt > 0.0) {
    const int steps_needed =
        static_cast<int>(std::ceil(period / (numerics.propagate_dt * n_samples)));
    substeps = std::max(substeps, steps_needed);
  }
  const double dt = period / (n_samples * substeps);

  const double t_end =
      numerics.propagate_t_end > 0.0 ? numerics.propagate_t_end : 20.0 / k_min;
  const long pre_periods = static_cast<long>(std::ceil(t_end / period));
  const long max_periods = 2 * pre_periods + 16;

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  rho(0, 0) = 1.0;

  Eigen::MatrixXcd k1(n, n), k2(n, n), k3(n, n), k4(n, n);
  auto rk4_step = [&](double t) {
    k1 = lindblad_rhs(rho, t, model, drive);
    k2 = lindblad_rhs(rho + 0.5 * dt * k1, t + 0.5 * dt, model, drive);
    k3 = lindblad_rhs(rho + 0.5 * dt * k2, t + 0.5 * dt, model, drive);
    k4 = lindblad_rhs(rho + dt * k3, t + dt, model, drive);
    rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };

  long period_count = 0;
  auto advance_period = [&](std::vector<Eigen::MatrixXcd>* samples) {
    const double t0 = period_count * period;
    for (int s = 0; s < n_samples; ++s) {
      if (samples) (*samples)[s] = rho;
      for (int u = 0; u < substeps; ++u) rk4_step(t0 + (s * substeps + u) * dt);
    }
    ++period_count;
  };

  for (long p = 0; p < pre_periods - 1; ++p) advance_period(nullptr);

  std::vector<Eigen::MatrixXcd> samples(n_samples, Eigen::MatrixXcd(n, n));
  advance_period(&samples);
  HarmonicTensor<Complex> prev = extract_harmonics(samples, n, l_max);
  double residual = std::numeric_limits<double>::infinity();
  while (period_count < max_periods) {
    advance_period(&samples);
    HarmonicTensor<Complex> cur = extract_harmonics(samples, n, l_max);
    residual = max_abs_diff(cur, prev);
    prev = std::move(cur);
    if (residual < numerics.steady_tol) break;
  }
  if (residual >= numerics.steady_tol) {
    std::ostringstream msg;
    msg << "steady_state_time_domain: residual " << residual << " above steady_tol "
        << numerics.steady_tol << " after " << period_count << " periods";
    throw Error(Error::Kind::numerical, msg.str());
  }

  SteadyState ss;
  ss.n_levels = n;
  ss.l_max = l_max;
  ss.rho_level = std::move(prev);
  ss.method = SteadyMethod::time_propagation;
  ss.residual = residual;
  return ss;
}

SteadyState steady_state_fourier(const AtomModel& model, const DriveParams& drive,
                                 const NumericsConfig& numerics, int l_max) {
  model.validate();
  drive.validate();
  numerics.validate();
  if (l_max <= 0) l_max = numerics.l_max;
  const int n = model.n_levels;
  min_enabled_decay(model);  // precondition: dissipation present
  const HarmonicIndex hi{n, l_max};
  const int d = hi.size();

  // Harmonic components of the master equation, from matching e^{-i l w_L t}
  // terms in i d(rho)/dt = [H, rho] + i D[rho]:
  //   [H0, rho_l] + ([V, rho_{l+1}] + [V, rho_{l-1}]) / 2 + i D[rho_l] - l w_L rho_l = 0.
  Eigen::MatrixXcd superop = Eigen::MatrixXcd::Zero(d, d);
  Eigen::VectorXd total_out(n);
  for (int a = 0; a < n; ++a) total_out[a] = model.decay.row(a).sum();

  for (int l = -l_max; l <= l_max; ++l) {
    for (int a = 0; a < n; ++a) {
      for (int ap = 0; ap < n; ++ap) {
        const int row = hi.idx(a, ap, l);
        superop(row, row) += -l * drive.omega_l + model.energies[a] - model.energies[ap];
        // i D[rho]: loss on (a, a'), gain into diagonal entries.
        superop(row, row) += -kI * 0.5 * (total_out[a] + total_out[ap]);
        if (a == ap)
          for (int app = 0; app < n; ++app)
            superop(row, hi.idx(app, app, l)) += kI * model.decay(app, a);
        for (int dl : {-1, 1}) {
          const int lp = l + dl;
          if (lp < -l_max || lp > l_max) continue;
          for (int app = 0; app < n; ++app) {
            if (model.rabi(a, app) != 0.0)
              superop(row, hi.idx(app, ap, lp)) += 0.5 * model.rabi(a, app);
            if (model.rabi(app, ap) != 0.0)
              superop(row, hi.idx(a, app, lp)) -= 0.5 * model.rabi(app, ap);
          }
        }
      }
    }
  }

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(superop, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double scale = sigma[0];
  const double sigma_min = sigma[d - 1];
  const double sigma_2 = sigma[d - 2];
  if (sigma_2 <= 1e-8 * scale) {
    std::ostringstream msg;
    msg << "steady_state_fourier: nullspace dimension > 1 (sigma_min = " << sigma_min
        << ", next = " << sigma_2 << ", scale = " << scale << "); steady state not unique";
    throw Error(Error::Kind::numerical, msg.str());
  }

  Eigen::VectorXcd null_vec = svd.matrixV().col(d - 1);
  Complex trace0 = 0.0;
  for (int a = 0; a < n; ++a) trace0 += null_vec[hi.idx(a, a, 0)];
  if (std::abs(trace0) < 1e-12)
    throw Error(Error::Kind::numerical,
                "steady_state_fourier: nullspace vector has vanishing time-averaged trace");
  null_vec /= trace0;

  const double op_residual = (superop * null_vec).cwiseAbs().maxCoeff();

  SteadyState ss;
  ss.n_levels = n;
  ss.l_max = l_max;
  ss.rho_level = HarmonicTensor<Complex>(n, n, l_max);
  for (int l = -l_max; l <= l_max; ++l)
    for (int a = 0; a < n; ++a)
      for (int ap = 0; ap < n; ++ap) ss.rho_level(a, ap, l) = null_vec[hi.idx(a, ap, l)];

  // Impose the exact unit trace on the time-averaged populations.
  Complex partial = 0.0;
  for (int a = 0; a < n - 1; ++a) partial += ss.rho_level(a, a, 0);
  ss.rho_level(n - 1, n - 1, 0) = 1.0 - partial;

  ss.method = SteadyMethod::fourier_nullspace;
  ss.residual = op_residual;
  ss.null_gap = sigma_2;
  return ss;
}

void to_floquet_basis(SteadyState& ss, const FloquetSolution& fs) {
  if (ss.n_levels != fs.n_levels || ss.l_max != fs.l_max)
    throw Error(Error::Kind::input,
                "to_floquet_basis: steady state and Floquet solution dimensions differ");
  if (!fs.converged)
    throw Error(Error::Kind::input, "to_floquet_basis: Floquet solution not converged");
  const int n = ss.n_levels;
  const int lm = ss.l_max;
  HarmonicTensor<Complex> out(n, n, lm);
  for (int j = 0; j < n; ++j)
    for (int jp = 0; jp < n; ++jp)
      for (int l0 = -lm; l0 <= lm; ++l0) {
        Complex acc = 0.0;
        for (int a = 0; a < n; ++a)
          for (int ap = 0; ap < n; ++ap)
            for (int l = -lm; l <= lm; ++l) {
              const double fj = fs.coeffs(j, a, l);
              if (fj == 0.0) continue;
              for (int lp = -lm; lp <= lm; ++lp) {
                const double fjp = fs.coeffs(jp, ap, lp);
                if (fjp == 0.0) continue;
                acc += ss.rho_level.at(a, ap, l0 + l - lp) * fj * fjp;
              }
            }
        out(j, jp, l0) = acc;
      }
  ss.rho_floquet = std::move(out);
}

HarmonicTensor<Complex> floquet_to_level(const SteadyState& ss, const FloquetSolution& fs) {
  if (ss.rho_floquet.empty())
    throw Error(Error::Kind::input, "floquet_to_level: rho_floquet not filled");
  const int n = ss.n_levels;
  const int lm = ss.l_max;
  HarmonicTensor<Complex> out(n, n, lm);
  for (int a = 0; a < n; ++a)
    for (int ap = 0; ap < n; ++ap)
      for (int l0 = -lm; l0 <= lm; ++l0) {
        Complex acc = 0.0;
        for (int j = 0; j < n; ++j)
          for (int jp = 0; jp < n; ++jp)
            for (int l = -lm; l <= lm; ++l) {
              const double fj = fs.coeffs(j, a, l);
              if (fj == 0.0) continue;
              for (int lp = -lm; lp <= lm; ++lp) {
                const double fjp = fs.coeffs(jp, ap, lp);
                if (fjp == 0.0) continue;
                acc += ss.rho_floquet.at(j, jp, l0 - l + lp) * fj * fjp;
              }
            }
        out(a, ap, l0) = acc;
      }
  return out;
}

}  // namespace floqeels
