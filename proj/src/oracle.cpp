#include "floqeels/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

namespace floqeels {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kAlgebraTol = 1e-10;
constexpr double kMonodromyTol = 1e-8;
constexpr double kCrossMethodTol = 1e-6;
constexpr double kGaugeTol = 1e-14;

CheckResult make_check(const std::string& name, double residual, double tol,
                       const std::string& detail = "") {
  CheckResult c;
  c.name = name;
  c.residual = residual;
  c.tolerance = tol;
  c.pass = residual < tol;
  c.detail = detail;
  return c;
}

Eigen::VectorXcd floquet_state_at_zero(const FloquetSolution& fs, int j) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(fs.n_levels);
  for (int a = 0; a < fs.n_levels; ++a) {
    double acc = 0.0;
    for (int l = -fs.l_max; l <= fs.l_max; ++l) acc += fs.coeffs(j, a, l);
    psi[a] = acc;
  }
  return psi;
}

double orthogonality_residual(const FloquetSolution& fs) {
  double worst = 0.0;
  for (int j = 0; j < fs.n_levels; ++j)
    for (int jp = 0; jp < fs.n_levels; ++jp)
      for (int m = -fs.l_max; m <= fs.l_max; ++m) {
        double s = 0.0;
        for (int a = 0; a < fs.n_levels; ++a)
          for (int l = -fs.l_max; l <= fs.l_max; ++l)
            s += fs.coeffs(j, a, l) * fs.coeffs.at(jp, a, l + m);
        const double expected = (j == jp && m == 0) ? 1.0 : 0.0;
        worst = std::max(worst, std::abs(s - expected));
      }
  return worst;
}

double completeness_residual(const FloquetSolution& fs) {
  // sum_{j m} f(j, a, l + m) f(j, a', l' + m) = delta_{aa'} delta_{ll'},
  // evaluated on interior harmonics where the truncated sum has support.
  const int interior = fs.l_max / 2;
  double worst = 0.0;
  for (int a = 0; a < fs.n_levels; ++a)
    for (int ap = 0; ap < fs.n_levels; ++ap)
      for (int l = -interior; l <= interior; ++l)
        for (int lp = -interior; lp <= interior; ++lp) {
          double s = 0.0;
          for (int j = 0; j < fs.n_levels; ++j)
            for (int m = -fs.l_max; m <= fs.l_max; ++m)
              s += fs.coeffs.at(j, a, l + m) * fs.coeffs.at(j, ap, lp + m);
          const double expected = (a == ap && l == lp) ? 1.0 : 0.0;
          worst = std::max(worst, std::abs(s - expected));
        }
  return worst;
}

double sum_rule_residual(const FloquetSolution& fs, const AtomModel& model) {
  const double diff = fs.omega_tilde.sum() - model.energies.sum();
  const double folded = diff - fs.omega_l * std::round(diff / fs.omega_l);
  return std::abs(folded);
}

// Residual of the defining recursion for the replica (omega + m w_L, f(., l + m))
// on interior harmonics.
double replica_residual(const FloquetSolution& fs, const AtomModel& model, int m) {
  double worst = 0.0;
  const int lm = fs.l_max;
  for (int j = 0; j < fs.n_levels; ++j) {
    const double w = fs.omega_tilde[j] + m * fs.omega_l;
    for (int a = 0; a < fs.n_levels; ++a)
      for (int l = -lm / 2; l <= lm / 2; ++l) {
        double rhs = (model.energies[a] - l * fs.omega_l) * fs.coeffs.at(j, a, l + m);
        for (int ap = 0; ap < fs.n_levels; ++ap)
          rhs += 0.5 * model.rabi(a, ap) *
                 (fs.coeffs.at(j, ap, l + 1 + m) + fs.coeffs.at(j, ap, l - 1 + m));
        worst = std::max(worst, std::abs(w * fs.coeffs.at(j, a, l + m) - rhs));
      }
  }
  return worst;
}

double hermiticity_residual(const HarmonicTensor<Complex>& rho) {
  double worst = 0.0;
  for (int a = 0; a < rho.dim1(); ++a)
    for (int ap = 0; ap < rho.dim2(); ++ap)
      for (int l = -rho.l_max(); l <= rho.l_max(); ++l)
        worst = std::max(worst,
                         std::abs(std::conj(rho.at(a, ap, l)) - rho.at(ap, a, -l)));
  return worst;
}

// Light and electron coupling graphs sharing no edge is the regime where
// photon-order sidebands (j = j', l != 0) must vanish identically.
bool disjoint_coupling_edges(const AtomModel& model) {
  bool any_rabi = false;
  for (int a = 0; a < model.n_levels; ++a)
    for (int ap = a + 1; ap < model.n_levels; ++ap) {
      if (model.rabi(a, ap) != 0.0) any_rabi = true;
      if (model.rabi(a, ap) != 0.0 && model.dipole_ratio(a, ap) != 0.0) return false;
    }
  return any_rabi;
}

}  // namespace

bool ValidationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

std::string ValidationReport::table() const {
  std::ostringstream out;
  out << std::left << std::setw(34) << "check" << std::setw(14) << "residual" << std::setw(14)
      << "tolerance" << "status\n";
  for (const CheckResult& c : checks) {
    std::ostringstream res, tol;
    res << std::scientific << std::setprecision(3) << c.residual;
    tol << std::scientific << std::setprecision(3) << c.tolerance;
    out << std::left << std::setw(34) << c.name << std::setw(14) << res.str() << std::setw(14)
        << tol.str() << (c.pass ? "pass" : "FAIL");
    if (!c.detail.empty()) out << "  (" << c.detail << ")";
    out << "\n";
  }
  out << "overall: " << (passed() ? "pass" : "FAIL") << "\n";
  return out.str();
}

nlohmann::json ValidationReport::to_json() const {
  nlohmann::json checks_json = nlohmann::json::array();
  for (const CheckResult& c : checks)
    checks_json.push_back({{"name", c.name},
                           {"residual", c.residual},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass},
                           {"detail", c.detail}});
  return {{"checks", checks_json}, {"pass", passed()}};
}

Eigen::VectorXcd schrodinger_rk4(const AtomModel& model, const DriveParams& drive,
                                 const Eigen::VectorXcd& psi0, double t0, double dt,
                                 int n_steps) {
  const Eigen::MatrixXd h0 = model.energies.asDiagonal();
  Eigen::VectorXcd psi = psi0;
  auto deriv = [&](const Eigen::VectorXcd& p, double t) -> Eigen::VectorXcd {
    return -kI * ((h0 + std::cos(drive.omega_l * t) * model.rabi) * p);
  };
  for (int s = 0; s < n_steps; ++s) {
    const double t = t0 + s * dt;
    const Eigen::VectorXcd k1 = deriv(psi, t);
    const Eigen::VectorXcd k2 = deriv(psi + 0.5 * dt * k1, t + 0.5 * dt);
    const Eigen::VectorXcd k3 = deriv(psi + 0.5 * dt * k2, t + 0.5 * dt);
    const Eigen::VectorXcd k4 = deriv(psi + dt * k3, t + dt);
    psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return psi;
}

CheckResult monodromy_check(const AtomModel& model, const DriveParams& drive,
                            const FloquetSolution& fs, double dt) {
  const double period = 2.0 * std::numbers::pi / drive.omega_l;
  int n_steps = 2000;
  if (dt > 0.0) {
    if (dt > period / 1000.0)
      throw Error(Error::Kind::input, "monodromy_check: dt must be <= T/1000");
    n_steps = static_cast<int>(std::ceil(period / dt));
  }
  double worst = 0.0;
  for (int attempt = 0; attempt < 3; ++attempt) {
    worst = 0.0;
    bool unstable = false;
    for (int j = 0; j < fs.n_levels; ++j) {
      const Eigen::VectorXcd psi0 = floquet_state_at_zero(fs, j);
      const Eigen::VectorXcd psi =
          schrodinger_rk4(model, drive, psi0, 0.0, period / n_steps, n_steps);
      const Complex phase = std::exp(-kI * fs.omega_tilde[j] * period);
      const double r = (psi - phase * psi0).norm();
      if (!std::isfinite(r) || (psi.norm() - 1.0) > 0.1) {
        unstable = true;
        break;
      }
      worst = std::max(worst, r);
    }
    if (!unstable) break;
    n_steps *= 2;  // step-halving retry
    if (attempt == 2)
      throw Error(Error::Kind::numerical, "monodromy_check: integrator unstable");
  }
  std::ostringstream detail;
  detail << "steps=" << n_steps;
  return make_check("monodromy", worst, kMonodromyTol, detail.str());
}

CheckResult cross_validate_steady(const AtomModel& model, const DriveParams& drive,
                                  const NumericsConfig& numerics, int l_max) {
  const SteadyState a = steady_state_fourier(model, drive, numerics, l_max);
  const SteadyState b = steady_state_time_domain(model, drive, numerics, a.l_max);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rho_level.data().size(); ++i)
    worst = std::max(worst, std::abs(a.rho_level.data()[i] - b.rho_level.data()[i]));
  return make_check("cross_method_steady", worst, kCrossMethodTol);
}

ValidationReport run_full_validation(const Configuration& cfg) {
  ValidationReport report;

  try {
    cfg.model.validate();
    cfg.drive.validate();
    cfg.numerics.validate();
    report.checks.push_back(make_check("model_invariants", 0.0, 1.0));
  } catch (const Error& e) {
    report.checks.push_back(make_check("model_invariants", 1.0, 1.0, e.what()));
    return report;  // nothing downstream is meaningful
  }

  const AtomModel& model = cfg.model;
  const DriveParams& drive = cfg.drive;
  const NumericsConfig& numerics = cfg.numerics;

  FloquetSolution fs;
  try {
    fs = solve_floquet(model, drive, numerics);
  } catch (const Error& e) {
    report.checks.push_back(make_check("floquet_convergence", 1.0, 1.0, e.what()));
    return report;
  }
  report.checks.push_back(
      make_check("floquet_convergence", fs.residual, numerics.eig_tol, ""));

  report.checks.push_back(monodromy_check(model, drive, fs));
  report.checks.push_back(
      make_check("orthogonality", orthogonality_residual(fs), kAlgebraTol));
  report.checks.push_back(
      make_check("completeness_interior", completeness_residual(fs), kAlgebraTol));
  report.checks.push_back(
      make_check("quasienergy_sum_rule", sum_rule_residual(fs, model), kAlgebraTol));
  report.checks.push_back(make_check(
      "replica_recursion", std::max(replica_residual(fs, model, 1), replica_residual(fs, model, -1)),
      kAlgebraTol));

  SteadyState ss;
  try {
    ss = steady_state_fourier(model, drive, numerics, fs.l_max);
  } catch (const Error& e) {
    report.checks.push_back(make_check("steady_state_fourier", 1.0, 1.0, e.what()));
    return report;
  }
  report.checks.push_back(make_check("steady_state_fourier", ss.residual,
                                     numerics.steady_tol, "superoperator residual"));
  report.checks.push_back(
      make_check("hermiticity_level_basis", hermiticity_residual(ss.rho_level), kAlgebraTol));

  double trace_res = 0.0;
  {
    Complex tr0 = 0.0;
    for (int a = 0; a < model.n_levels; ++a) tr0 += ss.rho_level(a, a, 0);
    trace_res = std::abs(tr0 - 1.0);
    for (int l = -ss.l_max; l <= ss.l_max; ++l) {
      if (l == 0) continue;
      Complex trl = 0.0;
      for (int a = 0; a < model.n_levels; ++a) trl += ss.rho_level(a, a, l);
      trace_res = std::max(trace_res, std::abs(trl));
    }
  }
  report.checks.push_back(make_check("trace", trace_res, kAlgebraTol));

  double pop_res = 0.0;
  for (int a = 0; a < model.n_levels; ++a) {
    const Complex p = ss.rho_level(a, a, 0);
    pop_res = std::max(pop_res, std::abs(p.imag()));
    pop_res = std::max(pop_res, std::max(0.0, -p.real()));
    pop_res = std::max(pop_res, std::max(0.0, p.real() - 1.0));
  }
  report.checks.push_back(make_check("population_range", pop_res, numerics.steady_tol));

  report.checks.push_back(cross_validate_steady(model, drive, numerics, fs.l_max));

  to_floquet_basis(ss, fs);
  report.checks.push_back(make_check("hermiticity_floquet_basis",
                                     hermiticity_residual(ss.rho_floquet), kAlgebraTol));
  {
    Complex trf = 0.0;
    for (int j = 0; j < model.n_levels; ++j) trf += ss.rho_floquet(j, j, 0);
    report.checks.push_back(make_check("trace_floquet_basis", std::abs(trf - 1.0), kAlgebraTol));
  }
  {
    const HarmonicTensor<Complex> back = floquet_to_level(ss, fs);
    double worst = 0.0;
    const int interior = fs.l_max / 2;
    for (int a = 0; a < model.n_levels; ++a)
      for (int ap = 0; ap < model.n_levels; ++ap)
        for (int l = -interior; l <= interior; ++l)
          worst = std::max(worst, std::abs(back.at(a, ap, l) - ss.rho_level.at(a, ap, l)));
    report.checks.push_back(make_check("basis_round_trip_interior", worst, kAlgebraTol));
  }

  const HarmonicTensor<double> I = compute_I(fs, model);
  const PeakSet peaks = compute_peaks(I, ss, fs, drive, numerics.peak_tol);
  {
    const int window = std::max(1, fs.l_max - 2);
    const HarmonicTensor<double> t_main = peak_table(I, ss, fs, window);
    const HarmonicTensor<double> t_app = appendix_peak_table(fs, ss, model, window);
    double worst = 0.0;
    for (std::size_t i = 0; i < t_main.data().size(); ++i)
      worst = std::max(worst, std::abs(t_main.data()[i] - t_app.data()[i]));
    report.checks.push_back(make_check("appendix_equivalence", worst, kAlgebraTol));
  }

  // Parity selection rule for the two-level atom: j != j' peaks only at even
  // l, j == j' sidebands only at odd l.
  if (model.n_levels == 2) {
    double worst = 0.0;
    for (const Peak& p : peaks.entries) {
      const bool forbidden =
          (p.j != p.jp && std::abs(p.l) % 2 == 1) || (p.j == p.jp && std::abs(p.l) % 2 == 0);
      if (forbidden) worst = std::max(worst, std::abs(p.prob));
    }
    report.checks.push_back(make_check("parity_selection_rule", worst, kAlgebraTol));
  }

  if (disjoint_coupling_edges(model)) {
    double worst = 0.0;
    for (const Peak& p : peaks.entries)
      if (p.j == p.jp) worst = std::max(worst, std::abs(p.prob));
    report.checks.push_back(make_check("pinem_absence", worst, kAlgebraTol));
  }

  // Gauge invariance: flipping the sign of any one Floquet eigenvector must
  // leave every peak probability unchanged.
  {
    const int window = std::max(1, fs.l_max - 2);
    const HarmonicTensor<double> base_table = peak_table(I, ss, fs, window);
    double worst = 0.0;
    for (int j = 0; j < model.n_levels; ++j) {
      FloquetSolution flipped = fs;
      for (int a = 0; a < model.n_levels; ++a)
        for (int l = -fs.l_max; l <= fs.l_max; ++l) flipped.coeffs(j, a, l) *= -1.0;
      SteadyState ss_flipped = ss;
      to_floquet_basis(ss_flipped, flipped);
      const HarmonicTensor<double> I_flipped = compute_I(flipped, model);
      const HarmonicTensor<double> table = peak_table(I_flipped, ss_flipped, flipped, window);
      for (std::size_t i = 0; i < table.data().size(); ++i)
        worst = std::max(worst, std::abs(table.data()[i] - base_table.data()[i]));
    }
    report.checks.push_back(make_check("gauge_invariance", worst, kGaugeTol));
  }

  return report;
}

}  // namespace floqeels
