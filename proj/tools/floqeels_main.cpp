// floqeels command-line front end: spectrum, map, floquet, steady, validate.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "floqeels/eels.hpp"
#include "floqeels/io.hpp"
#include "floqeels/model.hpp"
#include "floqeels/oracle.hpp"
#include "floqeels/version.hpp"

namespace fs = std::filesystem;
using namespace floqeels;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitValidation = 3;

struct CommonOptions {
  std::string config_path;
  std::string scenario = "two_level";
  std::string out_dir = "out";
  std::optional<double> omega_l;
  std::optional<double> rabi;
  std::optional<int> l_max;
  std::optional<double> fwhm;
  int threads = 0;
};

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void add_common_options(CLI::App* cmd, CommonOptions& opt) {
  cmd->add_option("--config", opt.config_path, "JSON config file (overrides --scenario)");
  cmd->add_option("--scenario", opt.scenario,
                  "built-in scenario: two_level, lambda_a, lambda_b, lambda_c");
  cmd->add_option("--omega-l", opt.omega_l, "light frequency override (units of omega0)");
  cmd->add_option("--rabi", opt.rabi, "Rabi coupling scale override (units of omega0)");
  cmd->add_option("--l-max", opt.l_max, "harmonic truncation cap override");
  cmd->add_option("--fwhm", opt.fwhm, "Gaussian broadening FWHM override");
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--threads", opt.threads, "OpenMP thread count (0 = runtime default)");
}

Configuration resolve_config(const CommonOptions& opt) {
  Configuration cfg = opt.config_path.empty() ? builtin_scenario(scenario_from_string(opt.scenario))
                                              : load_config(opt.config_path);
  if (opt.omega_l) cfg.drive.omega_l = *opt.omega_l;
  if (opt.rabi) cfg.model = with_rabi_scale(cfg.model, *opt.rabi);
  if (opt.l_max) cfg.numerics.l_max = *opt.l_max;
  if (opt.fwhm) cfg.numerics.broadening_fwhm = *opt.fwhm;
  cfg.model.validate();
  cfg.drive.validate();
  cfg.numerics.validate();
  if (opt.threads > 0) {
#ifdef _OPENMP
    omp_set_num_threads(opt.threads);
#endif
  }
  return cfg;
}

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunManifest make_manifest(const Configuration& cfg, const std::string& command) {
  RunManifest m;
  m.tool = "floqeels";
  m.version = kVersion;
  m.command = command;
  m.timestamp = timestamp_utc();
  m.config = cfg;
  return m;
}

std::string join_args(int argc, char** argv) {
  std::ostringstream s;
  for (int i = 0; i < argc; ++i) s << (i ? " " : "") << argv[i];
  return s.str();
}

AxisSpec parse_axis(const std::string& text) {
  AxisSpec axis;
  if (std::sscanf(text.c_str(), "%lf:%lf:%d", &axis.min, &axis.max, &axis.points) != 3)
    throw Error(Error::Kind::input, "omega-axis: expected MIN:MAX:POINTS, got '" + text + "'");
  return axis;
}

SweepSpec parse_sweep(const std::string& text) {
  SweepSpec sweep;
  const auto colon = text.find(':');
  if (colon == std::string::npos)
    throw Error(Error::Kind::input, "sweep: expected AXIS:MIN:MAX:POINTS, got '" + text + "'");
  const std::string axis = text.substr(0, colon);
  if (axis == "omega_l")
    sweep.axis = SweepAxis::omega_l;
  else if (axis == "rabi")
    sweep.axis = SweepAxis::rabi;
  else
    throw Error(Error::Kind::input, "sweep: axis must be omega_l or rabi, got '" + axis + "'");
  if (std::sscanf(text.c_str() + colon + 1, "%lf:%lf:%d", &sweep.min, &sweep.max,
                  &sweep.points) != 3)
    throw Error(Error::Kind::input, "sweep: expected AXIS:MIN:MAX:POINTS, got '" + text + "'");
  return sweep;
}

std::optional<CouplingGeometry> parse_geometry(double impact, double speed) {
  if (impact <= 0.0) return std::nullopt;
  CouplingGeometry g;
  g.impact_parameter = impact;
  g.speed = speed;
  g.validate();
  return g;
}

int cmd_spectrum(const CommonOptions& opt, const std::string& axis_text, bool with_reference,
                 double geom_impact, double geom_speed, const std::string& command) {
  Configuration cfg = resolve_config(opt);
  const AxisSpec axis = parse_axis(axis_text);
  const auto geometry = parse_geometry(geom_impact, geom_speed);
  fs::create_directories(opt.out_dir);
  RunManifest manifest = make_manifest(cfg, command);

  Timer timer;
  PipelineResult r = run_pipeline(cfg.model, cfg.drive, cfg.numerics);
  if (geometry) apply_coupling_geometry(r.peaks, *geometry);
  manifest.timings_ms["pipeline"] = timer.ms();
  if (r.peaks.negative_count > 0)
    std::cerr << "note: " << r.peaks.negative_count
              << " peak(s) with negative probability (most negative "
              << format_g12(r.peaks.most_negative) << "); reported raw\n";

  Timer write_timer;
  const std::vector<double> omega = linear_axis(axis.min, axis.max, axis.points);
  const SpectrumGrid spectrum = broaden_spectrum(r.peaks, cfg.numerics.broadening_fwhm, omega);
  const std::string spectrum_path = opt.out_dir + "/spectrum.csv";
  const std::string peaks_path = opt.out_dir + "/peaks.csv";
  write_spectrum_csv(spectrum_path, spectrum);
  write_peaks_csv(peaks_path, r.peaks);
  manifest.outputs = {spectrum_path, peaks_path};

  if (with_reference) {
    Configuration ref = cfg;
    ref.model.rabi.setZero();
    PipelineResult r0 = run_pipeline(ref.model, ref.drive, ref.numerics);
    if (geometry) apply_coupling_geometry(r0.peaks, *geometry);
    const SpectrumGrid ref_spectrum =
        broaden_spectrum(r0.peaks, cfg.numerics.broadening_fwhm, omega);
    const std::string ref_path = opt.out_dir + "/reference_spectrum.csv";
    write_spectrum_csv(ref_path, ref_spectrum);
    manifest.outputs.push_back(ref_path);
  }
  manifest.timings_ms["write"] = write_timer.ms();
  manifest.write(opt.out_dir + "/manifest.json");
  std::cout << "spectrum: " << r.peaks.entries.size() << " peaks, sum P/P0 = "
            << format_g12(r.peaks.sum_prob) << ", outputs in " << opt.out_dir << "\n";
  return kExitOk;
}

int cmd_map(const CommonOptions& opt, const std::string& sweep_text,
            const std::string& axis_text, const std::string& command) {
  Configuration cfg = resolve_config(opt);
  const SweepSpec sweep = parse_sweep(sweep_text);
  const AxisSpec axis = parse_axis(axis_text);
  fs::create_directories(opt.out_dir);
  RunManifest manifest = make_manifest(cfg, command);

  Timer timer;
  const MapResult map = sweep_map(cfg.model, cfg.drive, cfg.numerics, sweep, axis);
  manifest.timings_ms["map"] = timer.ms();

  Timer write_timer;
  const std::string map_path = opt.out_dir + "/map.txt";
  const std::string bin_path = opt.out_dir + "/map.bin";
  const std::string peaks_path = opt.out_dir + "/map_peaks.csv";
  write_map_text(map_path, map);
  write_map_binary(bin_path, map);
  write_map_peaks_csv(peaks_path, map);
  manifest.outputs = {map_path, bin_path, peaks_path};
  manifest.timings_ms["write"] = write_timer.ms();
  manifest.write(opt.out_dir + "/manifest.json");

  for (std::size_t r = 0; r < map.row_errors.size(); ++r)
    if (!map.row_errors[r].empty())
      std::cerr << "row " << r << " (" << format_g12(map.sweep_values[r])
                << ") failed: " << map.row_errors[r] << "\n";
  std::cout << "map: " << map.gamma.rows() << " x " << map.gamma.cols() << " ("
            << map.failed_rows() << " failed rows), outputs in " << opt.out_dir << "\n";
  return map.failed_rows() == 0 ? kExitOk : kExitNumerical;
}

int cmd_floquet(const CommonOptions& opt, const std::string& command) {
  Configuration cfg = resolve_config(opt);
  fs::create_directories(opt.out_dir);
  RunManifest manifest = make_manifest(cfg, command);

  Timer timer;
  const FloquetSolution fs_sol = solve_floquet(cfg.model, cfg.drive, cfg.numerics);
  manifest.timings_ms["solve"] = timer.ms();

  const std::string csv_path = opt.out_dir + "/floquet.csv";
  CsvWriter csv(csv_path);
  csv.comment("Floquet bands: omega_tilde on the bare-level replica, omega_folded in");
  csv.comment("(-omega_l/2, omega_l/2]; leading coefficients f(j, a, l) by |f|");
  csv.header({"j", "omega_tilde", "omega_folded", "a1", "l1", "f1", "a2", "l2", "f2", "a3",
              "l3", "f3", "a4", "l4", "f4"});
  for (int j = 0; j < fs_sol.n_levels; ++j) {
    std::vector<std::tuple<double, int, int>> coefs;  // (|f|, a, l)
    for (int a = 0; a < fs_sol.n_levels; ++a)
      for (int l = -fs_sol.l_max; l <= fs_sol.l_max; ++l)
        coefs.emplace_back(std::abs(fs_sol.f(j, a, l)), a, l);
    std::stable_sort(coefs.begin(), coefs.end(),
                     [](const auto& x, const auto& y) { return std::get<0>(x) > std::get<0>(y); });
    std::vector<std::string> row = {std::to_string(j), format_g12(fs_sol.omega_tilde[j]),
                                    format_g12(fs_sol.omega_folded[j])};
    for (int k = 0; k < 4; ++k) {
      const auto& [mag, a, l] = coefs[k];
      row.push_back(std::to_string(a));
      row.push_back(std::to_string(l));
      row.push_back(format_g12(fs_sol.f(j, a, l)));
    }
    csv.row(row);
  }

  const std::string conv_path = opt.out_dir + "/convergence.txt";
  {
    std::ofstream conv(conv_path);
    conv << "l_max " << fs_sol.l_max << "\n";
    conv << "converged " << (fs_sol.converged ? "yes" : "no") << "\n";
    conv << "residual " << format_g12(fs_sol.residual) << "\n";
    conv << "eig_tol " << format_g12(cfg.numerics.eig_tol) << "\n";
  }
  manifest.outputs = {csv_path, conv_path};
  manifest.write(opt.out_dir + "/manifest.json");
  std::cout << "floquet: l_max = " << fs_sol.l_max << ", residual = "
            << format_g12(fs_sol.residual) << ", outputs in " << opt.out_dir << "\n";
  return kExitOk;
}

int cmd_steady(const CommonOptions& opt, bool dump, const std::string& command) {
  Configuration cfg = resolve_config(opt);
  fs::create_directories(opt.out_dir);
  RunManifest manifest = make_manifest(cfg, command);

  Timer timer;
  const FloquetSolution fs_sol = solve_floquet(cfg.model, cfg.drive, cfg.numerics);
  SteadyState ss = steady_state_fourier(cfg.model, cfg.drive, cfg.numerics, fs_sol.l_max);
  to_floquet_basis(ss, fs_sol);
  manifest.timings_ms["solve"] = timer.ms();

  const std::string pop_path = opt.out_dir + "/populations.csv";
  CsvWriter csv(pop_path);
  csv.comment("time-averaged populations: level basis rho(a, a, 0) and Floquet basis");
  csv.comment("rho(j, j, 0)");
  csv.header({"basis", "index", "population"});
  for (int a = 0; a < ss.n_levels; ++a)
    csv.row({"level", std::to_string(a), format_g12(ss.rho_level(a, a, 0).real())});
  for (int j = 0; j < ss.n_levels; ++j)
    csv.row({"floquet", std::to_string(j), format_g12(ss.rho_floquet(j, j, 0).real())});
  manifest.outputs = {pop_path};

  if (dump) {
    const std::string lvl_path = opt.out_dir + "/rho_level.csv";
    CsvWriter lvl(lvl_path);
    lvl.comment("steady-state harmonics rho(a, a', l)");
    lvl.header({"a", "ap", "l", "re", "im"});
    for (int a = 0; a < ss.n_levels; ++a)
      for (int ap = 0; ap < ss.n_levels; ++ap)
        for (int l = -ss.l_max; l <= ss.l_max; ++l)
          lvl.row({std::to_string(a), std::to_string(ap), std::to_string(l),
                   format_g12(ss.rho_level(a, ap, l).real()),
                   format_g12(ss.rho_level(a, ap, l).imag())});
    const std::string flq_path = opt.out_dir + "/rho_floquet.csv";
    CsvWriter flq(flq_path);
    flq.comment("steady-state harmonics rho(j, j', l) in the Floquet basis");
    flq.header({"j", "jp", "l", "re", "im"});
    for (int j = 0; j < ss.n_levels; ++j)
      for (int jp = 0; jp < ss.n_levels; ++jp)
        for (int l = -ss.l_max; l <= ss.l_max; ++l)
          flq.row({std::to_string(j), std::to_string(jp), std::to_string(l),
                   format_g12(ss.rho_floquet(j, jp, l).real()),
                   format_g12(ss.rho_floquet(j, jp, l).imag())});
    manifest.outputs.push_back(lvl_path);
    manifest.outputs.push_back(flq_path);
  }
  manifest.write(opt.out_dir + "/manifest.json");
  std::cout << "steady: populations written to " << pop_path << "\n";
  return kExitOk;
}

int cmd_validate(const CommonOptions& opt, const std::string& command) {
  Configuration cfg = resolve_config(opt);
  fs::create_directories(opt.out_dir);
  RunManifest manifest = make_manifest(cfg, command);

  Timer timer;
  const ValidationReport report = run_full_validation(cfg);
  manifest.timings_ms["validate"] = timer.ms();

  std::cout << report.table();
  const std::string json_path = opt.out_dir + "/validation.json";
  {
    std::ofstream out(json_path);
    out << report.to_json().dump(2) << "\n";
  }
  manifest.outputs = {json_path};
  manifest.write(opt.out_dir + "/manifest.json");
  return report.passed() ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"floqeels: EELS spectra of optically driven few-level atoms"};
  app.require_subcommand(1);
  const std::string command = join_args(argc, argv);

  CommonOptions opt;
  std::string axis_text = "-2:2:801";
  std::string sweep_text;
  bool with_reference = false;
  bool dump = false;
  double geom_impact = 0.0;
  double geom_speed = 0.7;

  CLI::App* spectrum = app.add_subcommand("spectrum", "broadened EELS spectrum and peak list");
  add_common_options(spectrum, opt);
  spectrum->add_option("--omega-axis", axis_text, "energy-loss axis MIN:MAX:POINTS");
  spectrum->add_flag("--with-reference", with_reference,
                     "also emit the non-illuminated (rabi = 0) spectrum");
  spectrum->add_option("--impact-parameter", geom_impact,
                       "beam-sample separation (units of c/omega0); enables the finite-"
                       "geometry coupling factor");
  spectrum->add_option("--speed", geom_speed, "electron speed (units of c)");

  CLI::App* map = app.add_subcommand("map", "2D sweep of spectra over omega_l or rabi");
  add_common_options(map, opt);
  map->add_option("--sweep", sweep_text, "sweep AXIS:MIN:MAX:POINTS (axis: omega_l | rabi)")
      ->required();
  map->add_option("--omega-axis", axis_text, "energy-loss axis MIN:MAX:POINTS");

  CLI::App* floquet = app.add_subcommand("floquet", "quasienergy bands and coefficients");
  add_common_options(floquet, opt);

  CLI::App* steady = app.add_subcommand("steady", "steady-state populations");
  add_common_options(steady, opt);
  steady->add_flag("--dump-coefficients", dump, "emit full harmonic coefficient tables");

  CLI::App* validate = app.add_subcommand("validate", "run the full validation battery");
  add_common_options(validate, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitInput;
  }

  try {
    if (spectrum->parsed())
      return cmd_spectrum(opt, axis_text, with_reference, geom_impact, geom_speed, command);
    if (map->parsed()) return cmd_map(opt, sweep_text, axis_text, command);
    if (floquet->parsed()) return cmd_floquet(opt, command);
    if (steady->parsed()) return cmd_steady(opt, dump, command);
    if (validate->parsed()) return cmd_validate(opt, command);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == Error::Kind::input ? kExitInput : kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitInput;
}
