#include "floqeels/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace floqeels {

namespace {

void require(bool ok, const std::string& field, const std::string& reason) {
  if (!ok) throw Error(Error::Kind::input, field + ": " + reason);
}

void check_symmetric_matrix(const Eigen::MatrixXd& m, int n, const std::string& name,
                            bool nonnegative = false) {
  require(m.rows() == n && m.cols() == n, name, "must be an N x N matrix");
  for (int a = 0; a < n; ++a) {
    require(std::isfinite(m(a, a)) && m(a, a) == 0.0, name, "diagonal must be zero");
    for (int ap = 0; ap < n; ++ap) {
      require(std::isfinite(m(a, ap)), name, "entries must be finite");
      if (nonnegative) require(m(a, ap) >= 0.0, name, "entries must be nonnegative");
    }
  }
}

}  // namespace

void AtomModel::validate() const {
  require(n_levels >= 2, "n_levels", "need at least two levels");
  require(energies.size() == n_levels, "energies", "size must equal n_levels");
  for (int a = 0; a < n_levels; ++a)
    require(std::isfinite(energies[a]), "energies", "entries must be finite");
  for (int a = 1; a < n_levels; ++a)
    require(energies[a] >= energies[a - 1], "energies", "must be sorted ascending");
  require(energies[1] - energies[0] > 0.0, "energies",
          "first transition energy must be positive");

  check_symmetric_matrix(rabi, n_levels, "rabi");
  check_symmetric_matrix(dipole_ratio, n_levels, "dipole_ratio");
  for (int a = 0; a < n_levels; ++a)
    for (int ap = a + 1; ap < n_levels; ++ap) {
      std::ostringstream where;
      where << "[" << a << "][" << ap << "]";
      require(rabi(a, ap) == rabi(ap, a), "rabi", "must be symmetric at " + where.str());
      require(dipole_ratio(a, ap) == dipole_ratio(ap, a), "dipole_ratio",
              "must be symmetric at " + where.str());
    }
  require(decay.rows() == n_levels && decay.cols() == n_levels, "decay",
          "must be an N x N matrix");
  for (int a = 0; a < n_levels; ++a) {
    require(decay(a, a) == 0.0, "decay", "diagonal must be zero");
    for (int ap = 0; ap < n_levels; ++ap) {
      require(std::isfinite(decay(a, ap)), "decay", "entries must be finite");
      require(decay(a, ap) >= 0.0, "decay", "rates must be nonnegative");
    }
  }
}

void DriveParams::validate() const {
  require(std::isfinite(omega_l) && omega_l > 0.0, "drive.omega_l", "must be positive");
}

void NumericsConfig::validate() const {
  require(l_max >= 1, "numerics.l_max", "must be >= 1");
  require(eig_tol > 0.0, "numerics.eig_tol", "must be positive");
  require(steady_tol > 0.0, "numerics.steady_tol", "must be positive");
  require(peak_tol > 0.0, "numerics.peak_tol", "must be positive");
  require(propagate_t_end >= 0.0, "numerics.propagate_t_end", "must be nonnegative");
  require(propagate_dt >= 0.0, "numerics.propagate_dt", "must be nonnegative");
  require(broadening_fwhm > 0.0, "numerics.broadening_fwhm", "must be positive");
}

Scenario scenario_from_string(const std::string& name) {
  if (name == "two_level") return Scenario::two_level;
  if (name == "lambda_a") return Scenario::lambda_a;
  if (name == "lambda_b") return Scenario::lambda_b;
  if (name == "lambda_c") return Scenario::lambda_c;
  throw Error(Error::Kind::input, "scenario: unknown name '" + name +
                                      "' (expected two_level, lambda_a, lambda_b, lambda_c)");
}

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::two_level: return "two_level";
    case Scenario::lambda_a: return "lambda_a";
    case Scenario::lambda_b: return "lambda_b";
    case Scenario::lambda_c: return "lambda_c";
  }
  return "?";
}

Configuration builtin_scenario(Scenario s) {
  Configuration cfg;
  AtomModel& m = cfg.model;
  const double kappa = 0.01;  // common decay rate, well inside kappa << omega0

  if (s == Scenario::two_level) {
    m.n_levels = 2;
    m.energies = Eigen::Vector2d(0.0, 1.0);
    m.rabi = Eigen::Matrix2d::Zero();
    m.rabi(0, 1) = m.rabi(1, 0) = 0.4;
    m.dipole_ratio = Eigen::Matrix2d::Zero();
    m.dipole_ratio(0, 1) = m.dipole_ratio(1, 0) = 1.0;
    m.decay = Eigen::Matrix2d::Zero();
    m.decay(1, 0) = kappa;  // e -> g
  } else {
    // Lambda atom: levels g, m, e with omega1 = eps_e - eps_m = 0.3 omega0.
    m.n_levels = 3;
    m.energies = Eigen::Vector3d(0.0, 0.7, 1.0);
    m.rabi = Eigen::Matrix3d::Zero();
    m.dipole_ratio = Eigen::Matrix3d::Zero();
    m.decay = Eigen::Matrix3d::Zero();
    m.decay(2, 0) = kappa;  // e -> g
    m.decay(2, 1) = kappa;  // e -> m
    m.decay(1, 0) = kappa;  // m -> g
    const double omega_rabi = 0.3;
    auto couple = [](Eigen::MatrixXd& mat, int a, int b, double v) {
      mat(a, b) = mat(b, a) = v;
    };
    switch (s) {
      case Scenario::lambda_a:
        // Both transitions driven by light and probed by the electron.
        couple(m.rabi, 0, 2, omega_rabi);
        couple(m.rabi, 1, 2, omega_rabi);
        couple(m.dipole_ratio, 0, 2, 1.0);
        couple(m.dipole_ratio, 1, 2, 1.0);
        break;
      case Scenario::lambda_b:
        // Electron couples g<->e only, light couples m<->e only.
        couple(m.rabi, 1, 2, omega_rabi);
        couple(m.dipole_ratio, 0, 2, 1.0);
        break;
      case Scenario::lambda_c:
        // Light couples g<->e only, electron couples m<->e only.
        couple(m.rabi, 0, 2, omega_rabi);
        couple(m.dipole_ratio, 1, 2, 1.0);
        break;
      default: break;
    }
  }

  cfg.drive.omega_l = 1.2;
  cfg.model.validate();
  cfg.drive.validate();
  cfg.numerics.validate();
  return cfg;
}

namespace {

Eigen::MatrixXd matrix_from_json(const nlohmann::json& j, const std::string& name, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n)
    throw Error(Error::Kind::input, name + ": expected " + std::to_string(n) + " rows");
  Eigen::MatrixXd m(n, n);
  for (int a = 0; a < n; ++a) {
    const auto& row = j[a];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw Error(Error::Kind::input,
                  name + ": row " + std::to_string(a) + " must have " + std::to_string(n) +
                      " entries");
    for (int ap = 0; ap < n; ++ap) {
      if (!row[ap].is_number())
        throw Error(Error::Kind::input, name + ": entries must be numbers");
      m(a, ap) = row[ap].get<double>();
    }
  }
  return m;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int a = 0; a < m.rows(); ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (int ap = 0; ap < m.cols(); ++ap) row.push_back(m(a, ap));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

Configuration config_from_json(const nlohmann::json& j) {
  Configuration cfg;
  if (!j.contains("levels") || !j["levels"].is_array() || j["levels"].size() < 2)
    throw Error(Error::Kind::input, "levels: need an array of at least two levels");
  const int n = static_cast<int>(j["levels"].size());
  cfg.model.n_levels = n;
  cfg.model.energies.resize(n);
  for (int a = 0; a < n; ++a) {
    const auto& level = j["levels"][a];
    if (!level.contains("energy") || !level["energy"].is_number())
      throw Error(Error::Kind::input,
                  "levels[" + std::to_string(a) + "].energy: missing or not a number");
    cfg.model.energies[a] = level["energy"].get<double>();
  }

  if (!j.contains("rabi")) throw Error(Error::Kind::input, "rabi: missing");
  cfg.model.rabi = matrix_from_json(j["rabi"], "rabi", n);
  if (!j.contains("dipole_ratio")) throw Error(Error::Kind::input, "dipole_ratio: missing");
  cfg.model.dipole_ratio = matrix_from_json(j["dipole_ratio"], "dipole_ratio", n);
  if (!j.contains("decay")) throw Error(Error::Kind::input, "decay: missing");
  cfg.model.decay = matrix_from_json(j["decay"], "decay", n);

  if (j.contains("drive")) {
    const auto& d = j["drive"];
    if (d.contains("omega_l")) {
      if (!d["omega_l"].is_number())
        throw Error(Error::Kind::input, "drive.omega_l: must be a number");
      cfg.drive.omega_l = d["omega_l"].get<double>();
    }
  }

  if (j.contains("numerics")) {
    const auto& nj = j["numerics"];
    auto get_num = [&](const char* key, double& out) {
      if (nj.contains(key)) {
        if (!nj[key].is_number())
          throw Error(Error::Kind::input, std::string("numerics.") + key + ": must be a number");
        out = nj[key].get<double>();
      }
    };
    if (nj.contains("l_max")) {
      if (!nj["l_max"].is_number_integer())
        throw Error(Error::Kind::input, "numerics.l_max: must be an integer");
      cfg.numerics.l_max = nj["l_max"].get<int>();
    }
    get_num("eig_tol", cfg.numerics.eig_tol);
    get_num("steady_tol", cfg.numerics.steady_tol);
    get_num("peak_tol", cfg.numerics.peak_tol);
    get_num("propagate_t_end", cfg.numerics.propagate_t_end);
    get_num("propagate_dt", cfg.numerics.propagate_dt);
    get_num("broadening_fwhm", cfg.numerics.broadening_fwhm);
  }

  cfg.model.validate();
  cfg.drive.validate();
  cfg.numerics.validate();
  return cfg;
}

Configuration load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Error::Kind::input, "config: cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(Error::Kind::input, "config: parse error in '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

nlohmann::json config_to_json(const Configuration& cfg) {
  nlohmann::json j;
  j["levels"] = nlohmann::json::array();
  for (int a = 0; a < cfg.model.n_levels; ++a)
    j["levels"].push_back({{"energy", cfg.model.energies[a]}});
  j["rabi"] = matrix_to_json(cfg.model.rabi);
  j["dipole_ratio"] = matrix_to_json(cfg.model.dipole_ratio);
  j["decay"] = matrix_to_json(cfg.model.decay);
  j["drive"] = {{"omega_l", cfg.drive.omega_l}};
  j["numerics"] = {{"l_max", cfg.numerics.l_max},
                   {"eig_tol", cfg.numerics.eig_tol},
                   {"steady_tol", cfg.numerics.steady_tol},
                   {"peak_tol", cfg.numerics.peak_tol},
                   {"propagate_t_end", cfg.numerics.propagate_t_end},
                   {"propagate_dt", cfg.numerics.propagate_dt},
                   {"broadening_fwhm", cfg.numerics.broadening_fwhm}};
  return j;
}

void save_config(const Configuration& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(Error::Kind::input, "config: cannot write '" + path + "'");
  out << config_to_json(cfg).dump(2) << "\n";
}

double rabi_scale(const AtomModel& model) { return model.rabi.cwiseAbs().maxCoeff(); }

AtomModel with_rabi_scale(const AtomModel& model, double scale) {
  const double base = rabi_scale(model);
  if (base == 0.0)
    throw Error(Error::Kind::input, "rabi: cannot rescale a zero coupling pattern");
  AtomModel out = model;
  out.rabi = model.rabi * (scale / base);
  return out;
}

}  // namespace floqeels
