#include "floqeels/io.hpp"

#include <cstdint>
#include <cstdio>
#include <ctime>

#include <nlohmann/json.hpp>

#include "floqeels/version.hpp"

namespace floqeels {

std::string format_g12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path) : out_(path), path_(path) {
  if (!out_) throw Error(Error::Kind::input, "csv: cannot write '" + path + "'");
}

void CsvWriter::comment(const std::string& line) { out_ << "# " << line << "\n"; }

void CsvWriter::header(const std::vector<std::string>& columns) {
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << columns[i] << (i + 1 < columns.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i)
    out_ << fields[i] << (i + 1 < fields.size() ? "," : "\n");
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i)
    out_ << format_g12(values[i]) << (i + 1 < values.size() ? "," : "\n");
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json timings = nlohmann::json::object();
  for (const auto& [k, v] : timings_ms) timings[k] = v;
  return {{"tool", tool},
          {"version", version},
          {"command", command},
          {"timestamp", timestamp},
          {"config", config_to_json(config)},
          {"outputs", outputs},
          {"timings_ms", timings}};
}

void RunManifest::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error(Error::Kind::input, "manifest: cannot write '" + path + "'");
  out << to_json().dump(2) << "\n";
}

void write_spectrum_csv(const std::string& path, const SpectrumGrid& spectrum) {
  CsvWriter csv(path);
  csv.comment("EELS spectrum: omega in units of omega0, gamma is probability density");
  csv.comment("per unit omega0 in P0 units (unit-area Gaussian per peak, FWHM " +
              format_g12(spectrum.fwhm) + ")");
  csv.header({"omega", "gamma"});
  for (std::size_t i = 0; i < spectrum.omega.size(); ++i)
    csv.row(std::vector<double>{spectrum.omega[i], spectrum.gamma[i]});
}

void write_peaks_csv(const std::string& path, const PeakSet& peaks) {
  CsvWriter csv(path);
  csv.comment("EELS peaks: omega in units of omega0, prob = P/P0 (normalized to the");
  csv.comment("single loss peak of the non-illuminated atom); sorted by |prob|");
  csv.comment("sum_prob = " + format_g12(peaks.sum_prob) +
              ", l_window = " + std::to_string(peaks.l_window));
  if (peaks.negative_count > 0)
    csv.comment("negative entries: " + std::to_string(peaks.negative_count) +
                " (most negative " + format_g12(peaks.most_negative) + ")");
  csv.header({"j", "jp", "l", "omega", "prob"});
  for (const Peak& p : peaks.entries)
    csv.row({std::to_string(p.j), std::to_string(p.jp), std::to_string(p.l),
             format_g12(p.omega), format_g12(p.prob)});
}

void write_map_text(const std::string& path, const MapResult& map) {
  std::ofstream out(path);
  if (!out) throw Error(Error::Kind::input, "map: cannot write '" + path + "'");
  out << "# gnuplot nonuniform matrix: first row = omega axis (units of omega0),\n";
  out << "# first column = sweep value ("
      << (map.sweep.axis == SweepAxis::omega_l ? "omega_l" : "rabi")
      << "); values = EELS probability density in P0 units\n";
  out << map.omega_axis.size();
  for (double w : map.omega_axis) out << " " << format_g12(w);
  out << "\n";
  for (Eigen::Index r = 0; r < map.gamma.rows(); ++r) {
    out << format_g12(map.sweep_values[r]);
    for (Eigen::Index c = 0; c < map.gamma.cols(); ++c)
      out << " " << format_g12(map.gamma(r, c));
    out << "\n";
  }
}

void write_map_binary(const std::string& path, const MapResult& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Error::Kind::input, "map: cannot write '" + path + "'");
  // Raw little-endian float64, row-major [rows][cols]; dimensions in the manifest.
  for (Eigen::Index r = 0; r < map.gamma.rows(); ++r)
    for (Eigen::Index c = 0; c < map.gamma.cols(); ++c) {
      const double v = map.gamma(r, c);
      out.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
}

void write_map_peaks_csv(const std::string& path, const MapResult& map) {
  CsvWriter csv(path);
  csv.comment("labeled peak trajectories: one block per sweep row");
  csv.comment("sweep axis: " +
              std::string(map.sweep.axis == SweepAxis::omega_l ? "omega_l" : "rabi"));
  csv.header({"row", "sweep_value", "j", "jp", "l", "omega", "prob"});
  for (std::size_t r = 0; r < map.row_peaks.size(); ++r) {
    if (!map.row_errors[r].empty()) continue;
    for (const Peak& p : map.row_peaks[r].entries)
      csv.row({std::to_string(r), format_g12(map.sweep_values[r]), std::to_string(p.j),
               std::to_string(p.jp), std::to_string(p.l), format_g12(p.omega),
               format_g12(p.prob)});
  }
}

}  // namespace floqeels
