// CSV/map file writers and the run manifest. All floats are emitted with
// 12 significant digits so outputs are byte-identical across runs.
#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "floqeels/eels.hpp"
#include "floqeels/model.hpp"

namespace floqeels {

std::string format_g12(double x);

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void comment(const std::string& line);
  void header(const std::vector<std::string>& columns);
  void row(const std::vector<std::string>& fields);
  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::string path_;
};

struct RunManifest {
  std::string tool;
  std::string version;
  std::string command;
  std::string timestamp;
  Configuration config;
  std::vector<std::string> outputs;
  std::map<std::string, double> timings_ms;

  nlohmann::json to_json() const;
  void write(const std::string& path) const;
};

void write_spectrum_csv(const std::string& path, const SpectrumGrid& spectrum);
void write_peaks_csv(const std::string& path, const PeakSet& peaks);
// Gnuplot "nonuniform matrix" text format plus a raw float64 row-major dump.
void write_map_text(const std::string& path, const MapResult& map);
void write_map_binary(const std::string& path, const MapResult& map);
void write_map_peaks_csv(const std::string& path, const MapResult& map);

}  // namespace floqeels
