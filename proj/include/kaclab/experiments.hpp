#ifndef KACLAB_EXPERIMENTS_HPP
#define KACLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "kaclab/csv.hpp"
#include "kaclab/kernel3d.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/scattering.hpp"

namespace kac::cli {

/// Resolved settings of one run. Zero / empty fields fall back to the
/// experiment's defaults (listed in `describe`).
struct ExperimentConfig {
  std::string experiment;
  std::optional<std::uint64_t> seed;
  std::vector<std::size_t> ns;
  std::size_t replicas = 0;
  std::vector<double> times;
  /// uniform | cos2 | one-plus-cos | bump:<center>:<width> | table:<path>; 3D:
  /// uniform | linear:<b> | power:<a>.
  std::string kernel = "uniform";
  std::string density;
  std::vector<double> deltas;
  double beta = 0.1;
  std::size_t samples = 0;
  std::size_t chains = 0;
  double dt = 0.01;
  std::filesystem::path output_dir = ".";
  std::string name;
  Exec exec = Exec::parallel;
};

struct ExperimentInfo {
  std::string name;
  std::uint32_t id = 0;
  std::string summary;
  std::vector<std::string> columns;
};

const std::vector<ExperimentInfo>& experiments();
const ExperimentInfo& experiment_info(const std::string& name);

struct ExperimentRecord {
  std::string name;
  Table table;
  Manifest manifest;
  /// Numeric checks that failed (exit code 3 when non-empty).
  std::vector<std::string> failures;
  bool interrupted = false;
};

/// Throws ValidationError for unknown experiments or bad parameters.
ExperimentRecord run_experiment(const ExperimentConfig& config);

/// Writes <dir>/<name>.csv and <dir>/<name>.manifest.txt.
void emit(const ExperimentRecord& record, const std::filesystem::path& dir);

std::vector<std::size_t> parse_size_list(const std::string& s);
/// "a,b,c" or "start:stop:step" (inclusive of stop within 1e-9).
std::vector<double> parse_double_list(const std::string& s);
ScatteringDensity parse_kernel(const std::string& spec);
AngularKernel3D parse_kernel3d(const std::string& spec);

/// Set from a signal handler; long experiments stop between rows.
void request_interrupt();
bool interrupt_requested();

}  // namespace kac::cli

#endif
