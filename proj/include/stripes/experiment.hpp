#ifndef STRIPES_EXPERIMENT_HPP
#define STRIPES_EXPERIMENT_HPP

// Experiment driver: flat key=value configs, the restricted/unrestricted
// run modes, and the artifact file set each run produces.

#include "stripes/bregman.hpp"

#include <stdexcept>
#include <string>

namespace stripes {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  double semi_major = 0.0;  // defaults set in default_config()
  double semi_minor = 0.0;
  double target_edge = 0.0;
  SolverConfig solver;
  std::string mode = "both";  // restricted | unrestricted | both
  std::string output_dir = "out";
  int log_stride = 10;
  int snapshot_stride = 0;  // 0 = final checkpoint only
  long seed = 0;            // reserved; the pipeline is deterministic
  double mu_threshold = -1.0;  // < 0: auto = 0.25 * max |mu|
  int heatmap_px = 800;

  void validate() const;  // throws ConfigError
};

ExperimentConfig default_config();

// Flat `key = value` text with '#' comments; unknown keys are rejected.
ExperimentConfig load_config_file(const std::string& path);
void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value);
std::string config_echo_text(const ExperimentConfig& cfg);

// Runs the configured modes, writing per mode: energy.log, theta.csv,
// fields.csv, mu.csv, disclinations.csv, checkpoint.txt and the h / |grad|
// heatmaps; plus mesh.txt and config.echo at the output root.
void run_experiment(const ExperimentConfig& cfg);

}  // namespace stripes

#endif
