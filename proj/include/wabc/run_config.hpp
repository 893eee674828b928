#pragma once

#include <optional>
#include <string>

#include "wabc/smc.hpp"
#include "wabc/types.hpp"

namespace wabc {

// Everything needed to reproduce one sampler run.  Parsed from JSON with
// strict key checking: unknown keys are configuration errors.
struct RunConfig {
  std::string model;
  Eigen::Index n = 0;                      // observations per data set
  std::optional<std::string> observed_path;
  std::optional<Vector> theta_true;        // used when observed_path is absent
  std::uint64_t observed_seed = 0;         // 0: derived from seed
  DistanceSpec spec;
  SmcConfig smc;
  long stage2_budget = 0;                  // > 0 enables the two-stage run
  std::string output_dir;
  bool save_steps = true;
  int toggle_horizon = 300;
  bool constrain_mg1_theta1 = false;
};

RunConfig parse_run_config_json(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

// Stable hash of the configuration text (FNV-1a, hex string).
std::string config_hash(const std::string& json_text);

// Resolves the model (applying model-specific options), loads or simulates
// the observed data, runs the sampler and writes
//   trace.csv, particles.csv, meta.json and (optionally) particles_step_K.csv
// under cfg.output_dir; the two-stage variant adds a stage2/ subdirectory.
// Returns the final state (stage two's when enabled).
SmcState execute_run(const RunConfig& cfg, int workers,
                     const std::string& config_text);

// The model a config refers to, with per-run options applied; observed must
// be the observed data when the mg1 constraint is requested.
GenerativeModel resolve_model(const RunConfig& cfg, const Matrix* observed);

// Load observed data from cfg (file or synthetic simulation).
Matrix resolve_observed(const RunConfig& cfg, const GenerativeModel& model);

// Writers shared with tests: particle table is theta columns plus distance.
void write_particles_csv(const std::string& path, const GenerativeModel& model,
                         const std::vector<Particle>& particles);
void write_trace_csv(const std::string& path,
                     const std::vector<ThresholdTraceRow>& trace);

std::string particles_to_csv_string(const GenerativeModel& model,
                                    const std::vector<Particle>& particles);

}  // namespace wabc
