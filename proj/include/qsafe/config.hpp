#pragma once

#include <cstdint>
#include <string>

#include "qsafe/partition.hpp"
#include "qsafe/quant.hpp"

namespace qsafe {

// One flat bag of run settings shared by the CLI and the C API. Config files
// are key=value lines (keys below, '#' comments); command-line flags override
// file values.
struct RunConfig {
  std::string nnet_dir;
  double q_pos = 500.0;
  double q_vel = 100.0;
  double q_theta_deg = 1.5;
  double vown_min = 100.0, vown_max = 1200.0;
  double vint_min = 0.0, vint_max = 1200.0;
  std::string tau_dot = "both";  // "0", "-1", "both"
  int jobs = 0;                  // 0 = hardware concurrency
  std::uint64_t seed = 0;
  std::string out;               // output directory ("" = current)
  std::string resume;            // resume file path ("" = none)
  int max_depth = 300;
  double pos_floor = 1.0;
  double vel_floor = 1e-3;
  double theta_floor_deg = 1e-3;
  bool argmax_scores = false;
  int max_steps = 1000;
  std::uint64_t mc_batch = 1500000;

  // Error{InvalidArgument} for unknown keys, Error{ParseError} for bad values.
  void set(const std::string& key, const std::string& value);
  void load_file(const std::string& path);

  // Point speed ranges (min == max) switch the matching axis to an exact
  // pinned speed instead of a discretized one.
  QuantParams quant_params() const;
  TauDotMode tau_mode() const;
  int effective_jobs() const;
  void validate() const;
};

}  // namespace qsafe
