#pragma once

#include "rcrl/train.hpp"

namespace rcrl {

struct SeedRunInfo {
  uint64_t seed = 0;
  std::string dir;
  bool cached = false;  // reused a completed run on disk
  TrainResult result;   // default-initialized when cached
};

struct ExperimentResult {
  std::string config_dir;
  std::vector<SeedRunInfo> seeds;
};

std::string config_dir_for(const RunConfig& cfg);
std::string run_dir_for(const RunConfig& cfg, uint64_t seed);

// One training run per seed. Completed runs (COMPLETE marker + summary) are
// reused, which is what lets interrupted campaigns pick up where they left
// off. Writes config.json and aggregate.json into the config directory.
ExperimentResult run_experiment(const RunConfig& cfg, bool reuse_cache = true);

inline double report_with_fixed_wc(double rb_sum, double rc_sum, double w_c_report) {
  return rb_sum + w_c_report * rc_sum;
}

// Known variants: reset-networks, reset-buffer, static-switch-T/8,
// static-switch-T/3, static-switch-T/2, base-subset-{gp,gpv,gpa,gpx,full}.
RunConfig make_variant(const RunConfig& base, const std::string& variant);

struct AblationResult {
  ExperimentResult reference;
  ExperimentResult variant;
  std::string comparison_csv;
};

// Runs reference and variant with shared seeds and writes a comparison CSV
// of window-50 running averages of the per-iteration training return.
AblationResult run_ablation(const RunConfig& base, const std::string& variant,
                            bool reuse_cache = true);

// Trailing mean over the last `window` non-NaN entries; NaN until the first
// finite value appears.
std::vector<double> running_average(const std::vector<double>& xs, int window);

void ensure_dir(const std::string& path);
bool file_exists(const std::string& path);

}  // namespace rcrl
