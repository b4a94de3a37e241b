#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pds/metrics.hpp"
#include "pds/precondition.hpp"
#include "pds/sampler.hpp"
#include "pds/targets.hpp"

namespace pds {

// Anything wrong with a config file: syntax, unknown keys, bad values,
// missing referenced files. The CLI maps this to its "invalid config" exit.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Flat `key = value` text. '#' starts a comment, blank lines are skipped,
// duplicate keys are rejected. Reads mark keys as consumed so finish() can
// flag typos: any key never asked for is an error, not silently ignored.
class KeyValueConfig {
 public:
  static KeyValueConfig parse_file(const std::string& path);
  static KeyValueConfig parse_text(const std::string& text, std::string origin);

  bool has(const std::string& key) const;
  // All getters mark the key consumed. The *_or forms return the fallback
  // when the key is absent; require_* throw ConfigError instead.
  std::optional<std::string> lookup(const std::string& key);
  std::string require(const std::string& key);
  std::string value_or(const std::string& key, std::string fallback);
  double require_double(const std::string& key);
  double double_or(const std::string& key, double fallback);
  int require_int(const std::string& key);
  int int_or(const std::string& key, int fallback);
  std::uint64_t uint_or(const std::string& key, std::uint64_t fallback);
  bool bool_or(const std::string& key, bool fallback);
  std::vector<std::string> require_list(const std::string& key);
  std::vector<double> require_double_list(const std::string& key);

  void finish() const;  // throws ConfigError naming unconsumed keys
  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
};

struct ScheduleSpec {
  bool annealed = false;
  int iterations = 0;
  double eps = 0.0;                // constant schedule
  std::vector<double> sigmas;      // annealed schedule
  double eps_base = 0.0;           // annealed schedule
};

// One named sampler, with its operators already constructed (filter files
// read, statistical filters drawn) so config problems surface at load time.
struct SamplerSpec {
  std::string name;
  std::optional<double> eps_override;
  std::optional<Preconditioner> preconditioner;
  std::optional<Solenoidal> solenoidal;
  bool denoise_final = false;
};

struct ExperimentConfig {
  ScoreTarget target;
  GridShape shape;
  MomentMode metric_mode;
  std::vector<SamplerSpec> samplers;
  ScheduleSpec schedule;
  int chains = 1;
  int checkpoint_stride = 0;
  std::uint64_t seed = 0;
  std::optional<double> benchmark_threshold;
  int benchmark_max_iterations = 0;
};

// Consumes the KeyValueConfig (finish() included). Throws ConfigError for
// anything invalid, including unreadable filter/power files.
ExperimentConfig build_experiment_config(KeyValueConfig& kv);
ExperimentConfig load_experiment_config(const std::string& path);

// Runs every sampler over `chains` chains and writes under out_dir:
//   metrics.csv  — sampler,iteration,w2,spectral_error,mean_err per checkpoint
//                  (plus the final iteration when the stride misses it);
//                  a column not defined for the setup is left empty
//   timing.csv   — sampler,wall_time_s (kept out of metrics.csv so that file
//                  is byte-identical across reruns with the same seed)
//   final_<sampler>.pdsgrid — chain 0 final state
// Holds chains×checkpoints snapshots in memory while a sampler runs.
void run_sample(const ExperimentConfig& cfg, const std::string& out_dir);

// Finds, per sampler, the first checkpoint whose pooled spectral error drops
// to benchmark_threshold, scanning one run of benchmark_max_iterations steps.
// Writes summary.csv (sampler,T_needed,speedup_vs_vanilla; "not_reached" and
// an empty speedup when the threshold is never met) and curves.csv
// (sampler,iteration,spectral_error). Requires a target with a power spectrum
// and a sampler named "vanilla" as the speedup baseline.
void run_benchmark(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace pds
