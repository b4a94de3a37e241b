#include "pds/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <utility>

#include "pds/filters.hpp"
#include "pds/grid_io.hpp"
#include "pds/spectral.hpp"

namespace pds {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double_value(const std::string& raw, const std::string& key) {
  double v = 0.0;
  const char* first = raw.data();
  const char* last = raw.data() + raw.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last || !std::isfinite(v)) {
    throw ConfigError("key '" + key + "': expected a finite number, got '" + raw + "'");
  }
  return v;
}

template <typename Int>
Int parse_int_value(const std::string& raw, const std::string& key) {
  Int v = 0;
  const char* first = raw.data();
  const char* last = raw.data() + raw.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last) {
    throw ConfigError("key '" + key + "': expected an integer, got '" + raw + "'");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& raw, const std::string& key) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= raw.size()) {
    const std::size_t comma = raw.find(',', pos);
    const std::string item =
        trim(comma == std::string::npos ? raw.substr(pos) : raw.substr(pos, comma - pos));
    if (item.empty()) {
      throw ConfigError("key '" + key + "': empty element in list '" + raw + "'");
    }
    out.push_back(item);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace

KeyValueConfig KeyValueConfig::parse_text(const std::string& text, std::string origin) {
  KeyValueConfig kv;
  kv.origin_ = std::move(origin);
  std::size_t line_start = 0;
  int line_no = 0;
  while (line_start <= text.size()) {
    const std::size_t nl = text.find('\n', line_start);
    std::string line =
        nl == std::string::npos ? text.substr(line_start) : text.substr(line_start, nl - line_start);
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (!line.empty()) {
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos) {
        throw ConfigError(kv.origin_ + ":" + std::to_string(line_no) +
                          ": expected 'key = value', got '" + line + "'");
      }
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) {
        throw ConfigError(kv.origin_ + ":" + std::to_string(line_no) + ": empty key");
      }
      if (value.empty()) {
        throw ConfigError(kv.origin_ + ":" + std::to_string(line_no) + ": empty value for key '" +
                          key + "'");
      }
      if (!kv.values_.emplace(key, value).second) {
        throw ConfigError(kv.origin_ + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                          "'");
      }
    }
    if (nl == std::string::npos) break;
    line_start = nl + 1;
  }
  return kv;
}

KeyValueConfig KeyValueConfig::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_text(text, path);
}

bool KeyValueConfig::has(const std::string& key) const { return values_.count(key) != 0; }

std::optional<std::string> KeyValueConfig::lookup(const std::string& key) {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  consumed_.insert(key);
  return it->second;
}

std::string KeyValueConfig::require(const std::string& key) {
  auto v = lookup(key);
  if (!v) throw ConfigError(origin_ + ": missing required key '" + key + "'");
  return *v;
}

std::string KeyValueConfig::value_or(const std::string& key, std::string fallback) {
  auto v = lookup(key);
  return v ? *v : std::move(fallback);
}

double KeyValueConfig::require_double(const std::string& key) {
  return parse_double_value(require(key), key);
}

double KeyValueConfig::double_or(const std::string& key, double fallback) {
  auto v = lookup(key);
  return v ? parse_double_value(*v, key) : fallback;
}

int KeyValueConfig::require_int(const std::string& key) {
  return parse_int_value<int>(require(key), key);
}

int KeyValueConfig::int_or(const std::string& key, int fallback) {
  auto v = lookup(key);
  return v ? parse_int_value<int>(*v, key) : fallback;
}

std::uint64_t KeyValueConfig::uint_or(const std::string& key, std::uint64_t fallback) {
  auto v = lookup(key);
  return v ? parse_int_value<std::uint64_t>(*v, key) : fallback;
}

bool KeyValueConfig::bool_or(const std::string& key, bool fallback) {
  auto v = lookup(key);
  if (!v) return fallback;
  if (*v == "true") return true;
  if (*v == "false") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" + *v + "'");
}

std::vector<std::string> KeyValueConfig::require_list(const std::string& key) {
  return split_list(require(key), key);
}

std::vector<double> KeyValueConfig::require_double_list(const std::string& key) {
  std::vector<double> out;
  for (const std::string& item : split_list(require(key), key)) {
    out.push_back(parse_double_value(item, key));
  }
  return out;
}

void KeyValueConfig::finish() const {
  std::string unknown;
  for (const auto& [key, value] : values_) {
    if (consumed_.count(key)) continue;
    if (!unknown.empty()) unknown += ", ";
    unknown += "'" + key + "'";
  }
  if (!unknown.empty()) {
    throw ConfigError(origin_ + ": unrecognized keys: " + unknown);
  }
}

namespace {

// Re-label any non-config exception thrown while acting on a config value
// (bad filter file, non-symmetric filter, ...) as a config problem.
template <typename F>
auto cfg_guard(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

// file: paths are resolved against the config file's directory so configs
// can be invoked from anywhere.
std::string resolve_path(const std::string& origin, const std::string& rel) {
  namespace fs = std::filesystem;
  const fs::path p(rel);
  if (p.is_absolute() || origin.empty() || origin.front() == '<') return rel;
  return (fs::path(origin).parent_path() / p).string();
}

GridShape parse_shape(KeyValueConfig& kv) {
  GridShape shape;
  shape.channels = kv.int_or("target.channels", 1);
  shape.height = kv.require_int("target.height");
  shape.width = kv.require_int("target.width");
  if (!shape.valid()) {
    throw ConfigError("target dimensions must be positive, got " + to_string(shape));
  }
  return shape;
}

ScoreTarget build_target(KeyValueConfig& kv) {
  const std::string kind = kv.require("target.kind");
  if (kind == "gaussian") {
    const GridShape shape = parse_shape(kv);
    const double mean = kv.double_or("target.mean", 0.0);
    const double variance = kv.double_or("target.variance", 1.0);
    if (!(variance > 0.0)) throw ConfigError("target.variance must be positive");
    const auto n = static_cast<Eigen::Index>(shape.size());
    return cfg_guard("target", [&]() -> ScoreTarget {
      return GaussianTarget::make(Field(shape, mean),
                                  variance * Eigen::MatrixXd::Identity(n, n));
    });
  }
  if (kind == "grf") {
    if (auto pf = kv.lookup("target.power_file")) {
      return cfg_guard("target.power_file", [&]() -> ScoreTarget {
        return GrfTarget::make(read_grid(resolve_path(kv.origin(), *pf)));
      });
    }
    const GridShape shape = parse_shape(kv);
    const double falloff = kv.require_double("target.falloff");
    const double exponent = kv.double_or("target.exponent", 1.0);
    return cfg_guard("target", [&]() -> ScoreTarget {
      return GrfTarget::radial_power(shape, falloff, exponent);
    });
  }
  if (kind == "mixture") {
    const GridShape shape = parse_shape(kv);
    const double offset = kv.require_double("target.offset");
    const double variance = kv.double_or("target.variance", 1.0);
    const double weight = kv.double_or("target.weight", 0.5);
    if (!(variance > 0.0)) throw ConfigError("target.variance must be positive");
    if (!(weight >= 0.0 && weight <= 1.0)) throw ConfigError("target.weight must be in [0, 1]");
    return cfg_guard("target", [&]() -> ScoreTarget {
      return MixtureTarget::make({weight, 1.0 - weight},
                                 {Field(shape, offset), Field(shape, -offset)},
                                 {variance, variance});
    });
  }
  throw ConfigError("unknown target.kind '" + kind + "' (expected gaussian, grf, or mixture)");
}

SkewOperator parse_skew(const std::string& text, const std::string& key) {
  if (text == "spectral_transpose_diff") return spectral_transpose_diff();
  const auto parse_shift_pair = [&](const std::string& prefix) -> std::optional<std::pair<int, int>> {
    if (text.size() <= prefix.size() || text.compare(0, prefix.size(), prefix) != 0) {
      return std::nullopt;
    }
    if (text[prefix.size()] != '(' || text.back() != ')') {
      throw ConfigError("key '" + key + "': expected '" + prefix + "(m,n)', got '" + text + "'");
    }
    const std::string inner = text.substr(prefix.size() + 1, text.size() - prefix.size() - 2);
    const std::size_t comma = inner.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("key '" + key + "': expected '" + prefix + "(m,n)', got '" + text + "'");
    }
    const int m = parse_int_value<int>(trim(inner.substr(0, comma)), key);
    const int n = parse_int_value<int>(trim(inner.substr(comma + 1)), key);
    return std::make_pair(m, n);
  };
  if (auto p = parse_shift_pair("spectral_shift_diff")) {
    return spectral_shift_diff(p->first, p->second);
  }
  if (auto p = parse_shift_pair("shift_diff")) return shift_diff(p->first, p->second);
  throw ConfigError("key '" + key + "': unknown skew operator '" + text +
                    "' (expected shift_diff(m,n), spectral_shift_diff(m,n), or "
                    "spectral_transpose_diff)");
}

SamplerSpec build_sampler(KeyValueConfig& kv, const std::string& name, const ScoreTarget& target,
                          const GridShape& shape, std::uint64_t seed, std::size_t index) {
  for (char c : name) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '+' &&
        c != '.') {
      throw ConfigError("sampler name '" + name + "' contains characters unusable in filenames");
    }
  }
  const std::string prefix = "sampler." + name + ".";
  SamplerSpec spec;
  spec.name = name;
  if (auto eps = kv.lookup(prefix + "eps")) {
    spec.eps_override = parse_double_value(*eps, prefix + "eps");
  }
  spec.denoise_final = kv.bool_or(prefix + "denoise_final", false);

  const std::string kind = kv.require(prefix + "kind");
  if (kind == "vanilla") return spec;  // leftover pds keys surface via finish()
  if (kind != "pds") {
    throw ConfigError("key '" + prefix + "kind': expected vanilla or pds, got '" + kind + "'");
  }

  const std::string space_kind = kv.value_or(prefix + "space_filter", "uniform");
  Field a = [&] {
    if (space_kind == "uniform") return uniform_a(shape);
    if (space_kind.rfind("file:", 0) == 0) {
      return cfg_guard(prefix + "space_filter", [&] {
        return read_grid(resolve_path(kv.origin(), space_kind.substr(5)));
      });
    }
    throw ConfigError("key '" + prefix + "space_filter': expected uniform or file:PATH, got '" +
                      space_kind + "'");
  }();

  const std::string freq_kind = kv.value_or(prefix + "freq_filter", "uniform");
  Field r = [&] {
    if (freq_kind == "uniform") return Field(shape, 1.0);
    if (freq_kind.rfind("file:", 0) == 0) {
      return cfg_guard(prefix + "freq_filter", [&] {
        return read_grid(resolve_path(kv.origin(), freq_kind.substr(5)));
      });
    }
    if (freq_kind == "parametric") {
      ParametricFilterSpec ps;
      ps.radius = kv.require_double(prefix + "freq.radius");
      ps.outer_gain = kv.require_double(prefix + "freq.outer_gain");
      return cfg_guard(prefix + "freq_filter", [&] { return build_parametric_r(shape, ps); });
    }
    if (freq_kind == "statistical") {
      StatisticalFilterSpec ss;
      ss.alpha = kv.double_or(prefix + "freq.alpha", 5.0);
      const int draws = kv.int_or(prefix + "freq.draws", 200);
      if (draws < 1) throw ConfigError("key '" + prefix + "freq.draws': must be >= 1");
      // Dedicated stream far above any chain index, so filter construction
      // never perturbs the chains' noise.
      Rng rng = Rng::for_chain(seed, 0x8000000000000000ull + index);
      std::vector<Field> samples;
      samples.reserve(static_cast<std::size_t>(draws));
      for (int i = 0; i < draws; ++i) samples.push_back(sample_exact(target, rng));
      return cfg_guard(prefix + "freq_filter", [&] { return build_statistical_r(samples, ss); });
    }
    throw ConfigError("key '" + prefix +
                      "freq_filter': expected uniform, file:PATH, parametric, or statistical, "
                      "got '" +
                      freq_kind + "'");
  }();

  spec.preconditioner = cfg_guard(
      "sampler." + name, [&] { return Preconditioner::make(std::move(a), std::move(r)); });

  const double omega = kv.double_or(prefix + "omega", 0.0);
  if (auto skew = kv.lookup(prefix + "skew")) {
    spec.solenoidal = Solenoidal{parse_skew(*skew, prefix + "skew"), omega};
  } else if (omega != 0.0) {
    throw ConfigError("key '" + prefix + "omega' set but '" + prefix + "skew' is missing");
  }
  return spec;
}

ScheduleSpec parse_schedule(KeyValueConfig& kv) {
  ScheduleSpec spec;
  const std::string kind = kv.value_or("run.schedule", "constant");
  spec.iterations = kv.require_int("run.iterations");
  if (spec.iterations < 1) throw ConfigError("run.iterations must be >= 1");
  if (kind == "constant") {
    spec.eps = kv.require_double("run.eps");
  } else if (kind == "annealed") {
    spec.annealed = true;
    spec.sigmas = kv.require_double_list("run.sigmas");
    spec.eps_base = kv.require_double("run.eps_base");
  } else {
    throw ConfigError("key 'run.schedule': expected constant or annealed, got '" + kind + "'");
  }
  return spec;
}

StepSchedule make_schedule(const ScheduleSpec& spec, const std::optional<double>& eps_override) {
  if (spec.annealed) {
    return StepSchedule::annealed(spec.iterations, spec.sigmas,
                                  eps_override.value_or(spec.eps_base));
  }
  return StepSchedule::constant(spec.iterations, eps_override.value_or(spec.eps));
}

MomentMode resolve_metric_mode(KeyValueConfig& kv, const ScoreTarget& target) {
  const std::string mode = kv.value_or("metric.mode", "auto");
  const bool stationary = std::holds_alternative<GrfTarget>(target);
  if (mode == "spectral" || (mode == "auto" && stationary)) {
    if (!stationary) {
      throw ConfigError("metric.mode = spectral requires a target with a power spectrum");
    }
    return MomentMode::Spectral;
  }
  if (mode != "dense" && mode != "auto") {
    throw ConfigError("key 'metric.mode': expected dense, spectral, or auto, got '" + mode + "'");
  }
  const TargetMoments tm = cfg_guard("metric.mode", [&] { return exact_moments(target); });
  if (!tm.covariance) {
    throw ConfigError("metric.mode = dense: target has no dense covariance at this size");
  }
  return MomentMode::Dense;
}

}  // namespace

ExperimentConfig build_experiment_config(KeyValueConfig& kv) {
  ScoreTarget target = build_target(kv);
  const GridShape shape = target_shape(target);
  const MomentMode mode = resolve_metric_mode(kv, target);
  const ScheduleSpec schedule = parse_schedule(kv);
  const std::uint64_t seed = kv.uint_or("seed", 0);

  const int chains = kv.int_or("chains", 1);
  if (chains < 1) throw ConfigError("chains must be >= 1");
  const int stride = kv.int_or("checkpoint_stride", 0);
  if (stride < 0) throw ConfigError("checkpoint_stride must be >= 0");

  std::vector<SamplerSpec> samplers;
  std::vector<std::string> names = kv.require_list("samplers");
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (names[j] == names[i]) throw ConfigError("duplicate sampler name '" + names[i] + "'");
    }
    samplers.push_back(build_sampler(kv, names[i], target, shape, seed, i));
  }

  std::optional<double> threshold;
  if (auto t = kv.lookup("benchmark.threshold")) {
    threshold = parse_double_value(*t, "benchmark.threshold");
    if (!(*threshold > 0.0)) throw ConfigError("benchmark.threshold must be positive");
  }
  const int max_iterations = kv.int_or("benchmark.max_iterations", 0);
  if (max_iterations < 0) throw ConfigError("benchmark.max_iterations must be >= 1");

  // Every sampler's effective schedule must construct cleanly now, not at run time.
  for (const SamplerSpec& s : samplers) {
    cfg_guard("sampler." + s.name + " schedule", [&] {
      make_schedule(schedule, s.eps_override);
      return 0;
    });
  }

  kv.finish();
  return ExperimentConfig{std::move(target), shape,  mode,      std::move(samplers),
                          schedule,          chains, stride,    seed,
                          threshold,         max_iterations};
}

ExperimentConfig load_experiment_config(const std::string& path) {
  KeyValueConfig kv = KeyValueConfig::parse_file(path);
  return build_experiment_config(kv);
}

namespace {

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw std::runtime_error("failed to write '" + path.string() + "'");
}

SamplerConfig to_sampler_config(const ExperimentConfig& cfg, const SamplerSpec& spec) {
  SamplerConfig sc;
  sc.schedule = make_schedule(cfg.schedule, spec.eps_override);
  sc.preconditioner = spec.preconditioner;
  sc.solenoidal = spec.solenoidal;
  sc.rng_seed = cfg.seed;
  sc.denoise_final = spec.denoise_final;
  sc.checkpoint_stride = cfg.checkpoint_stride;
  return sc;
}

// Checkpoint iterations a run will record: multiples of the stride, with the
// final iteration appended when the stride misses it (or there is no stride).
std::vector<int> checkpoint_plan(int iterations, int stride, bool* extra_final) {
  std::vector<int> iters;
  if (stride > 0) {
    for (int it = stride; it <= iterations; it += stride) iters.push_back(it);
  }
  *extra_final = iters.empty() || iters.back() != iterations;
  if (*extra_final) iters.push_back(iterations);
  return iters;
}

[[noreturn]] void rethrow_named(const std::string& sampler, const DivergenceError& e) {
  throw DivergenceError("sampler '" + sampler + "': " + e.what(), e.iteration());
}

}  // namespace

void run_sample(const ExperimentConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  const MomentSummary ref = reference_moments(cfg.target, cfg.metric_mode);
  const Field exact_mean = exact_moments(cfg.target).mean;
  const auto* grf = std::get_if<GrfTarget>(&cfg.target);

  std::string metrics = "sampler,iteration,w2,spectral_error,mean_err\n";
  std::string timing = "sampler,wall_time_s\n";

  for (const SamplerSpec& spec : cfg.samplers) {
    const SamplerConfig sc = to_sampler_config(cfg, spec);
    bool extra_final = false;
    const std::vector<int> iters =
        checkpoint_plan(sc.schedule.iterations(), cfg.checkpoint_stride, &extra_final);

    std::vector<std::vector<Field>> buckets(iters.size());
    for (auto& b : buckets) b.reserve(static_cast<std::size_t>(cfg.chains));
    double wall = 0.0;
    try {
      run_batch(cfg.target, sc, cfg.chains, [&](int, Trajectory&& tr) {
        for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
          buckets[i].push_back(std::move(tr.snapshots[i]));
        }
        if (extra_final) buckets.back().push_back(std::move(tr.final_state));
        wall += tr.wall_time_s;
      });
    } catch (const DivergenceError& e) {
      rethrow_named(spec.name, e);
    }

    for (std::size_t i = 0; i < iters.size(); ++i) {
      const std::vector<Field>& samples = buckets[i];
      Field mean(cfg.shape, 0.0);
      for (const Field& s : samples) axpy(mean, 1.0, s);
      mean *= 1.0 / static_cast<double>(samples.size());
      Field dmu = mean;
      dmu -= exact_mean;

      std::string w2;
      std::string serr;
      if (samples.size() >= 2) {
        w2 = fmt_double(gaussian_w2(empirical_moments(samples, cfg.metric_mode), ref));
        if (grf != nullptr) serr = fmt_double(spectral_error(samples, *grf));
      }
      metrics += spec.name + "," + std::to_string(iters[i]) + "," + w2 + "," + serr + "," +
                 fmt_double(l2_norm(dmu)) + "\n";
    }

    timing += spec.name + "," + fmt_double(wall) + "\n";
    // Chain 0's final state is the one before the bucket loop moved it only
    // when extra_final is unset; recover it from whichever vector holds it.
    const Field& final0 = buckets.back().front();
    write_grid((fs::path(out_dir) / ("final_" + spec.name + ".pdsgrid")).string(), final0);
  }

  write_text_file(fs::path(out_dir) / "metrics.csv", metrics);
  write_text_file(fs::path(out_dir) / "timing.csv", timing);
}

void run_benchmark(const ExperimentConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  const auto* grf = std::get_if<GrfTarget>(&cfg.target);
  if (grf == nullptr) {
    throw ConfigError("benchmark requires a target with a power spectrum (target.kind = grf)");
  }
  if (!cfg.benchmark_threshold) throw ConfigError("benchmark.threshold is required");
  if (cfg.benchmark_max_iterations < 1) {
    throw ConfigError("benchmark.max_iterations is required and must be >= 1");
  }
  if (cfg.checkpoint_stride < 1) {
    throw ConfigError("benchmark requires checkpoint_stride >= 1 (the scan granularity)");
  }
  if (cfg.schedule.annealed) {
    throw ConfigError("benchmark scans a constant schedule; run.schedule must be constant");
  }
  bool have_vanilla = false;
  for (const SamplerSpec& s : cfg.samplers) have_vanilla |= s.name == "vanilla";
  if (!have_vanilla) {
    throw ConfigError("benchmark requires a sampler named 'vanilla' as the speedup baseline");
  }

  fs::create_directories(out_dir);
  const double threshold = *cfg.benchmark_threshold;
  const Field& exact = grf->power_centered();
  const double exact_norm = l2_norm(exact);
  const double spectrum_scale =
      1.0 / (static_cast<double>(cfg.shape.height) * static_cast<double>(cfg.shape.width));

  bool extra_final = false;
  const std::vector<int> iters =
      checkpoint_plan(cfg.benchmark_max_iterations, cfg.checkpoint_stride, &extra_final);

  std::string curves = "sampler,iteration,spectral_error\n";
  std::vector<std::optional<int>> reached(cfg.samplers.size());

  for (std::size_t si = 0; si < cfg.samplers.size(); ++si) {
    const SamplerSpec& spec = cfg.samplers[si];
    SamplerConfig sc = to_sampler_config(cfg, spec);
    sc.schedule = StepSchedule::constant(cfg.benchmark_max_iterations,
                                         spec.eps_override.value_or(cfg.schedule.eps));

    // Pooled power spectrum per checkpoint, accumulated chain by chain so a
    // long run never holds more than one wave of trajectories.
    std::vector<Field> power_sum(iters.size(), Field(cfg.shape, 0.0));
    const auto accumulate = [&](Field& acc, const Field& x) {
      const SpectralField sh = fft2(x);
      for (std::int64_t i = 0; i < sh.size(); ++i) acc[i] += std::norm(sh[i]) * spectrum_scale;
    };
    try {
      run_batch(cfg.target, sc, cfg.chains, [&](int, Trajectory&& tr) {
        for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
          accumulate(power_sum[i], tr.snapshots[i]);
        }
        if (extra_final) accumulate(power_sum.back(), tr.final_state);
      });
    } catch (const DivergenceError& e) {
      rethrow_named(spec.name, e);
    }

    for (std::size_t i = 0; i < iters.size(); ++i) {
      Field est = fftshift(power_sum[i] * (1.0 / cfg.chains));
      est -= exact;
      const double err = l2_norm(est) / exact_norm;
      curves += spec.name + "," + std::to_string(iters[i]) + "," + fmt_double(err) + "\n";
      if (!reached[si] && err <= threshold) reached[si] = iters[i];
    }
  }

  std::optional<int> vanilla_t;
  for (std::size_t si = 0; si < cfg.samplers.size(); ++si) {
    if (cfg.samplers[si].name == "vanilla") vanilla_t = reached[si];
  }

  std::string summary = "sampler,T_needed,speedup_vs_vanilla\n";
  for (std::size_t si = 0; si < cfg.samplers.size(); ++si) {
    summary += cfg.samplers[si].name + ",";
    if (reached[si]) {
      summary += std::to_string(*reached[si]) + ",";
      if (vanilla_t) {
        summary += fmt_double(static_cast<double>(*vanilla_t) / static_cast<double>(*reached[si]));
      }
    } else {
      summary += "not_reached,";
    }
    summary += "\n";
  }

  write_text_file(fs::path(out_dir) / "curves.csv", curves);
  write_text_file(fs::path(out_dir) / "summary.csv", summary);
}

}  // namespace pds
