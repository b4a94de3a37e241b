#include "pds/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <thread>

namespace pds {

StepSchedule StepSchedule::constant(int iterations, double eps) {
  if (iterations < 0) throw std::invalid_argument("StepSchedule: iterations must be >= 0");
  if (!(eps > 0.0)) throw std::invalid_argument("StepSchedule: eps must be positive");
  StepSchedule s;
  s.iterations_ = iterations;
  s.eps_ = eps;
  return s;
}

StepSchedule StepSchedule::annealed(int iterations, std::vector<double> sigmas,
                                    double eps_base) {
  if (iterations < 0) throw std::invalid_argument("StepSchedule: iterations must be >= 0");
  if (!(eps_base > 0.0)) throw std::invalid_argument("StepSchedule: eps_base must be positive");
  if (sigmas.empty()) throw std::invalid_argument("StepSchedule: sigma ladder is empty");
  for (std::size_t i = 0; i < sigmas.size(); ++i) {
    if (!(sigmas[i] > 0.0)) throw std::invalid_argument("StepSchedule: sigmas must be positive");
    if (i > 0 && !(sigmas[i] < sigmas[i - 1])) {
      throw std::invalid_argument("StepSchedule: sigma ladder must be strictly decreasing");
    }
  }
  StepSchedule s;
  s.iterations_ = iterations;
  const double sigma_last_sq = sigmas.back() * sigmas.back();
  s.eps_levels_.reserve(sigmas.size());
  for (double sigma : sigmas) {
    s.eps_levels_.push_back(eps_base * sigma * sigma / sigma_last_sq);
  }
  return s;
}

double StepSchedule::eps_at(int t) const {
  if (t < 0 || t >= iterations_) {
    throw std::out_of_range("StepSchedule: step index " + std::to_string(t) +
                            " outside [0, " + std::to_string(iterations_) + ")");
  }
  if (eps_levels_.empty()) return eps_;
  // Iterations split evenly across levels, earlier levels taking the remainder.
  const int levels = static_cast<int>(eps_levels_.size());
  const int base = iterations_ / levels;
  const int rem = iterations_ % levels;
  int level;
  if (t < rem * (base + 1)) {
    level = t / (base + 1);
  } else {
    level = rem + (t - rem * (base + 1)) / base;
  }
  return eps_levels_[std::min(level, levels - 1)];
}

Field langevin_update(const Field& x, const Field& score, double eps, const Field& noise) {
  Field out = x;
  axpy(out, 0.5 * eps * eps, score);
  axpy(out, eps, noise);
  return out;
}

Field pds_update(const Field& x, const Field& score, double eps, const Preconditioner* p,
                 const Solenoidal* sol, const Field& noise, bool precondition_full_drift) {
  const double h = 0.5 * eps * eps;
  const bool skew_active = sol != nullptr && sol->omega != 0.0;
  const Field shaped_noise = p != nullptr ? apply_m_inverse(*p, noise) : noise;

  if (precondition_full_drift) {
    Field d = x;
    axpy(d, h, score);
    Field out = p != nullptr ? apply_drift_precondition(*p, d) : std::move(d);
    if (skew_active) {
      const Field sv = apply_skew(sol->op, score);
      axpy(out, h * sol->omega, sv);
    }
    axpy(out, eps, shaped_noise);
    return out;
  }

  Field incr = p != nullptr ? apply_drift_precondition(*p, score) : score;
  if (skew_active) {
    const Field sv = apply_skew(sol->op, score);
    axpy(incr, sol->omega, sv);
  }
  Field out = x;
  axpy(out, h, incr);
  axpy(out, eps, shaped_noise);
  return out;
}

namespace {

Field checked_score(const ScoreTarget& target, const Field& x) {
  Field s = score(target, x);
  if (!all_finite(s)) throw DivergenceError("non-finite score", 0);
  return s;
}

}  // namespace

Field vanilla_step(const Field& x, const ScoreTarget& target, double eps, Rng& rng) {
  const Field s = checked_score(target, x);
  const Field z = rng.normal_field(x.shape());
  return langevin_update(x, s, eps, z);
}

Field pds_step(const Field& x, const ScoreTarget& target, double eps, const Preconditioner* p,
               const Solenoidal* sol, Rng& rng, bool precondition_full_drift) {
  const Field s = checked_score(target, x);
  const Field z = rng.normal_field(x.shape());
  return pds_update(x, s, eps, p, sol, z, precondition_full_drift);
}

namespace {

Trajectory run_one(const ScoreTarget& target, const SamplerConfig& config,
                   std::uint64_t chain_index, const std::optional<Field>& x0) {
  const GridShape shape = target_shape(target);
  if (x0 && !(x0->shape() == shape)) {
    throw std::invalid_argument("run: x0 shape " + to_string(x0->shape()) +
                                " does not match target " + to_string(shape));
  }
  if (config.solenoidal && !(config.solenoidal->omega >= 0.0)) {
    throw std::invalid_argument("run: solenoidal omega must be >= 0");
  }

  Rng rng = Rng::for_chain(config.rng_seed, chain_index);
  Field x = x0 ? *x0 : rng.normal_field(shape);

  const Preconditioner* p = config.preconditioner ? &*config.preconditioner : nullptr;
  const Solenoidal* sol = config.solenoidal ? &*config.solenoidal : nullptr;
  const int total = config.schedule.iterations();

  Trajectory traj;
  const auto t0 = std::chrono::steady_clock::now();
  for (int t = 0; t < total; ++t) {
    const double eps = config.schedule.eps_at(t);
    Field s = score(target, x);
    if (!all_finite(s)) {
      throw DivergenceError("non-finite score at iteration " + std::to_string(t + 1), t + 1);
    }
    if (config.denoise_final && t == total - 1) {
      const Field zero(shape, 0.0);
      x = pds_update(x, s, eps, p, sol, zero, config.precondition_full_drift);
    } else {
      const Field z = rng.normal_field(shape);
      x = pds_update(x, s, eps, p, sol, z, config.precondition_full_drift);
    }
    if (max_abs(x) > 1e6) {
      throw DivergenceError("divergence guard tripped (sup-norm above 1e6) at iteration " +
                                std::to_string(t + 1),
                            t + 1);
    }
    if (config.checkpoint_stride > 0 && (t + 1) % config.checkpoint_stride == 0) {
      traj.checkpoint_iterations.push_back(t + 1);
      traj.snapshots.push_back(x);
    }
  }
  traj.final_state = std::move(x);
  traj.iterations_run = total;
  traj.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return traj;
}

int thread_budget() {
  if (const char* env = std::getenv("PDS_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) {
      return static_cast<int>(std::min<long>(v, 64));
    }
    // 0, empty, or garbage: fall through to the default.
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(std::min(hc, 16u));
}

}  // namespace

Trajectory run(const ScoreTarget& target, const SamplerConfig& config,
               const std::optional<Field>& x0) {
  return run_one(target, config, 0, x0);
}

void run_batch(const ScoreTarget& target, const SamplerConfig& config, int chains,
               const std::function<void(int chain, Trajectory&&)>& sink) {
  if (chains < 1) throw std::invalid_argument("run_batch: chains must be >= 1");
  const int threads = std::min(thread_budget(), chains);

  if (threads <= 1) {
    for (int i = 0; i < chains; ++i) sink(i, run_one(target, config, i, std::nullopt));
    return;
  }

  // Wave = one chain per worker; results are delivered to the sink in chain
  // order after each wave, so output order never depends on scheduling.
  for (int start = 0; start < chains; start += threads) {
    const int count = std::min(threads, chains - start);
    std::vector<std::optional<Trajectory>> results(count);
    std::vector<std::exception_ptr> errors(count);
    std::vector<std::thread> workers;
    workers.reserve(count);
    for (int k = 0; k < count; ++k) {
      workers.emplace_back([&, k, start] {
        try {
          results[k] = run_one(target, config, start + k, std::nullopt);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
    for (int k = 0; k < count; ++k) {
      if (errors[k]) std::rethrow_exception(errors[k]);
      sink(start + k, std::move(*results[k]));
    }
  }
}

std::vector<Trajectory> run_batch(const ScoreTarget& target, const SamplerConfig& config,
                                  int chains) {
  std::vector<Trajectory> out;
  out.reserve(static_cast<std::size_t>(chains));
  run_batch(target, config, chains,
            [&](int, Trajectory&& t) { out.push_back(std::move(t)); });
  return out;
}

}  // namespace pds
