#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pds/grid.hpp"
#include "pds/precondition.hpp"
#include "pds/rng.hpp"
#include "pds/targets.hpp"

namespace pds {

// Per-iteration step sizes. Constant: ε_t = ε. Annealed: a strictly decreasing
// noise ladder σ_1 > … > σ_L > 0 with ε_t = ε_base·σ_level(t)²/σ_L² and the T
// iterations split evenly across levels (earlier levels absorb the remainder).
class StepSchedule {
 public:
  static StepSchedule constant(int iterations, double eps);
  static StepSchedule annealed(int iterations, std::vector<double> sigmas, double eps_base);

  int iterations() const { return iterations_; }
  double eps_at(int t) const;

 private:
  StepSchedule() = default;
  int iterations_ = 0;
  double eps_ = 0.0;                // constant mode
  std::vector<double> eps_levels_;  // annealed mode: per-level ε
};

// ω-scaled skew term added to the preconditioned score drift.
struct Solenoidal {
  SkewOperator op;
  double omega = 0.0;
};

struct SamplerConfig {
  StepSchedule schedule = StepSchedule::constant(0, 1.0);
  std::optional<Preconditioner> preconditioner;  // absent = vanilla dynamics
  std::optional<Solenoidal> solenoidal;
  std::uint64_t rng_seed = 0;
  bool denoise_final = false;   // omit the noise on the last update
  int checkpoint_stride = 0;    // 0 = keep no snapshots
  // Comparison mode: push the whole drift x + (ε²/2)·score through the
  // inverse/transpose composition instead of the score increment alone. This
  // moves the fixed point even for an identity target and exists only to make
  // that deviation measurable; the default preconditions the score increment.
  bool precondition_full_drift = false;
};

struct Trajectory {
  std::vector<int> checkpoint_iterations;  // strictly increasing, 1-based
  std::vector<Field> snapshots;            // states at those iterations
  Field final_state;
  int iterations_run = 0;
  double wall_time_s = 0.0;
};

// The chain blew past the divergence guard (‖x‖∞ > 1e6) or produced a
// non-finite score; carries the sampler step index that tripped.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_ = 0;
};

// One update of the discrete Langevin chain: x + (ε²/2)·score + ε·noise.
Field langevin_update(const Field& x, const Field& score, double eps, const Field& noise);

// One preconditioned update:
//   x + (ε²/2)·[M⁻¹M⁻ᵀ·score + ω·S·score] + ε·M⁻¹·noise.
// p == nullptr means identity M; sol == nullptr (or ω == 0) drops the skew
// term. With both absent this reduces to langevin_update bit for bit.
Field pds_update(const Field& x, const Field& score, double eps, const Preconditioner* p,
                 const Solenoidal* sol, const Field& noise, bool precondition_full_drift = false);

// Single steps that evaluate the target's score and draw the noise themselves.
Field vanilla_step(const Field& x, const ScoreTarget& target, double eps, Rng& rng);
Field pds_step(const Field& x, const ScoreTarget& target, double eps, const Preconditioner* p,
               const Solenoidal* sol, Rng& rng, bool precondition_full_drift = false);

// Run one chain (chain index 0 of the seed's family). x0 defaults to a
// standard Gaussian draw from the chain's own stream.
Trajectory run(const ScoreTarget& target, const SamplerConfig& config,
               const std::optional<Field>& x0 = std::nullopt);

// Run `chains` independent chains with per-chain substreams of config.rng_seed.
// Chains may execute in parallel (bounded by PDS_THREADS when set), but the
// result of chain i depends only on (seed, i), and the sink overload delivers
// trajectories strictly in chain order — so output never depends on
// interleaving or thread count.
std::vector<Trajectory> run_batch(const ScoreTarget& target, const SamplerConfig& config,
                                  int chains);
void run_batch(const ScoreTarget& target, const SamplerConfig& config, int chains,
               const std::function<void(int chain, Trajectory&&)>& sink);

}  // namespace pds
