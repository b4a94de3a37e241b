#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "pds/grid.hpp"
#include "pds/targets.hpp"

namespace pds {

// How a sample set is summarized: Dense keeps the full empirical covariance
// (only viable for small fields), Spectral keeps a mean power spectrum
// (centered layout), which is the natural summary for stationary targets.
enum class MomentMode { Dense, Spectral };

struct MomentSummary {
  Field mean{GridShape{1, 1, 1}, 0.0};
  std::optional<Eigen::MatrixXd> covariance;   // Dense mode
  std::optional<Field> spectrum_centered;      // Spectral mode
  int n_samples = 0;
};

// Sample mean plus either the unbiased dense covariance or the mean power
// spectrum |F[x]|^2 / (H*W), depending on mode. Requires at least two
// samples of identical shape; Dense mode is limited to 4096 elements.
MomentSummary empirical_moments(const std::vector<Field>& samples, MomentMode mode);

// Reference moments of a target in the same container, for comparison.
MomentSummary reference_moments(const ScoreTarget& target, MomentMode mode);

// 2-Wasserstein distance between the Gaussians matching two summaries.
// Dense pair: Bures metric sqrt(|dmu|^2 + tr(S1 + S2 - 2 (S2^1/2 S1 S2^1/2)^1/2)).
// Spectral pair: sqrt(|dmu|^2 + sum_k (sqrt(P1_k) - sqrt(P2_k))^2), the same
// quantity evaluated in the basis where both covariances are diagonal.
// Mixing a dense summary with a spectral one is an error.
double gaussian_w2(const MomentSummary& a, const MomentSummary& b);

// Low-level dense form on explicit moments.
double gaussian_w2(const Eigen::VectorXd& mean_a, const Eigen::MatrixXd& cov_a,
                   const Eigen::VectorXd& mean_b, const Eigen::MatrixXd& cov_b);

// Ratio of extreme covariance eigenvalues: Gaussian targets use the dense
// spectrum, stationary ones the power spectrum. Mixtures have no single
// covariance, so they are rejected.
double condition_number(const ScoreTarget& target);

// Relative L2 error between the pooled empirical power spectrum of `samples`
// and the target's exact spectrum, both in centered layout.
double spectral_error(const std::vector<Field>& samples, const GrfTarget& target);

}  // namespace pds
