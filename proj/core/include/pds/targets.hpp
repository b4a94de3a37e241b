#pragma once

#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "pds/grid.hpp"
#include "pds/rng.hpp"

namespace pds {

// Closed-form mean and covariance of a target: dense over the flattened grid
// where tractable, and/or a per-frequency power spectrum (centered layout)
// when the covariance is diagonal in the DFT basis.
struct TargetMoments {
  Field mean;
  std::optional<Eigen::MatrixXd> covariance;
  std::optional<Field> spectrum_centered;
};

// N(μ, Σ) over the flattened n = C·H·W grid, dense Σ, n ≤ 1024. Caches the
// Cholesky factor (for exact draws) and Σ⁻¹ (for the score).
class GaussianTarget {
 public:
  static GaussianTarget make(Field mean, Eigen::MatrixXd covariance);
  static GaussianTarget standard(const GridShape& shape);
  static GaussianTarget isotropic(Field mean, double variance);

  const GridShape& shape() const { return mean_.shape(); }
  const Field& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return cov_; }
  const Eigen::MatrixXd& precision() const { return precision_; }
  const Eigen::MatrixXd& chol_lower() const { return chol_lower_; }

  Field score(const Field& x) const;
  double log_density(const Field& x) const;
  Field sample(Rng& rng) const;
  TargetMoments moments() const;

 private:
  Field mean_;
  Eigen::MatrixXd cov_, precision_, chol_lower_;
};

// Zero-mean Gaussian random field: covariance diagonal in the DFT basis with
// per-frequency power P (centered layout, strictly positive, symmetric under
// frequency reversal so draws are real). Score and exact draws cost O(n log n),
// and the covariance condition number is exactly max(P)/min(P).
class GrfTarget {
 public:
  static GrfTarget make(Field power_centered);
  // P(h,w) = 1 / (1 + falloff·d²)^exponent with d the distance to the
  // spectrum center — a natural-image-like decaying spectrum.
  static GrfTarget radial_power(const GridShape& shape, double falloff, double exponent);

  const GridShape& shape() const { return power_centered_.shape(); }
  const Field& power_centered() const { return power_centered_; }
  const Field& power() const { return power_; }  // unshifted layout

  Field score(const Field& x) const;
  double log_density(const Field& x) const;
  Field sample(Rng& rng) const;
  TargetMoments moments() const;

 private:
  Field power_centered_, power_, inv_power_, sqrt_power_;
};

// Equal-shape isotropic Gaussian mixture: Σᵢ wᵢ N(μᵢ, σᵢ² I). Score and
// density use log-sum-exp over component responsibilities.
class MixtureTarget {
 public:
  static MixtureTarget make(std::vector<double> weights, std::vector<Field> means,
                            std::vector<double> variances);

  const GridShape& shape() const { return means_.front().shape(); }
  int components() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Field>& means() const { return means_; }
  const std::vector<double>& variances() const { return variances_; }

  Field score(const Field& x) const;
  double log_density(const Field& x) const;
  Field sample(Rng& rng) const;
  TargetMoments moments() const;

 private:
  std::vector<double> weights_;
  std::vector<Field> means_;
  std::vector<double> variances_;
};

using ScoreTarget = std::variant<GaussianTarget, GrfTarget, MixtureTarget>;

GridShape target_shape(const ScoreTarget& t);
Field score(const ScoreTarget& t, const Field& x);
double log_density(const ScoreTarget& t, const Field& x);
Field sample_exact(const ScoreTarget& t, Rng& rng);
TargetMoments exact_moments(const ScoreTarget& t);

}  // namespace pds
