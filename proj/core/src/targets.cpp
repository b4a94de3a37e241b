#include "pds/targets.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "pds/spectral.hpp"

namespace pds {

namespace {

constexpr int kMaxDenseDim = 1024;

void require_shape(const GridShape& want, const Field& x, const char* who) {
  if (!(want == x.shape())) {
    throw std::invalid_argument(std::string(who) + ": field shape " + to_string(x.shape()) +
                                " does not match target " + to_string(want));
  }
}

Eigen::Map<const Eigen::VectorXd> as_vector(const Field& x) {
  return {x.data().data(), static_cast<Eigen::Index>(x.size())};
}

}  // namespace

GaussianTarget GaussianTarget::make(Field mean, Eigen::MatrixXd covariance) {
  const std::int64_t n = mean.size();
  if (n > kMaxDenseDim) {
    throw std::invalid_argument("GaussianTarget: dense covariance limited to n <= " +
                                std::to_string(kMaxDenseDim) + ", got n = " + std::to_string(n));
  }
  if (covariance.rows() != n || covariance.cols() != n) {
    throw std::invalid_argument("GaussianTarget: covariance must be " + std::to_string(n) + "x" +
                                std::to_string(n));
  }
  const double asym = (covariance - covariance.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, covariance.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("GaussianTarget: covariance is not symmetric (defect " +
                                std::to_string(asym) + ")");
  }

  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("GaussianTarget: covariance is not positive-definite");
  }

  GaussianTarget t;
  t.mean_ = std::move(mean);
  t.cov_ = std::move(covariance);
  t.precision_ = llt.solve(Eigen::MatrixXd::Identity(n, n));
  t.chol_lower_ = llt.matrixL();
  return t;
}

GaussianTarget GaussianTarget::standard(const GridShape& shape) {
  return isotropic(Field(shape, 0.0), 1.0);
}

GaussianTarget GaussianTarget::isotropic(Field mean, double variance) {
  if (!(variance > 0.0)) {
    throw std::invalid_argument("GaussianTarget: variance must be positive");
  }
  const auto n = static_cast<Eigen::Index>(mean.size());
  return make(std::move(mean), variance * Eigen::MatrixXd::Identity(n, n));
}

Field GaussianTarget::score(const Field& x) const {
  require_shape(shape(), x, "GaussianTarget::score");
  Field out(shape());
  Eigen::Map<Eigen::VectorXd>(out.data().data(), out.size()) =
      -(precision_ * (as_vector(x) - as_vector(mean_)));
  return out;
}

double GaussianTarget::log_density(const Field& x) const {
  require_shape(shape(), x, "GaussianTarget::log_density");
  const Eigen::VectorXd d = as_vector(x) - as_vector(mean_);
  return -0.5 * d.dot(precision_ * d);
}

Field GaussianTarget::sample(Rng& rng) const {
  Field z = rng.normal_field(shape());
  Field out(shape());
  Eigen::Map<Eigen::VectorXd>(out.data().data(), out.size()) =
      as_vector(mean_) + chol_lower_ * as_vector(z);
  return out;
}

TargetMoments GaussianTarget::moments() const { return {mean_, cov_, std::nullopt}; }

GrfTarget GrfTarget::make(Field power_centered) {
  for (std::int64_t i = 0; i < power_centered.size(); ++i) {
    if (!(power_centered[i] > 1e-12)) {
      throw std::invalid_argument("GrfTarget: power spectrum must be strictly positive, entry " +
                                  std::to_string(i) + " is " + std::to_string(power_centered[i]));
    }
  }
  Field power = ifftshift(power_centered);
  const GridShape s = power.shape();
  for (int c = 0; c < s.channels; ++c) {
    for (int h = 0; h < s.height; ++h) {
      const int rh = h == 0 ? 0 : s.height - h;
      for (int w = 0; w < s.width; ++w) {
        const double a = power.at(c, h, w);
        const double b = power.at(c, rh, w == 0 ? 0 : s.width - w);
        if (std::abs(a - b) > 1e-9 * std::max({a, b, 1.0})) {
          throw std::invalid_argument(
              "GrfTarget: power spectrum must be symmetric under frequency reversal "
              "(draws would not be real-valued); mismatch at (c=" + std::to_string(c) +
              ", h=" + std::to_string(h) + ", w=" + std::to_string(w) + ")");
        }
      }
    }
  }

  GrfTarget t;
  t.inv_power_ = Field(s);
  t.sqrt_power_ = Field(s);
  for (std::int64_t i = 0; i < power.size(); ++i) {
    t.inv_power_[i] = 1.0 / power[i];
    t.sqrt_power_[i] = std::sqrt(power[i]);
  }
  t.power_centered_ = std::move(power_centered);
  t.power_ = std::move(power);
  return t;
}

GrfTarget GrfTarget::radial_power(const GridShape& shape, double falloff, double exponent) {
  if (!shape.valid()) {
    throw std::invalid_argument("GrfTarget::radial_power: invalid shape " + to_string(shape));
  }
  if (!(falloff > 0.0) || !(exponent > 0.0)) {
    throw std::invalid_argument("GrfTarget::radial_power: falloff and exponent must be positive");
  }
  Field p(shape);
  const int ch = shape.height / 2;
  const int cw = shape.width / 2;
  for (int c = 0; c < shape.channels; ++c) {
    for (int h = 0; h < shape.height; ++h) {
      for (int w = 0; w < shape.width; ++w) {
        const double d2 = static_cast<double>((h - ch) * (h - ch) + (w - cw) * (w - cw));
        p.at(c, h, w) = 1.0 / std::pow(1.0 + falloff * d2, exponent);
      }
    }
  }
  return make(std::move(p));
}

// With the unnormalized-forward / (1/HW)-inverse DFT convention, the target
// covariance operator is Σ = F⁻¹ diag(P) F (real, symmetric, positive-definite
// when P is positive and reversal-symmetric). Everything below follows from
// that single definition.

Field GrfTarget::score(const Field& x) const {
  require_shape(shape(), x, "GrfTarget::score");
  // −Σ⁻¹x = −F⁻¹[F[x]/P]; the result is already real up to rounding.
  Field out = ifft2_real(elementwise_mul(fft2(x), inv_power_));
  out *= -1.0;
  return out;
}

double GrfTarget::log_density(const Field& x) const {
  require_shape(shape(), x, "GrfTarget::log_density");
  const SpectralField s = fft2(x);
  double acc = 0.0;
  for (std::int64_t i = 0; i < s.size(); ++i) acc += std::norm(s[i]) * inv_power_[i];
  return -0.5 * acc / (static_cast<double>(shape().height) * shape().width);
}

Field GrfTarget::sample(Rng& rng) const {
  // Re[F⁻¹[√P ⊙ F[z]]] with z iid N(0,1): the map is the real symmetric
  // square root of Σ, so the draw has covariance exactly Σ.
  const Field z = rng.normal_field(shape());
  return ifft2_real(elementwise_mul(fft2(z), sqrt_power_));
}

TargetMoments GrfTarget::moments() const {
  TargetMoments m{Field(shape(), 0.0), std::nullopt, power_centered_};
  const std::int64_t n = shape().size();
  if (n <= kMaxDenseDim) {
    // Materialize Σ column by column through the spectral form.
    Eigen::MatrixXd cov(n, n);
    for (std::int64_t j = 0; j < n; ++j) {
      Field e(shape(), 0.0);
      e[j] = 1.0;
      const Field col = ifft2_real(elementwise_mul(fft2(e), power_));
      cov.col(j) = as_vector(col);
    }
    cov = 0.5 * (cov + cov.transpose().eval());
    m.covariance = std::move(cov);
  }
  return m;
}

MixtureTarget MixtureTarget::make(std::vector<double> weights, std::vector<Field> means,
                                  std::vector<double> variances) {
  if (weights.empty() || weights.size() != means.size() || weights.size() != variances.size()) {
    throw std::invalid_argument("MixtureTarget: weights/means/variances must be non-empty and "
                                "equally sized");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("MixtureTarget: weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("MixtureTarget: weights must sum to 1, got " +
                                std::to_string(total));
  }
  for (double v : variances) {
    if (!(v > 0.0)) throw std::invalid_argument("MixtureTarget: variances must be positive");
  }
  const GridShape shape = means.front().shape();
  for (const Field& mu : means) {
    if (!(mu.shape() == shape)) {
      throw std::invalid_argument("MixtureTarget: component means disagree on shape");
    }
  }

  MixtureTarget t;
  t.weights_ = std::move(weights);
  t.means_ = std::move(means);
  t.variances_ = std::move(variances);
  return t;
}

// Component log-likelihoods drop the shared (2π)^(−n/2) factor; densities are
// only ever needed up to a constant and relative responsibilities are exact.
Field MixtureTarget::score(const Field& x) const {
  require_shape(shape(), x, "MixtureTarget::score");
  const int k = components();
  const double n = static_cast<double>(x.size());

  std::vector<double> loglik(k);
  double lmax = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < k; ++i) {
    Field d = x;
    d -= means_[i];
    loglik[i] = (weights_[i] > 0.0 ? std::log(weights_[i])
                                   : -std::numeric_limits<double>::infinity()) -
                0.5 * n * std::log(variances_[i]) - 0.5 * dot(d, d) / variances_[i];
    lmax = std::max(lmax, loglik[i]);
  }
  double z = 0.0;
  for (int i = 0; i < k; ++i) z += std::exp(loglik[i] - lmax);

  Field out(shape(), 0.0);
  for (int i = 0; i < k; ++i) {
    const double resp = std::exp(loglik[i] - lmax) / z;
    if (resp == 0.0) continue;
    Field pull = means_[i];
    pull -= x;
    axpy(out, resp / variances_[i], pull);
  }
  return out;
}

double MixtureTarget::log_density(const Field& x) const {
  require_shape(shape(), x, "MixtureTarget::log_density");
  const int k = components();
  const double n = static_cast<double>(x.size());
  double lmax = -std::numeric_limits<double>::infinity();
  std::vector<double> loglik(k);
  for (int i = 0; i < k; ++i) {
    Field d = x;
    d -= means_[i];
    loglik[i] = (weights_[i] > 0.0 ? std::log(weights_[i])
                                   : -std::numeric_limits<double>::infinity()) -
                0.5 * n * std::log(variances_[i]) - 0.5 * dot(d, d) / variances_[i];
    lmax = std::max(lmax, loglik[i]);
  }
  double z = 0.0;
  for (int i = 0; i < k; ++i) z += std::exp(loglik[i] - lmax);
  return lmax + std::log(z);
}

Field MixtureTarget::sample(Rng& rng) const {
  const double u = rng.uniform01();
  double cdf = 0.0;
  int pick = components() - 1;
  for (int i = 0; i < components(); ++i) {
    cdf += weights_[i];
    if (u < cdf) {
      pick = i;
      break;
    }
  }
  Field z = rng.normal_field(shape());
  z *= std::sqrt(variances_[pick]);
  z += means_[pick];
  return z;
}

TargetMoments MixtureTarget::moments() const {
  const std::int64_t n = shape().size();
  Field mean(shape(), 0.0);
  for (int i = 0; i < components(); ++i) axpy(mean, weights_[i], means_[i]);

  TargetMoments out{mean, std::nullopt, std::nullopt};
  if (n <= kMaxDenseDim) {
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < components(); ++i) {
      const auto mu = as_vector(means_[i]);
      cov += weights_[i] *
             (variances_[i] * Eigen::MatrixXd::Identity(n, n) + mu * mu.transpose());
    }
    const auto m = as_vector(mean);
    cov -= m * m.transpose();
    out.covariance = std::move(cov);
  }
  return out;
}

GridShape target_shape(const ScoreTarget& t) {
  return std::visit([](const auto& v) { return v.shape(); }, t);
}

Field score(const ScoreTarget& t, const Field& x) {
  return std::visit([&](const auto& v) { return v.score(x); }, t);
}

double log_density(const ScoreTarget& t, const Field& x) {
  return std::visit([&](const auto& v) { return v.log_density(x); }, t);
}

Field sample_exact(const ScoreTarget& t, Rng& rng) {
  return std::visit([&](const auto& v) { return v.sample(rng); }, t);
}

TargetMoments exact_moments(const ScoreTarget& t) {
  return std::visit([](const auto& v) { return v.moments(); }, t);
}

}  // namespace pds
