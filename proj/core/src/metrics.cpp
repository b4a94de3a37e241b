#include "pds/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pds/spectral.hpp"

namespace pds {

namespace {

constexpr std::size_t kMaxDenseElements = 4096;

GridShape common_shape(const std::vector<Field>& samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("empirical_moments: need at least two samples");
  }
  const GridShape shape = samples.front().shape();
  for (const Field& s : samples) {
    if (!(s.shape() == shape)) {
      throw std::invalid_argument("empirical_moments: samples have mixed shapes");
    }
  }
  return shape;
}

Eigen::VectorXd as_vector(const Field& f) {
  return Eigen::Map<const Eigen::VectorXd>(f.data().data(),
                                           static_cast<Eigen::Index>(f.size()));
}

// Square root of a symmetric PSD matrix via its eigendecomposition. Small
// negative eigenvalues from rounding are clamped to zero; anything clearly
// negative means the input was not a covariance and is rejected.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m, const char* what) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error(std::string("gaussian_w2: eigendecomposition of ") + what +
                             " failed");
  }
  Eigen::VectorXd ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-10 * scale) {
      throw std::runtime_error(std::string("gaussian_w2: ") + what +
                               " is not positive semidefinite");
    }
    ev[i] = std::sqrt(std::max(ev[i], 0.0));
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

MomentSummary empirical_moments(const std::vector<Field>& samples, MomentMode mode) {
  const GridShape shape = common_shape(samples);
  const std::size_t n = shape.size();
  const int count = static_cast<int>(samples.size());

  MomentSummary out;
  out.n_samples = count;
  out.mean = Field(shape, 0.0);
  for (const Field& s : samples) axpy(out.mean, 1.0, s);
  out.mean *= 1.0 / count;

  if (mode == MomentMode::Dense) {
    if (n > kMaxDenseElements) {
      throw std::invalid_argument("empirical_moments: field too large for a dense covariance (" +
                                  std::to_string(n) + " > " +
                                  std::to_string(kMaxDenseElements) + " elements)");
    }
    const Eigen::VectorXd mu = as_vector(out.mean);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                                static_cast<Eigen::Index>(n));
    for (const Field& s : samples) {
      const Eigen::VectorXd d = as_vector(s) - mu;
      cov.noalias() += d * d.transpose();
    }
    cov /= static_cast<double>(count - 1);
    out.covariance = std::move(cov);
    return out;
  }

  // Mean power spectrum, normalized so white noise maps to the all-ones field.
  Field power(shape, 0.0);
  for (const Field& s : samples) {
    const SpectralField sh = fft2(s);
    for (std::int64_t i = 0; i < sh.size(); ++i) power[i] += std::norm(sh[i]);
  }
  const double scale = 1.0 / (static_cast<double>(count) *
                              static_cast<double>(shape.height) *
                              static_cast<double>(shape.width));
  power *= scale;
  out.spectrum_centered = fftshift(power);
  return out;
}

MomentSummary reference_moments(const ScoreTarget& target, MomentMode mode) {
  const TargetMoments tm = exact_moments(target);
  MomentSummary out;
  out.mean = tm.mean;
  out.n_samples = 0;
  if (mode == MomentMode::Dense) {
    if (!tm.covariance) {
      throw std::invalid_argument("reference_moments: target has no dense covariance");
    }
    out.covariance = tm.covariance;
  } else {
    if (!tm.spectrum_centered) {
      throw std::invalid_argument("reference_moments: target has no power spectrum");
    }
    out.spectrum_centered = tm.spectrum_centered;
  }
  return out;
}

double gaussian_w2(const Eigen::VectorXd& mean_a, const Eigen::MatrixXd& cov_a,
                   const Eigen::VectorXd& mean_b, const Eigen::MatrixXd& cov_b) {
  if (mean_a.size() != mean_b.size() || cov_a.rows() != cov_a.cols() ||
      cov_b.rows() != cov_b.cols() || cov_a.rows() != mean_a.size() ||
      cov_b.rows() != mean_b.size()) {
    throw std::invalid_argument("gaussian_w2: dimension mismatch");
  }
  const Eigen::MatrixXd root_b = psd_sqrt(cov_b, "second covariance");
  const Eigen::MatrixXd inner = psd_sqrt(root_b * cov_a * root_b, "coupling product");
  const double mean_term = (mean_a - mean_b).squaredNorm();
  const double trace_term = cov_a.trace() + cov_b.trace() - 2.0 * inner.trace();
  // trace_term is >= 0 in exact arithmetic; rounding can push it slightly under.
  return std::sqrt(std::max(mean_term + trace_term, 0.0));
}

double gaussian_w2(const MomentSummary& a, const MomentSummary& b) {
  if (!(a.mean.shape() == b.mean.shape())) {
    throw std::invalid_argument("gaussian_w2: summaries have different shapes");
  }
  if (a.covariance && b.covariance) {
    return gaussian_w2(as_vector(a.mean), *a.covariance, as_vector(b.mean), *b.covariance);
  }
  if (a.spectrum_centered && b.spectrum_centered) {
    const Field& pa = *a.spectrum_centered;
    const Field& pb = *b.spectrum_centered;
    if (!(pa.shape() == a.mean.shape()) || !(pa.shape() == pb.shape())) {
      throw std::invalid_argument("gaussian_w2: spectrum shape mismatch");
    }
    double trace_term = 0.0;
    for (std::int64_t i = 0; i < pa.size(); ++i) {
      if (pa[i] < 0.0 || pb[i] < 0.0) {
        throw std::runtime_error("gaussian_w2: negative power spectrum entry");
      }
      const double d = std::sqrt(pa[i]) - std::sqrt(pb[i]);
      trace_term += d * d;
    }
    Field dmu = a.mean;
    dmu -= b.mean;
    const double mean_term = dot(dmu, dmu);
    return std::sqrt(mean_term + trace_term);
  }
  throw std::invalid_argument(
      "gaussian_w2: summaries must both be dense or both be spectral");
}

double condition_number(const ScoreTarget& target) {
  if (const auto* g = std::get_if<GaussianTarget>(&target)) {
    const TargetMoments tm = g->moments();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(*tm.covariance);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("condition_number: eigendecomposition failed");
    }
    return es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
  }
  if (const auto* g = std::get_if<GrfTarget>(&target)) {
    const Field& p = g->power_centered();
    double lo = p[0];
    double hi = p[0];
    for (std::int64_t i = 1; i < p.size(); ++i) {
      lo = std::min(lo, p[i]);
      hi = std::max(hi, p[i]);
    }
    return hi / lo;
  }
  throw std::invalid_argument("condition_number: target has no single covariance");
}

double spectral_error(const std::vector<Field>& samples, const GrfTarget& target) {
  const GridShape shape = common_shape(samples);
  if (!(shape == target.shape())) {
    throw std::invalid_argument("spectral_error: sample shape does not match target");
  }
  const MomentSummary emp = empirical_moments(samples, MomentMode::Spectral);
  const Field& est = *emp.spectrum_centered;
  const Field& exact = target.power_centered();
  Field diff = est;
  diff -= exact;
  return l2_norm(diff) / l2_norm(exact);
}

}  // namespace pds
