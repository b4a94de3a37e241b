#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "pds/grid.hpp"
#include "pds/rng.hpp"
#include "pds/spectral.hpp"
#include "pds/targets.hpp"
#include "test_support.hpp"

using pds::Field;
using pds::GaussianTarget;
using pds::GridShape;
using pds::GrfTarget;
using pds::MixtureTarget;
using pds::ScoreTarget;

namespace {

// Central finite difference of the log density along 20 random coordinates,
// compared to the analytic score.
void check_score_against_density(const ScoreTarget& target, pds::Rng& rng) {
  const GridShape shape = pds::target_shape(target);
  const double h = 1e-5;
  for (int trial = 0; trial < 2; ++trial) {
    const Field x = rng.normal_field(shape);
    const Field s = pds::score(target, x);
    for (int k = 0; k < 20; ++k) {
      const std::int64_t i =
          static_cast<std::int64_t>(rng.uniform01() * static_cast<double>(x.size()));
      Field hi = x;
      Field lo = x;
      hi[i] += h;
      lo[i] -= h;
      const double fd =
          (pds::log_density(target, hi) - pds::log_density(target, lo)) /
          (2.0 * h);
      CHECK(std::abs(fd - s[i]) <= 1e-4 * std::max(1.0, std::abs(s[i])));
    }
  }
}

}  // namespace

TEST_CASE("gaussian score vanishes at the mean and is -x for the standard target") {
  const GridShape shape{1, 2, 2};
  pds::Rng rng(61);
  Field mu = rng.normal_field(shape);
  const GaussianTarget g =
      GaussianTarget::make(mu, pdstest::random_spd(4, 0.5, 2.0, 7));
  const Field at_mean = g.score(mu);
  CHECK(pds::max_abs(at_mean) < 1e-12);

  const GaussianTarget std_g = GaussianTarget::standard(shape);
  const Field x = rng.normal_field(shape);
  const Field s = std_g.score(x);
  for (std::int64_t i = 0; i < x.size(); ++i) {
    CHECK(s[i] == doctest::Approx(-x[i]).epsilon(1e-12));
  }
}

TEST_CASE("scores are the gradient of the log density") {
  pds::Rng rng(62);

  const GridShape small{1, 2, 2};
  const ScoreTarget gaussian = GaussianTarget::make(
      rng.normal_field(small), pdstest::random_spd(4, 0.4, 1.5, 11));
  check_score_against_density(gaussian, rng);

  const ScoreTarget grf = GrfTarget::radial_power(GridShape{1, 8, 8}, 1.0, 1.0);
  check_score_against_density(grf, rng);

  std::vector<Field> means;
  for (int i = 0; i < 3; ++i) means.push_back(rng.normal_field(small));
  const ScoreTarget mixture =
      MixtureTarget::make({0.2, 0.3, 0.5}, means, {0.5, 1.0, 2.0});
  check_score_against_density(mixture, rng);
}

TEST_CASE("log density peaks at the mean and has the quadratic profile") {
  const GridShape shape{1, 2, 2};
  const GaussianTarget std_g = GaussianTarget::standard(shape);
  const Field zero(shape, 0.0);
  const double ld0 = std_g.log_density(zero);
  pds::Rng rng(63);
  for (int i = 0; i < 10; ++i) {
    const Field x = rng.normal_field(shape);
    CHECK(std_g.log_density(x) <= ld0);
    const double expected = -0.5 * pds::l2_norm(x) * pds::l2_norm(x);
    CHECK(std_g.log_density(x) - ld0 == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("a one-component mixture matches the isotropic gaussian up to a constant") {
  const GridShape shape{1, 2, 2};
  pds::Rng rng(64);
  const Field mu = rng.normal_field(shape);
  const double var = 1.7;
  const MixtureTarget one = MixtureTarget::make({1.0}, {mu}, {var});
  const GaussianTarget iso = GaussianTarget::isotropic(mu, var);

  const Field x = rng.normal_field(shape);
  const Field y = rng.normal_field(shape);
  const double mix_diff = one.log_density(x) - one.log_density(y);
  const double gauss_diff = iso.log_density(x) - iso.log_density(y);
  CHECK(mix_diff == doctest::Approx(gauss_diff).epsilon(1e-12));

  const Field sm = one.score(x);
  const Field sg = iso.score(x);
  CHECK(pds::max_abs(sm - sg) < 1e-12);
}

TEST_CASE("exact gaussian draws reproduce mean and covariance") {
  const GridShape shape{1, 2, 2};
  const GaussianTarget g = GaussianTarget::standard(shape);
  pds::Rng rng(65);
  const int n = 10000;
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Matrix4d second = Eigen::Matrix4d::Zero();
  for (int i = 0; i < n; ++i) {
    const Field x = g.sample(rng);
    Eigen::Vector4d v;
    for (int j = 0; j < 4; ++j) v[j] = x[j];
    mean += v;
    second += v * v.transpose();
  }
  mean /= n;
  const Eigen::Matrix4d cov = second / n - mean * mean.transpose();
  CHECK(mean.cwiseAbs().maxCoeff() < 0.05);
  CHECK((cov - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff() < 0.1);
}

TEST_CASE("exact field draws hit the prescribed power bin by bin") {
  const GridShape shape{1, 8, 8};
  const GrfTarget grf = GrfTarget::radial_power(shape, 1.0, 1.0);
  pds::Rng rng(66);
  const int n = 10000;
  Field power_acc(shape, 0.0);
  for (int i = 0; i < n; ++i) {
    const pds::SpectralField s = pds::fft2(grf.sample(rng));
    for (std::int64_t j = 0; j < power_acc.size(); ++j) {
      power_acc[j] += std::norm(s[j]);
    }
  }
  const Field estimate = pds::fftshift(power_acc * (1.0 / (64.0 * n)));
  const Field& exact = grf.power_centered();
  for (std::int64_t j = 0; j < estimate.size(); ++j) {
    CHECK(estimate[j] == doctest::Approx(exact[j]).epsilon(0.10));
  }
}

TEST_CASE("zero-weight mixture components are never drawn") {
  const GridShape shape{1, 2, 2};
  const Field near(shape, 0.0);
  const Field far(shape, 100.0);
  const MixtureTarget m = MixtureTarget::make({1.0, 0.0}, {near, far}, {1.0, 1.0});
  pds::Rng rng(67);
  for (int i = 0; i < 500; ++i) {
    const Field x = m.sample(rng);
    CHECK(pds::max_abs(x) < 10.0);
  }
}

TEST_CASE("exact_moments report closed-form mean and covariance") {
  const GridShape shape{1, 2, 2};
  const pds::TargetMoments std_m =
      pds::exact_moments(GaussianTarget::standard(shape));
  CHECK(pds::max_abs(std_m.mean) == 0.0);
  REQUIRE(std_m.covariance.has_value());
  CHECK((*std_m.covariance - Eigen::Matrix4d::Identity()).norm() == 0.0);

  // Symmetric two-component mixture: covariance = σ²I + m mᵀ.
  pds::Rng rng(68);
  const Field m_plus = rng.normal_field(shape);
  Field m_minus = m_plus;
  m_minus *= -1.0;
  const double var = 0.7;
  const pds::TargetMoments mix = pds::exact_moments(
      MixtureTarget::make({0.5, 0.5}, {m_plus, m_minus}, {var, var}));
  CHECK(pds::max_abs(mix.mean) < 1e-12);
  REQUIRE(mix.covariance.has_value());
  Eigen::Vector4d mv;
  for (int j = 0; j < 4; ++j) mv[j] = m_plus[j];
  const Eigen::Matrix4d expected =
      var * Eigen::Matrix4d::Identity() + mv * mv.transpose();
  CHECK((*mix.covariance - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("field target moments carry the spectrum and a zero mean") {
  const GridShape shape{1, 4, 4};
  const GrfTarget grf = GrfTarget::radial_power(shape, 2.0, 1.5);
  const pds::TargetMoments mom = grf.moments();
  CHECK(pds::max_abs(mom.mean) == 0.0);
  REQUIRE(mom.spectrum_centered.has_value());
  CHECK(pds::max_abs(*mom.spectrum_centered - grf.power_centered()) == 0.0);

  // score(x) = -C⁻¹x with C diagonal in the DFT basis: multiplying the
  // negated score by the power spectrum must reproduce x.
  pds::Rng rng(69);
  const Field x = rng.normal_field(shape);
  Field neg_score = grf.score(x);
  neg_score *= -1.0;
  const Field back = pds::ifft2_real(
      pds::elementwise_mul(pds::fft2(neg_score), grf.power()));
  for (std::int64_t i = 0; i < x.size(); ++i) {
    CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-9));
  }
}

TEST_CASE("target constructors validate their parameters") {
  const GridShape shape{1, 2, 2};
  const Field mu(shape, 0.0);

  Eigen::Matrix4d asym = Eigen::Matrix4d::Identity();
  asym(0, 1) = 0.5;  // (1,0) stays 0
  CHECK_THROWS_AS(GaussianTarget::make(mu, asym), std::invalid_argument);

  Eigen::Matrix4d indefinite = Eigen::Matrix4d::Identity();
  indefinite(3, 3) = -1.0;
  CHECK_THROWS_AS(GaussianTarget::make(mu, indefinite), std::invalid_argument);

  CHECK_THROWS_AS(GaussianTarget::make(mu, Eigen::Matrix3d::Identity()),
                  std::invalid_argument);
  CHECK_THROWS_AS(GaussianTarget::isotropic(mu, 0.0), std::invalid_argument);

  // Dense covariance cap: 1×33×32 flattens to 1056 > 1024.
  CHECK_THROWS_AS(GaussianTarget::standard(GridShape{1, 33, 32}),
                  std::invalid_argument);

  Field nonpos_power(shape, 1.0);
  nonpos_power[2] = 0.0;
  CHECK_THROWS_AS(GrfTarget::make(nonpos_power), std::invalid_argument);

  Field asym_power(GridShape{1, 4, 4}, 1.0);
  asym_power.at(0, 1, 0) = 2.0;
  CHECK_THROWS_AS(GrfTarget::make(pds::fftshift(asym_power)),
                  std::invalid_argument);
  CHECK_THROWS_AS(GrfTarget::radial_power(shape, -1.0, 1.0),
                  std::invalid_argument);

  CHECK_THROWS_AS(MixtureTarget::make({}, {}, {}), std::invalid_argument);
  CHECK_THROWS_AS(MixtureTarget::make({0.5, 0.5}, {mu}, {1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MixtureTarget::make({0.7, 0.7}, {mu, mu}, {1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MixtureTarget::make({-0.5, 1.5}, {mu, mu}, {1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(MixtureTarget::make({0.5, 0.5}, {mu, mu}, {1.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      MixtureTarget::make({0.5, 0.5}, {mu, Field(GridShape{1, 2, 3}, 0.0)},
                          {1.0, 1.0}),
      std::invalid_argument);
}
