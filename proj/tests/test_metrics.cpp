#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "pds/grid.hpp"
#include "pds/metrics.hpp"
#include "pds/rng.hpp"
#include "pds/targets.hpp"
#include "test_support.hpp"

using pds::Field;
using pds::GaussianTarget;
using pds::GridShape;
using pds::GrfTarget;
using pds::MomentMode;
using pds::MomentSummary;

TEST_CASE("empirical dense moments match hand-computed mean and covariance") {
  const GridShape shape{1, 1, 2};
  const Field plus(shape, {1.0, 2.0});
  Field minus = plus;
  minus *= -1.0;

  // Two identical samples: zero covariance.
  const MomentSummary same =
      pds::empirical_moments({plus, plus}, MomentMode::Dense);
  CHECK(same.n_samples == 2);
  CHECK(same.mean[0] == 1.0);
  CHECK(same.mean[1] == 2.0);
  REQUIRE(same.covariance.has_value());
  CHECK(same.covariance->norm() == 0.0);

  // The pair ±v has unbiased covariance 2·v·vᵀ.
  const MomentSummary pm =
      pds::empirical_moments({plus, minus}, MomentMode::Dense);
  CHECK(pds::max_abs(pm.mean) == 0.0);
  Eigen::Vector2d v(1.0, 2.0);
  const Eigen::Matrix2d expected = 2.0 * v * v.transpose();
  CHECK((*pm.covariance - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("empirical_moments validates inputs") {
  const GridShape shape{1, 1, 2};
  CHECK_THROWS_AS(pds::empirical_moments({Field(shape, 1.0)}, MomentMode::Dense),
                  std::invalid_argument);
  CHECK_THROWS_AS(pds::empirical_moments({}, MomentMode::Dense),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      pds::empirical_moments({Field(shape, 1.0), Field(GridShape{1, 2, 2}, 1.0)},
                             MomentMode::Dense),
      std::invalid_argument);

  // Dense summaries stop at 4096 elements; 65·64 = 4160 is over the cap.
  const GridShape big{1, 65, 64};
  CHECK_THROWS_AS(
      pds::empirical_moments({Field(big, 0.5), Field(big, 1.0)},
                             MomentMode::Dense),
      std::invalid_argument);
  // Spectral mode has no such cap.
  CHECK_NOTHROW(pds::empirical_moments({Field(big, 0.5), Field(big, 1.0)},
                                       MomentMode::Spectral));
}

TEST_CASE("empirical spectra of exact draws approach the target power") {
  const GridShape shape{1, 8, 8};
  const GrfTarget grf = GrfTarget::radial_power(shape, 1.0, 1.0);
  pds::Rng rng(81);
  std::vector<Field> samples;
  samples.reserve(10000);
  for (int i = 0; i < 10000; ++i) samples.push_back(grf.sample(rng));
  const MomentSummary emp =
      pds::empirical_moments(samples, MomentMode::Spectral);
  REQUIRE(emp.spectrum_centered.has_value());
  const Field& exact = grf.power_centered();
  for (std::int64_t i = 0; i < exact.size(); ++i) {
    CHECK((*emp.spectrum_centered)[i] ==
          doctest::Approx(exact[i]).epsilon(0.10));
  }
}

TEST_CASE("reference_moments mirror exact_moments in each mode") {
  const GridShape shape{1, 2, 2};
  const MomentSummary dense =
      pds::reference_moments(GaussianTarget::standard(shape), MomentMode::Dense);
  CHECK(pds::max_abs(dense.mean) == 0.0);
  REQUIRE(dense.covariance.has_value());
  CHECK((*dense.covariance - Eigen::Matrix4d::Identity()).norm() == 0.0);

  const GrfTarget grf = GrfTarget::radial_power(GridShape{1, 4, 4}, 1.0, 2.0);
  const MomentSummary spectral =
      pds::reference_moments(grf, MomentMode::Spectral);
  REQUIRE(spectral.spectrum_centered.has_value());
  CHECK(pds::max_abs(*spectral.spectrum_centered - grf.power_centered()) == 0.0);
}

TEST_CASE("gaussian_w2 obeys the closed forms") {
  const Eigen::Matrix2d eye = Eigen::Matrix2d::Identity();
  const Eigen::Vector2d zero = Eigen::Vector2d::Zero();

  // Identical distributions are at distance zero.
  CHECK(pds::gaussian_w2(zero, eye, zero, eye) == doctest::Approx(0.0));

  // A pure mean shift contributes its Euclidean length.
  const Eigen::Vector2d m(3.0, 4.0);
  CHECK(pds::gaussian_w2(m, eye, zero, eye) == doctest::Approx(5.0));

  // N(0,1) vs N(0,4) in one dimension: |1 - 2| = 1.
  const Eigen::VectorXd z1 = Eigen::VectorXd::Zero(1);
  Eigen::MatrixXd one(1, 1), four(1, 1);
  one << 1.0;
  four << 4.0;
  CHECK(pds::gaussian_w2(z1, one, z1, four) == doctest::Approx(1.0));

  // Symmetry and a triangle-inequality spot check on random triples.
  pds::Rng rng(82);
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd a = pdstest::random_spd(3, 0.3, 2.0, 10 + trial);
    const Eigen::MatrixXd b = pdstest::random_spd(3, 0.3, 2.0, 20 + trial);
    const Eigen::MatrixXd c = pdstest::random_spd(3, 0.3, 2.0, 30 + trial);
    Eigen::VectorXd ma(3), mb(3), mc(3);
    for (int i = 0; i < 3; ++i) {
      ma[i] = rng.normal();
      mb[i] = rng.normal();
      mc[i] = rng.normal();
    }
    const double ab = pds::gaussian_w2(ma, a, mb, b);
    const double ba = pds::gaussian_w2(mb, b, ma, a);
    const double ac = pds::gaussian_w2(ma, a, mc, c);
    const double cb = pds::gaussian_w2(mc, c, mb, b);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-10));
    CHECK(ab <= ac + cb + 1e-10);
  }
}

TEST_CASE("gaussian_w2 rejects indefinite covariances") {
  const Eigen::Vector2d zero = Eigen::Vector2d::Zero();
  const Eigen::Matrix2d eye = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d indefinite;
  indefinite << 1.0, 0.0, 0.0, -1.0;
  CHECK_THROWS_WITH_AS(pds::gaussian_w2(zero, indefinite, zero, eye),
                       doctest::Contains("not positive semidefinite"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(pds::gaussian_w2(zero, eye, zero, indefinite),
                       doctest::Contains("not positive semidefinite"),
                       std::runtime_error);
}

TEST_CASE("summary-level w2 works per mode and rejects mixed modes") {
  const GridShape shape{1, 1, 2};

  MomentSummary a;
  a.mean = Field(shape, 0.0);
  a.covariance = Eigen::Matrix2d::Identity();
  MomentSummary b;
  b.mean = Field(shape, {3.0, 4.0});
  b.covariance = Eigen::Matrix2d::Identity();
  CHECK(pds::gaussian_w2(a, b) == doctest::Approx(5.0));

  // Spectral pair evaluated by hand:
  // sqrt(sum_k (sqrt(p1) - sqrt(p2))²) with zero mean shift.
  MomentSummary s1;
  s1.mean = Field(shape, 0.0);
  s1.spectrum_centered = Field(shape, {1.0, 4.0});
  MomentSummary s2;
  s2.mean = Field(shape, 0.0);
  s2.spectrum_centered = Field(shape, {4.0, 9.0});
  // (1-2)² + (2-3)² = 2
  CHECK(pds::gaussian_w2(s1, s2) == doctest::Approx(std::sqrt(2.0)));

  CHECK_THROWS_AS(pds::gaussian_w2(a, s2), std::invalid_argument);

  MomentSummary neg = s2;
  (*neg.spectrum_centered)[0] = -1.0;
  CHECK_THROWS_AS(pds::gaussian_w2(s1, neg), std::runtime_error);
}

TEST_CASE("condition_number reflects the covariance eigenvalue spread") {
  const GridShape line{1, 1, 2};
  CHECK(pds::condition_number(GaussianTarget::standard(line)) ==
        doctest::Approx(1.0));

  Eigen::Matrix2d diag;
  diag << 1.0, 0.0, 0.0, 4.0;
  CHECK(pds::condition_number(GaussianTarget::make(Field(line, 0.0), diag)) ==
        doctest::Approx(4.0));

  // Radial power with falloff tuned so max/min is exactly 1000 on 32×32:
  // the farthest bin sits at squared distance 512.
  const double falloff = 999.0 / 512.0;
  const GrfTarget grf =
      GrfTarget::radial_power(GridShape{1, 32, 32}, falloff, 1.0);
  CHECK(pds::condition_number(grf) == doctest::Approx(1000.0).epsilon(1e-9));

  const pds::ScoreTarget mixture = pds::MixtureTarget::make(
      {0.5, 0.5}, {Field(line, -1.0), Field(line, 1.0)}, {1.0, 1.0});
  CHECK_THROWS_AS(pds::condition_number(mixture), std::invalid_argument);
}

TEST_CASE("spectral_error is the relative L2 gap of pooled spectra") {
  const GridShape shape{1, 8, 8};
  const GrfTarget grf = GrfTarget::radial_power(shape, 1.0, 1.0);

  // All-zero samples estimate a zero spectrum: relative error exactly 1.
  const std::vector<Field> zeros{Field(shape, 0.0), Field(shape, 0.0)};
  CHECK(pds::spectral_error(zeros, grf) == doctest::Approx(1.0));

  // Exact draws drive the error small.
  pds::Rng rng(83);
  std::vector<Field> samples;
  for (int i = 0; i < 10000; ++i) samples.push_back(grf.sample(rng));
  CHECK(pds::spectral_error(samples, grf) < 0.1);

  CHECK_THROWS_AS(
      pds::spectral_error({Field(GridShape{1, 4, 4}, 1.0)}, grf),
      std::invalid_argument);
}

TEST_CASE("spectral_error shrinks like one over sqrt of the sample count") {
  const GridShape shape{1, 8, 8};
  const GrfTarget grf = GrfTarget::radial_power(shape, 1.0, 1.0);
  pds::Rng rng(84);
  double err_small_sum = 0.0;
  double err_big_sum = 0.0;
  const int trials = 40;
  for (int trial = 0; trial < trials; ++trial) {
    std::vector<Field> small;
    std::vector<Field> big;
    for (int i = 0; i < 250; ++i) small.push_back(grf.sample(rng));
    for (int i = 0; i < 500; ++i) big.push_back(grf.sample(rng));
    err_small_sum += pds::spectral_error(small, grf);
    err_big_sum += pds::spectral_error(big, grf);
  }
  const double ratio = err_small_sum / err_big_sum;
  // Monte Carlo noise allows a loose band around sqrt(2) ≈ 1.41.
  CHECK(ratio > 1.2);
  CHECK(ratio < 1.7);
}
