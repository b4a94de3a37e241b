#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "pds/filters.hpp"
#include "pds/grid.hpp"
#include "pds/rng.hpp"
#include "test_support.hpp"

using pds::Field;
using pds::GridShape;

TEST_CASE("parametric filter is 1 inside the radius and outer_gain outside") {
  const GridShape shape{1, 28, 28};
  const Field r = pds::build_parametric_r(shape, {5.6, 1.6});
  CHECK(r.at(0, 14, 14) == 1.0);
  CHECK(r.at(0, 0, 0) == 1.6);
  // Every bin is one of the two plateau values.
  for (std::int64_t i = 0; i < r.size(); ++i) {
    CHECK((r[i] == 1.0 || r[i] == 1.6));
  }
}

TEST_CASE("parametric filter degenerates to all ones at unit gain or huge radius") {
  const GridShape shape{1, 8, 8};
  const Field unit_gain = pds::build_parametric_r(shape, {2.0, 1.0});
  const Field huge_radius = pds::build_parametric_r(shape, {100.0, 1.6});
  for (std::int64_t i = 0; i < unit_gain.size(); ++i) {
    CHECK(unit_gain[i] == 1.0);
    CHECK(huge_radius[i] == 1.0);
  }
}

TEST_CASE("a tiny parametric radius passes only the centered DC bin") {
  const GridShape shape{1, 4, 4};
  const Field r = pds::build_parametric_r(shape, {0.5, 2.0});
  for (int h = 0; h < 4; ++h) {
    for (int w = 0; w < 4; ++w) {
      if (h == 2 && w == 2) {
        CHECK(r.at(0, h, w) == 1.0);
      } else {
        CHECK(r.at(0, h, w) == 2.0);
      }
    }
  }
}

TEST_CASE("parametric filter rejects bad parameters") {
  const GridShape shape{1, 4, 4};
  CHECK_THROWS_AS(pds::build_parametric_r(shape, {0.0, 1.6}),
                  std::invalid_argument);
  CHECK_THROWS_AS(pds::build_parametric_r(shape, {2.0, 0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(pds::build_parametric_r(shape, {2.0, -1.0}),
                  std::invalid_argument);
}

TEST_CASE("statistical filter peaks at exactly 1 for any alpha") {
  pds::Rng rng(41);
  const GridShape shape{1, 8, 8};
  std::vector<Field> samples;
  for (int i = 0; i < 20; ++i) samples.push_back(rng.normal_field(shape));

  for (const double alpha : {1.0, 1.3, 5.0, 10.0}) {
    const Field r = pds::build_statistical_r(samples, {alpha});
    CHECK(pds::max_abs(r) == 1.0);
    double lo = r[0];
    for (std::int64_t i = 0; i < r.size(); ++i) lo = std::min(lo, r[i]);
    CHECK(lo >= 1.0 - 1.0 / alpha - 1e-12);
    CHECK(lo > 0.0);
  }
}

TEST_CASE("statistical filter of a constant image dips to 1 - 1/alpha off-peak") {
  const GridShape shape{1, 8, 8};
  const std::vector<Field> samples{Field(shape, 3.0)};
  const Field r = pds::build_statistical_r(samples, {5.0});

  // All energy sits in the DC bin, which lands at the center after the shift.
  CHECK(r.at(0, 4, 4) == 1.0);
  double lo = 1.0;
  for (std::int64_t i = 0; i < r.size(); ++i) lo = std::min(lo, r[i]);
  CHECK(lo == doctest::Approx(0.8).epsilon(1e-9));
  for (int h = 0; h < 8; ++h) {
    for (int w = 0; w < 8; ++w) {
      if (h == 4 && w == 4) continue;
      CHECK(r.at(0, h, w) == doctest::Approx(0.8).epsilon(1e-9));
    }
  }
}

TEST_CASE("statistical filter does not depend on sample order") {
  pds::Rng rng(42);
  const GridShape shape{1, 6, 6};
  std::vector<Field> samples;
  for (int i = 0; i < 7; ++i) samples.push_back(rng.normal_field(shape));
  const Field forward = pds::build_statistical_r(samples, {5.0});
  std::reverse(samples.begin(), samples.end());
  const Field reversed = pds::build_statistical_r(samples, {5.0});
  CHECK(pds::max_abs(forward - reversed) < 1e-13);
}

TEST_CASE("statistical filter rejects degenerate or inconsistent input") {
  const GridShape shape{1, 4, 4};
  CHECK_THROWS_AS(pds::build_statistical_r({}, {5.0}), std::invalid_argument);
  CHECK_THROWS_AS(
      pds::build_statistical_r({Field(shape, 0.0), Field(shape, 0.0)}, {5.0}),
      std::runtime_error);
  CHECK_THROWS_AS(pds::build_statistical_r({Field(shape, 1.0)}, {0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      pds::build_statistical_r(
          {Field(shape, 1.0), Field(GridShape{1, 4, 5}, 1.0)}, {5.0}),
      std::invalid_argument);
}

TEST_CASE("space filter of constant images is all ones") {
  const GridShape shape{1, 5, 5};
  const std::vector<Field> samples{Field(shape, 2.0), Field(shape, 2.0)};
  const Field a = pds::build_space_a(samples);
  for (std::int64_t i = 0; i < a.size(); ++i) CHECK(a[i] == 1.0);
}

TEST_CASE("space filter normalizes to max 1 and clamps dead pixels") {
  const GridShape shape{1, 2, 2};
  Field s(shape, 4.0);
  s.at(0, 1, 1) = 0.0;  // a pixel that is dark in every sample
  const Field a = pds::build_space_a({s});
  CHECK(pds::max_abs(a) == 1.0);
  CHECK(a.at(0, 1, 1) == 1e-6);
  CHECK(a.at(0, 0, 0) == 1.0);

  // Strict positivity holds for arbitrary nonnegative data.
  pds::Rng rng(43);
  std::vector<Field> randoms;
  for (int i = 0; i < 5; ++i) {
    Field f = rng.normal_field(GridShape{1, 6, 6});
    for (std::int64_t j = 0; j < f.size(); ++j) f[j] = std::abs(f[j]);
    randoms.push_back(f);
  }
  const Field ra = pds::build_space_a(randoms);
  CHECK(pds::max_abs(ra) == 1.0);
  for (std::int64_t j = 0; j < ra.size(); ++j) CHECK(ra[j] >= 1e-6);
}

TEST_CASE("space filter rejects negative, empty, or all-zero input") {
  const GridShape shape{1, 2, 2};
  Field neg(shape, 1.0);
  neg[0] = -0.5;
  CHECK_THROWS_AS(pds::build_space_a({neg}), std::invalid_argument);
  CHECK_THROWS_AS(pds::build_space_a({}), std::invalid_argument);
  CHECK_THROWS_AS(pds::build_space_a({Field(shape, 0.0)}), std::runtime_error);
}

TEST_CASE("uniform_a is the all-ones field") {
  const Field a = pds::uniform_a(GridShape{2, 3, 4});
  CHECK(a.shape() == GridShape{2, 3, 4});
  for (std::int64_t i = 0; i < a.size(); ++i) CHECK(a[i] == 1.0);
  CHECK_THROWS_AS(pds::uniform_a(GridShape{0, 1, 1}), std::invalid_argument);
}
