#include "pds/filters.hpp"

#include <cmath>
#include <stdexcept>

#include "pds/spectral.hpp"

namespace pds {

namespace {

const GridShape& common_shape(const std::vector<Field>& samples, const char* who) {
  if (samples.empty()) {
    throw std::invalid_argument(std::string(who) + ": need at least one sample");
  }
  const GridShape& shape = samples.front().shape();
  for (const Field& s : samples) {
    if (!(s.shape() == shape)) {
      throw std::invalid_argument(std::string(who) + ": samples disagree on shape (" +
                                  to_string(shape) + " vs " + to_string(s.shape()) + ")");
    }
  }
  return shape;
}

}  // namespace

Field build_parametric_r(const GridShape& shape, const ParametricFilterSpec& spec) {
  if (!shape.valid()) {
    throw std::invalid_argument("build_parametric_r: invalid shape " + to_string(shape));
  }
  if (!(spec.radius > 0.0) || !(spec.outer_gain > 0.0)) {
    throw std::invalid_argument("build_parametric_r: radius and outer_gain must be positive");
  }
  Field r(shape);
  const double ch = 0.5 * shape.height;
  const double cw = 0.5 * shape.width;
  const double bound = 2.0 * spec.radius * spec.radius;
  for (int c = 0; c < shape.channels; ++c) {
    for (int h = 0; h < shape.height; ++h) {
      for (int w = 0; w < shape.width; ++w) {
        const double d2 = (h - ch) * (h - ch) + (w - cw) * (w - cw);
        r.at(c, h, w) = d2 <= bound ? 1.0 : spec.outer_gain;
      }
    }
  }
  return r;
}

Field build_statistical_r(const std::vector<Field>& samples, const StatisticalFilterSpec& spec) {
  const GridShape& shape = common_shape(samples, "build_statistical_r");
  if (!(spec.alpha >= 1.0)) {
    throw std::invalid_argument("build_statistical_r: alpha must be >= 1, got " +
                                std::to_string(spec.alpha));
  }

  Field power(shape);
  for (const Field& s : samples) {
    const SpectralField spec_s = fft2(s);
    for (std::int64_t i = 0; i < power.size(); ++i) power[i] += std::norm(spec_s[i]);
  }
  const double inv_count = 1.0 / static_cast<double>(samples.size());

  Field raw(shape);
  double raw_max = 0.0;
  for (std::int64_t i = 0; i < raw.size(); ++i) {
    raw[i] = std::log1p(power[i] * inv_count);
    raw_max = std::max(raw_max, raw[i]);
  }
  if (!(raw_max > 0.0)) {
    throw std::runtime_error("build_statistical_r: degenerate statistics (all samples zero)");
  }

  Field r = fftshift(raw);
  const double inv_alpha = 1.0 / spec.alpha;
  for (std::int64_t i = 0; i < r.size(); ++i) {
    // (ratio − 1)/alpha + 1: equals (ratio + alpha − 1)/alpha but hits 1.0
    // exactly at the argmax for every alpha.
    r[i] = (r[i] / raw_max - 1.0) * inv_alpha + 1.0;
  }
  return r;
}

Field build_space_a(const std::vector<Field>& samples) {
  const GridShape& shape = common_shape(samples, "build_space_a");

  Field mean(shape);
  for (const Field& s : samples) {
    for (std::int64_t i = 0; i < mean.size(); ++i) {
      if (s[i] < 0.0) {
        throw std::invalid_argument("build_space_a: negative sample entry (intensities only)");
      }
      mean[i] += s[i];
    }
  }
  const double inv_count = 1.0 / static_cast<double>(samples.size());

  Field a(shape);
  double a_max = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i) {
    a[i] = std::log1p(mean[i] * inv_count);
    a_max = std::max(a_max, a[i]);
  }
  if (!(a_max > 0.0)) {
    throw std::runtime_error("build_space_a: degenerate statistics (all samples zero)");
  }
  for (std::int64_t i = 0; i < a.size(); ++i) {
    a[i] = std::max(a[i] / a_max, 1e-6);
  }
  return a;
}

Field uniform_a(const GridShape& shape) {
  if (!shape.valid()) {
    throw std::invalid_argument("uniform_a: invalid shape " + to_string(shape));
  }
  return Field(shape, 1.0);
}

}  // namespace pds
