#include "pds/grid.hpp"

#include <cmath>
#include <stdexcept>

namespace pds {

namespace {

void require_valid(const GridShape& s) {
  if (!s.valid()) {
    throw std::invalid_argument("grid shape must have positive dims, got " + to_string(s));
  }
}

void require_same_shape(const GridShape& a, const GridShape& b, const char* op) {
  if (!(a == b)) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch (" + to_string(a) +
                                " vs " + to_string(b) + ")");
  }
}

std::string index_name(const GridShape& s, std::int64_t i) {
  const std::int64_t hw = static_cast<std::int64_t>(s.height) * s.width;
  const std::int64_t c = i / hw;
  const std::int64_t h = (i % hw) / s.width;
  const std::int64_t w = i % s.width;
  return "(c=" + std::to_string(c) + ", h=" + std::to_string(h) + ", w=" + std::to_string(w) + ")";
}

constexpr double kDivisorFloor = 1e-12;

template <typename Out, typename A, typename B>
Out mul_impl(const A& a, const B& b) {
  require_same_shape(a.shape(), b.shape(), "elementwise_mul");
  Out out(a.shape());
  for (std::int64_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

template <typename Out, typename A, typename B>
Out div_impl(const A& a, const B& b) {
  require_same_shape(a.shape(), b.shape(), "elementwise_div");
  Out out(a.shape());
  for (std::int64_t i = 0; i < a.size(); ++i) {
    if (std::abs(b[i]) <= kDivisorFloor) {
      throw std::runtime_error("elementwise_div: near-zero divisor at " +
                               index_name(b.shape(), i) + "; filter is not invertible");
    }
    out[i] = a[i] / b[i];
  }
  return out;
}

}  // namespace

std::string to_string(const GridShape& s) {
  return std::to_string(s.channels) + "x" + std::to_string(s.height) + "x" +
         std::to_string(s.width);
}

Field::Field(GridShape shape, double fill) : shape_(shape) {
  require_valid(shape);
  data_.assign(static_cast<std::size_t>(shape.size()), fill);
}

Field::Field(GridShape shape, std::vector<double> values)
    : shape_(shape), data_(std::move(values)) {
  require_valid(shape);
  if (static_cast<std::int64_t>(data_.size()) != shape.size()) {
    throw std::invalid_argument("field data length " + std::to_string(data_.size()) +
                                " does not match shape " + to_string(shape));
  }
}

SpectralField::SpectralField(GridShape shape, value_type fill) : shape_(shape) {
  require_valid(shape);
  data_.assign(static_cast<std::size_t>(shape.size()), fill);
}

SpectralField::SpectralField(GridShape shape, std::vector<value_type> values)
    : shape_(shape), data_(std::move(values)) {
  require_valid(shape);
  if (static_cast<std::int64_t>(data_.size()) != shape.size()) {
    throw std::invalid_argument("spectral field data length " + std::to_string(data_.size()) +
                                " does not match shape " + to_string(shape));
  }
}

Field elementwise_mul(const Field& a, const Field& b) {
  return mul_impl<Field>(a, b);
}
SpectralField elementwise_mul(const SpectralField& a, const SpectralField& b) {
  return mul_impl<SpectralField>(a, b);
}
SpectralField elementwise_mul(const SpectralField& a, const Field& b) {
  return mul_impl<SpectralField>(a, b);
}

Field elementwise_div(const Field& a, const Field& b) {
  return div_impl<Field>(a, b);
}
SpectralField elementwise_div(const SpectralField& a, const SpectralField& b) {
  return div_impl<SpectralField>(a, b);
}
SpectralField elementwise_div(const SpectralField& a, const Field& b) {
  return div_impl<SpectralField>(a, b);
}

Field real_part(const SpectralField& s) {
  Field out(s.shape());
  for (std::int64_t i = 0; i < s.size(); ++i) out[i] = s[i].real();
  return out;
}

SpectralField to_spectral(const Field& x) {
  SpectralField out(x.shape());
  for (std::int64_t i = 0; i < x.size(); ++i) out[i] = {x[i], 0.0};
  return out;
}

Field& operator+=(Field& a, const Field& b) {
  require_same_shape(a.shape(), b.shape(), "operator+=");
  for (std::int64_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

Field& operator-=(Field& a, const Field& b) {
  require_same_shape(a.shape(), b.shape(), "operator-=");
  for (std::int64_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

SpectralField& operator-=(SpectralField& a, const SpectralField& b) {
  require_same_shape(a.shape(), b.shape(), "operator-=");
  for (std::int64_t i = 0; i < a.size(); ++i) a[i] -= b[i];
  return a;
}

SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }

Field& operator*=(Field& a, double s) {
  for (std::int64_t i = 0; i < a.size(); ++i) a[i] *= s;
  return a;
}

Field operator+(Field a, const Field& b) { return a += b; }
Field operator-(Field a, const Field& b) { return a -= b; }
Field operator*(Field a, double s) { return a *= s; }
Field operator*(double s, Field a) { return a *= s; }

void axpy(Field& y, double alpha, const Field& x) {
  require_same_shape(y.shape(), x.shape(), "axpy");
  for (std::int64_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
}

double dot(const Field& a, const Field& b) {
  require_same_shape(a.shape(), b.shape(), "dot");
  double acc = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double l2_norm(const Field& a) { return std::sqrt(dot(a, a)); }

double max_abs(const Field& a) {
  double m = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

double max_abs(const SpectralField& a) {
  double m = 0.0;
  for (std::int64_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i]));
  return m;
}

bool all_finite(const Field& a) {
  for (std::int64_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i])) return false;
  }
  return true;
}

}  // namespace pds
