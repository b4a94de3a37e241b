#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace pds {

struct GridShape {
  int channels = 0;
  int height = 0;
  int width = 0;

  std::int64_t size() const {
    return static_cast<std::int64_t>(channels) * height * width;
  }
  bool valid() const { return channels > 0 && height > 0 && width > 0; }
  bool operator==(const GridShape&) const = default;
};

std::string to_string(const GridShape& s);

// Dense real-valued C×H×W grid, row-major in (c, h, w).
class Field {
 public:
  Field() = default;
  explicit Field(GridShape shape, double fill = 0.0);
  Field(GridShape shape, std::vector<double> values);

  const GridShape& shape() const { return shape_; }
  int channels() const { return shape_.channels; }
  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

  double& at(int c, int h, int w) { return data_[index(c, h, w)]; }
  double at(int c, int h, int w) const { return data_[index(c, h, w)]; }
  double& operator[](std::int64_t i) { return data_[i]; }
  double operator[](std::int64_t i) const { return data_[i]; }

  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  std::int64_t index(int c, int h, int w) const {
    return (static_cast<std::int64_t>(c) * shape_.height + h) * shape_.width + w;
  }

 private:
  GridShape shape_{};
  std::vector<double> data_;
};

// Complex-valued counterpart of Field; carries FFT-domain values.
class SpectralField {
 public:
  using value_type = std::complex<double>;

  SpectralField() = default;
  explicit SpectralField(GridShape shape, value_type fill = {});
  SpectralField(GridShape shape, std::vector<value_type> values);

  const GridShape& shape() const { return shape_; }
  int channels() const { return shape_.channels; }
  int height() const { return shape_.height; }
  int width() const { return shape_.width; }
  std::int64_t size() const { return static_cast<std::int64_t>(data_.size()); }

  value_type& at(int c, int h, int w) { return data_[index(c, h, w)]; }
  const value_type& at(int c, int h, int w) const { return data_[index(c, h, w)]; }
  value_type& operator[](std::int64_t i) { return data_[i]; }
  const value_type& operator[](std::int64_t i) const { return data_[i]; }

  std::vector<value_type>& data() { return data_; }
  const std::vector<value_type>& data() const { return data_; }

  std::int64_t index(int c, int h, int w) const {
    return (static_cast<std::int64_t>(c) * shape_.height + h) * shape_.width + w;
  }

 private:
  GridShape shape_{};
  std::vector<value_type> data_;
};

// Elementwise products; mixed overloads apply a real filter to a spectrum.
Field elementwise_mul(const Field& a, const Field& b);
SpectralField elementwise_mul(const SpectralField& a, const SpectralField& b);
SpectralField elementwise_mul(const SpectralField& a, const Field& b);

// Elementwise quotients; every divisor entry must exceed 1e-12 in magnitude
// (a violation means a filter lost invertibility, so the error names the bin).
Field elementwise_div(const Field& a, const Field& b);
SpectralField elementwise_div(const SpectralField& a, const SpectralField& b);
SpectralField elementwise_div(const SpectralField& a, const Field& b);

Field real_part(const SpectralField& s);
SpectralField to_spectral(const Field& x);

Field& operator+=(Field& a, const Field& b);
Field& operator-=(Field& a, const Field& b);
SpectralField& operator-=(SpectralField& a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
Field& operator*=(Field& a, double s);
Field operator+(Field a, const Field& b);
Field operator-(Field a, const Field& b);
Field operator*(Field a, double s);
Field operator*(double s, Field a);

// y += alpha * x, without a temporary.
void axpy(Field& y, double alpha, const Field& x);

double dot(const Field& a, const Field& b);
double l2_norm(const Field& a);
double max_abs(const Field& a);
double max_abs(const SpectralField& a);
bool all_finite(const Field& a);

}  // namespace pds
