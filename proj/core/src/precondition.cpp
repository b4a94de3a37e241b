#include "pds/precondition.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

#include "pds/spectral.hpp"

namespace pds {

namespace {

constexpr double kPositivityFloor = 1e-12;

bool is_all_ones(const Field& f) {
  for (std::int64_t i = 0; i < f.size(); ++i) {
    if (f[i] != 1.0) return false;
  }
  return true;
}

void require_positive(const Field& f, const char* name) {
  for (std::int64_t i = 0; i < f.size(); ++i) {
    if (!(f[i] > kPositivityFloor)) {
      throw std::invalid_argument(std::string("Preconditioner: ") + name +
                                  " filter must be strictly positive, entry " +
                                  std::to_string(i) + " is " + std::to_string(f[i]));
    }
  }
}

Field reciprocal(const Field& f) {
  Field out(f.shape());
  for (std::int64_t i = 0; i < f.size(); ++i) out[i] = 1.0 / f[i];
  return out;
}

Field squared(const Field& f) {
  Field out(f.shape());
  for (std::int64_t i = 0; i < f.size(); ++i) out[i] = f[i] * f[i];
  return out;
}

// out[c,h,w] = x[c, (−h) mod H, (−w) mod W]; realizes Fᵀ on spectra and the
// frequency-reversal symmetry checks.
SpectralField index_reverse(const SpectralField& x) {
  const GridShape s = x.shape();
  SpectralField out(s);
  for (int c = 0; c < s.channels; ++c) {
    for (int h = 0; h < s.height; ++h) {
      const int rh = h == 0 ? 0 : s.height - h;
      for (int w = 0; w < s.width; ++w) {
        out.at(c, h, w) = x.at(c, rh, w == 0 ? 0 : s.width - w);
      }
    }
  }
  return out;
}

}  // namespace

Preconditioner Preconditioner::make(Field space_filter, Field freq_filter_centered) {
  if (!(space_filter.shape() == freq_filter_centered.shape())) {
    throw std::invalid_argument("Preconditioner: filter shapes differ (" +
                                to_string(space_filter.shape()) + " vs " +
                                to_string(freq_filter_centered.shape()) + ")");
  }
  require_positive(space_filter, "space");
  require_positive(freq_filter_centered, "frequency");

  Field r_unshifted = ifftshift(freq_filter_centered);
  const GridShape s = r_unshifted.shape();
  for (int c = 0; c < s.channels; ++c) {
    for (int h = 0; h < s.height; ++h) {
      const int rh = h == 0 ? 0 : s.height - h;
      for (int w = 0; w < s.width; ++w) {
        const double a = r_unshifted.at(c, h, w);
        const double b = r_unshifted.at(c, rh, w == 0 ? 0 : s.width - w);
        if (std::abs(a - b) > 1e-9 * std::max({std::abs(a), std::abs(b), 1.0})) {
          throw std::invalid_argument(
              "Preconditioner: frequency filter is not symmetric under frequency "
              "reversal at (c=" + std::to_string(c) + ", h=" + std::to_string(h) +
              ", w=" + std::to_string(w) + "): " + std::to_string(a) + " vs " +
              std::to_string(b) +
              "; an asymmetric filter makes the inverse/transpose recipes invalid");
        }
      }
    }
  }

  Preconditioner p;
  p.a_identity_ = is_all_ones(space_filter);
  p.r_identity_ = is_all_ones(r_unshifted);
  p.inv_a_ = reciprocal(space_filter);
  p.inv_a2_ = squared(p.inv_a_);
  p.inv_r_ = reciprocal(r_unshifted);
  p.inv_r2_ = squared(p.inv_r_);
  p.a_ = std::move(space_filter);
  p.r_centered_ = std::move(freq_filter_centered);
  p.r_ = std::move(r_unshifted);
  return p;
}

Preconditioner Preconditioner::identity(const GridShape& shape) {
  return make(Field(shape, 1.0), Field(shape, 1.0));
}

namespace {

void require_match(const Preconditioner& p, const Field& x, const char* op) {
  if (!(p.shape() == x.shape())) {
    throw std::invalid_argument(std::string(op) + ": field shape " + to_string(x.shape()) +
                                " does not match preconditioner " + to_string(p.shape()));
  }
}

}  // namespace

Field apply_m(const Preconditioner& p, const Field& x) {
  require_match(p, x, "apply_m");
  Field y = p.freq_is_identity() ? x : ifft2_real(elementwise_mul(fft2(x), p.freq_filter()));
  return p.space_is_identity() ? y : elementwise_mul(y, p.space_filter());
}

Field apply_m_inverse(const Preconditioner& p, const Field& x) {
  require_match(p, x, "apply_m_inverse");
  Field y = p.space_is_identity() ? x : elementwise_mul(x, p.inv_space());
  if (p.freq_is_identity()) return y;
  return ifft2_real(elementwise_mul(fft2(y), p.inv_freq()));
}

Field apply_drift_precondition(const Preconditioner& p, const Field& d) {
  require_match(p, d, "apply_drift_precondition");
  if (p.freq_is_identity()) {
    return p.space_is_identity() ? d : elementwise_mul(d, p.inv_space_sq());
  }
  if (p.space_is_identity()) {
    // The two frequency stages merge: F⁻¹[F[d] / R²].
    return ifft2_real(elementwise_mul(fft2(d), p.inv_freq_sq()));
  }
  SpectralField s = elementwise_mul(fft2(d), p.inv_freq());
  SpectralField mid = ifft2(s);  // stays complex until the final inverse
  mid = elementwise_mul(mid, p.inv_space_sq());
  return ifft2_real(elementwise_mul(fft2(mid), p.inv_freq()));
}

SkewOperator shift_diff(int m, int n) {
  return SkewOperator{SkewOperator::Kind::ShiftDiff, m, n};
}

SkewOperator spectral_shift_diff(int m, int n) {
  return SkewOperator{SkewOperator::Kind::SpectralShiftDiff, m, n};
}

SkewOperator spectral_transpose_diff() {
  return SkewOperator{SkewOperator::Kind::SpectralTransposeDiff, 0, 0};
}

Field apply_skew(const SkewOperator& s, const Field& x) {
  switch (s.kind) {
    case SkewOperator::Kind::ShiftDiff: {
      // Pᵀ of a circular shift is the opposite shift.
      return roll(x, s.shift_h, s.shift_w) - roll(x, -s.shift_h, -s.shift_w);
    }
    case SkewOperator::Kind::SpectralShiftDiff: {
      const SpectralField u = ifft2(to_spectral(x));
      const SpectralField v =
          roll(u, s.shift_h, s.shift_w) - roll(u, -s.shift_h, -s.shift_w);
      return real_part(fft2(v));
    }
    case SkewOperator::Kind::SpectralTransposeDiff: {
      const SpectralField f = fft2(x);
      return real_part(f - index_reverse(f));
    }
  }
  throw std::logic_error("apply_skew: unknown kind");
}

}  // namespace pds
