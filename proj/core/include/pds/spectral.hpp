#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pds/grid.hpp"

namespace pds {

// Per-channel 2D DFT. Convention: forward is unnormalized, inverse carries
// 1/(H·W), so Parseval reads Σ|x|² = (1/HW)·Σ|X|² and frequency filters apply
// multiplicatively without hidden scale factors. Any H, W ≥ 1 is supported,
// powers of two or not.
SpectralField fft2(const Field& x);
SpectralField fft2(const SpectralField& x);
SpectralField ifft2(const SpectralField& s);

// ifft2 followed by dropping imaginary parts; the usual end of a filter chain.
Field ifft2_real(const SpectralField& s);

// Circular shift: out[c, h, w] = x[c, (h−m) mod H, (w−n) mod W].
Field roll(const Field& x, int m, int n);
SpectralField roll(const SpectralField& x, int m, int n);

// Move the DC bin to (⌊H/2⌋, ⌊W/2⌋) and back; filters are stored centered.
Field fftshift(const Field& x);
Field ifftshift(const Field& x);
SpectralField fftshift(const SpectralField& x);
SpectralField ifftshift(const SpectralField& x);

// Real orthogonal matrix; BᵀB = I is checked at construction (1e-10 Frobenius).
class OrthogonalMap {
 public:
  explicit OrthogonalMap(Eigen::MatrixXd matrix);

  int dimension() const { return static_cast<int>(b_.rows()); }
  const Eigen::MatrixXd& matrix() const { return b_; }

 private:
  Eigen::MatrixXd b_;
};

std::vector<double> apply_orthogonal(const OrthogonalMap& b, const std::vector<double>& x);
// Same product on a flattened grid, preserving its shape.
Field apply_orthogonal(const OrthogonalMap& b, const Field& x);

// Haar-ish random orthogonal matrix: QR of a Gaussian matrix with the sign of
// R's diagonal fixed, so the result is deterministic given the seed.
OrthogonalMap random_orthogonal(int n, std::uint64_t seed);

}  // namespace pds
