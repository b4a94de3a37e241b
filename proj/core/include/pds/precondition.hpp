#pragma once

#include "pds/grid.hpp"

namespace pds {

// The structured operator M[x] = A ⊙ F⁻¹[R ⊙ F[x]]: a per-pixel gain A around
// a per-frequency gain R. Immutable after construction; reciprocal filters are
// cached so the inverse/transpose compositions are pure elementwise products.
//
// Construction requires both filters strictly positive (invertibility) and R
// symmetric under frequency reversal, R(k) = R(−k mod (H,W)). The symmetry is
// what makes the frequency stage a real self-adjoint operator, so that the
// noise recipe is exactly M⁻¹ and the drift recipe is exactly M⁻¹M⁻ᵀ; without
// it, taking the real part after the inverse FFT silently truncates a complex
// result and the operator stops being invertible by the printed compositions.
class Preconditioner {
 public:
  // space_filter: A. freq_filter_centered: R with the DC bin at the grid
  // center (the layout the filter builders emit).
  static Preconditioner make(Field space_filter, Field freq_filter_centered);
  static Preconditioner identity(const GridShape& shape);

  const GridShape& shape() const { return a_.shape(); }
  const Field& space_filter() const { return a_; }
  const Field& freq_filter_centered() const { return r_centered_; }

  // True when the corresponding filter is exactly all-ones; the apply
  // operations skip those stages entirely, which keeps an identity
  // preconditioner bit-for-bit equal to no preconditioner at all.
  bool space_is_identity() const { return a_identity_; }
  bool freq_is_identity() const { return r_identity_; }
  bool is_identity() const { return a_identity_ && r_identity_; }

  // Cached filters in unshifted (DC-first) layout / reciprocal form.
  const Field& freq_filter() const { return r_; }
  const Field& inv_space() const { return inv_a_; }
  const Field& inv_space_sq() const { return inv_a2_; }
  const Field& inv_freq() const { return inv_r_; }
  const Field& inv_freq_sq() const { return inv_r2_; }

 private:
  Preconditioner() = default;

  Field a_;           // A
  Field r_centered_;  // R as given, centered layout
  Field r_;           // R, unshifted layout (ready to multiply a spectrum)
  Field inv_a_, inv_a2_, inv_r_, inv_r2_;
  bool a_identity_ = false;
  bool r_identity_ = false;
};

// M[x] = A ⊙ Re[F⁻¹[R ⊙ F[x]]].
Field apply_m(const Preconditioner& p, const Field& x);

// M⁻¹[x] = Re[F⁻¹[F[x / A] / R]] — the noise-shaping line.
Field apply_m_inverse(const Preconditioner& p, const Field& x);

// M⁻¹M⁻ᵀ[d] = Re[F⁻¹[F[F⁻¹[F[d] / R] / A²] / R]] — the score-shaping line.
// Intermediate stages stay complex; the real part is taken only after the
// final inverse transform.
Field apply_drift_precondition(const Preconditioner& p, const Field& d);

// Skew-symmetric generators for the solenoidal drift term S·∇log p*.
//   ShiftDiff(m,n):          S = P(m,n) − P(m,n)ᵀ, P the circular shift, whose
//                            transpose is the opposite shift.
//   SpectralShiftDiff(m,n):  S = Re[F (P(m,n) − P(m,n)ᵀ) F⁻¹].
//   SpectralTransposeDiff:   S = Re[F − Fᵀ], with Fᵀ[x](k) = F[x](−k mod (H,W)).
// All three satisfy ⟨x, Sy⟩ = −⟨Sx, y⟩. The two spectral kinds are zero maps
// on real inputs — F diagonalizes the shift pair with purely imaginary
// spectrum, and reversal conjugates the DFT of a real field — so they
// exercise the solenoidal plumbing without perturbing the dynamics; the
// formulas are evaluated as written rather than shortcut to zero.
struct SkewOperator {
  enum class Kind { ShiftDiff, SpectralShiftDiff, SpectralTransposeDiff };
  Kind kind = Kind::ShiftDiff;
  int shift_h = 0;
  int shift_w = 0;
};

SkewOperator shift_diff(int m, int n);
SkewOperator spectral_shift_diff(int m, int n);
SkewOperator spectral_transpose_diff();

Field apply_skew(const SkewOperator& s, const Field& x);

}  // namespace pds
