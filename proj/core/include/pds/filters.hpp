#pragma once

#include <vector>

#include "pds/grid.hpp"

namespace pds {

// Circular low-frequency mask: 1 inside a radius around the spectrum center,
// a constant gain outside. Strictly positive gains keep the operator built
// from the filter invertible.
struct ParametricFilterSpec {
  double radius = 0.0;
  double outer_gain = 1.0;
};

// Data-driven frequency filter; alpha ≥ 1 compresses the normalized
// frequency statistics into [1 − 1/alpha, 1].
struct StatisticalFilterSpec {
  double alpha = 1.0;
};

// All frequency filters are returned in centered layout: the DC bin sits at
// (⌊H/2⌋, ⌊W/2⌋), matching how the masks are defined geometrically. Consumers
// that need the unshifted layout apply ifftshift.

// R[c,h,w] = 1 where (h − H/2)² + (w − W/2)² ≤ 2·radius², else outer_gain.
Field build_parametric_r(const GridShape& shape, const ParametricFilterSpec& spec);

// Per-bin statistics raw = log(1 + mean over samples of |F[x]|²), then
// R = (raw/max(raw) − 1)/alpha + 1, so the strongest bin is exactly 1 and the
// weakest possible bin is 1 − 1/alpha.
Field build_statistical_r(const std::vector<Field>& samples, const StatisticalFilterSpec& spec);

// Per-pixel statistics A = log(1 + mean over samples of x), normalized so
// max(A) = 1; entries below 1e-6 are clamped up to keep the filter invertible.
// Samples must be nonnegative (pixel intensities).
Field build_space_a(const std::vector<Field>& samples);

// All-ones space filter (no spatial preconditioning).
Field uniform_a(const GridShape& shape);

}  // namespace pds
