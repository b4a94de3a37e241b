#include "pds/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "pds/rng.hpp"

namespace pds {

namespace {

// Process-wide FFTW plan cache. Plan creation is not thread-safe, so it is
// guarded; fftw_execute_dft on distinct buffers is re-entrant, so cached plans
// can be shared across sampling threads. FFTW_UNALIGNED keeps the plans valid
// for whatever buffers std::vector hands us; plans live for the process.
class PlanCache {
 public:
  fftw_plan get(int h, int w, int sign) {
    std::lock_guard<std::mutex> lock(mu_);
    const auto key = std::make_tuple(h, w, sign);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second;
    std::vector<std::complex<double>> in(static_cast<std::size_t>(h) * w);
    std::vector<std::complex<double>> out(in.size());
    fftw_plan p = fftw_plan_dft_2d(h, w, reinterpret_cast<fftw_complex*>(in.data()),
                                   reinterpret_cast<fftw_complex*>(out.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (p == nullptr) throw std::runtime_error("fft2: plan creation failed");
    plans_.emplace(key, p);
    return p;
  }

 private:
  std::mutex mu_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

// Out-of-place c2c transform of each channel; |scale| is applied to the output.
SpectralField transform(const SpectralField& x, int sign, double scale) {
  const GridShape shape = x.shape();
  const std::int64_t hw = static_cast<std::int64_t>(shape.height) * shape.width;
  fftw_plan plan = plan_cache().get(shape.height, shape.width, sign);
  SpectralField out(shape);
  for (int c = 0; c < shape.channels; ++c) {
    // Out-of-place c2c execution leaves the input untouched.
    auto* in_ptr = const_cast<std::complex<double>*>(x.data().data()) + c * hw;
    auto* out_ptr = out.data().data() + c * hw;
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in_ptr),
                     reinterpret_cast<fftw_complex*>(out_ptr));
  }
  if (scale != 1.0) {
    for (std::int64_t i = 0; i < out.size(); ++i) out[i] *= scale;
  }
  return out;
}

int mod(int a, int m) {
  const int r = a % m;
  return r < 0 ? r + m : r;
}

template <typename FieldT>
FieldT roll_impl(const FieldT& x, int m, int n) {
  const GridShape s = x.shape();
  FieldT out(s);
  const int mh = mod(m, s.height);
  const int nw = mod(n, s.width);
  for (int c = 0; c < s.channels; ++c) {
    for (int h = 0; h < s.height; ++h) {
      const int src_h = mod(h - mh, s.height);
      for (int w = 0; w < s.width; ++w) {
        out.at(c, h, w) = x.at(c, src_h, mod(w - nw, s.width));
      }
    }
  }
  return out;
}

}  // namespace

SpectralField fft2(const Field& x) { return transform(to_spectral(x), FFTW_FORWARD, 1.0); }

SpectralField fft2(const SpectralField& x) { return transform(x, FFTW_FORWARD, 1.0); }

SpectralField ifft2(const SpectralField& s) {
  const double scale = 1.0 / (static_cast<double>(s.height()) * s.width());
  return transform(s, FFTW_BACKWARD, scale);
}

Field ifft2_real(const SpectralField& s) { return real_part(ifft2(s)); }

Field roll(const Field& x, int m, int n) { return roll_impl(x, m, n); }
SpectralField roll(const SpectralField& x, int m, int n) { return roll_impl(x, m, n); }

Field fftshift(const Field& x) { return roll(x, x.height() / 2, x.width() / 2); }
Field ifftshift(const Field& x) { return roll(x, -(x.height() / 2), -(x.width() / 2)); }
SpectralField fftshift(const SpectralField& x) { return roll(x, x.height() / 2, x.width() / 2); }
SpectralField ifftshift(const SpectralField& x) {
  return roll(x, -(x.height() / 2), -(x.width() / 2));
}

OrthogonalMap::OrthogonalMap(Eigen::MatrixXd matrix) : b_(std::move(matrix)) {
  if (b_.rows() < 1 || b_.rows() != b_.cols()) {
    throw std::invalid_argument("orthogonal map must be square and non-empty");
  }
  const Eigen::MatrixXd gram = b_.transpose() * b_;
  const double defect =
      (gram - Eigen::MatrixXd::Identity(b_.rows(), b_.cols())).norm();
  if (!(defect <= 1e-10)) {
    throw std::invalid_argument("matrix is not orthogonal (BᵀB − I Frobenius defect " +
                                std::to_string(defect) + ")");
  }
}

std::vector<double> apply_orthogonal(const OrthogonalMap& b, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != b.dimension()) {
    throw std::invalid_argument("apply_orthogonal: vector length " + std::to_string(x.size()) +
                                " does not match dimension " + std::to_string(b.dimension()));
  }
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd y = b.matrix() * xv;
  return std::vector<double>(y.data(), y.data() + y.size());
}

Field apply_orthogonal(const OrthogonalMap& b, const Field& x) {
  if (x.size() != b.dimension()) {
    throw std::invalid_argument("apply_orthogonal: field size " + std::to_string(x.size()) +
                                " does not match dimension " + std::to_string(b.dimension()));
  }
  Field out(x.shape());
  const Eigen::Map<const Eigen::VectorXd> xv(x.data().data(), x.size());
  Eigen::Map<Eigen::VectorXd>(out.data().data(), out.size()) = b.matrix() * xv;
  return out;
}

OrthogonalMap random_orthogonal(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_orthogonal: n must be >= 1");
  Rng rng(seed);
  Eigen::MatrixXd g(n, n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) g(i, j) = rng.normal();
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return OrthogonalMap(std::move(q));
}

}  // namespace pds
