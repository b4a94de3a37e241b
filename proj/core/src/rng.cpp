#include "pds/rng.hpp"

#include <cmath>
#include <numbers>

namespace pds {

namespace {

// splitmix64 finalizer; decorrelates consecutive seed material.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed) {
  std::uint64_t s = seed;
  std::seed_seq seq{
      static_cast<std::uint32_t>(mix64(s += 0x9E3779B97F4A7C15ull)),
      static_cast<std::uint32_t>(mix64(s) >> 32),
      static_cast<std::uint32_t>(mix64(s += 0x9E3779B97F4A7C15ull)),
      static_cast<std::uint32_t>(mix64(s) >> 32),
      static_cast<std::uint32_t>(mix64(s += 0x9E3779B97F4A7C15ull)),
      static_cast<std::uint32_t>(mix64(s) >> 32),
      static_cast<std::uint32_t>(mix64(s += 0x9E3779B97F4A7C15ull)),
      static_cast<std::uint32_t>(mix64(s) >> 32),
  };
  return std::mt19937_64(seq);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : gen_(make_engine(seed)) {}

Rng Rng::for_chain(std::uint64_t master_seed, std::uint64_t chain_index) {
  return Rng(mix64(master_seed + 0x9E3779B97F4A7C15ull * (chain_index + 1)));
}

double Rng::uniform01() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box–Muller; 1−u ∈ (0, 1] keeps the log argument positive.
  const double u = uniform01();
  const double v = uniform01();
  const double r = std::sqrt(-2.0 * std::log1p(-u));
  const double theta = 2.0 * std::numbers::pi * v;
  spare_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

Field Rng::normal_field(const GridShape& shape) {
  Field out(shape);
  for (std::int64_t i = 0; i < out.size(); ++i) out[i] = normal();
  return out;
}

}  // namespace pds
