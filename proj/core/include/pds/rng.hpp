#pragma once

#include <cstdint>
#include <random>

#include "pds/grid.hpp"

namespace pds {

// Deterministic random source. mt19937_64 plus a hand-rolled Box–Muller keeps
// every stream bit-reproducible across platforms (std::normal_distribution is
// implementation-defined). Per-chain streams are derived from a master seed by
// a counter construction, so a chain's stream depends only on (seed, index) —
// never on how many sibling chains exist.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  static Rng for_chain(std::uint64_t master_seed, std::uint64_t chain_index);

  std::uint64_t next_u64() { return gen_(); }
  double uniform01();  // [0, 1)
  double normal();     // N(0, 1)
  Field normal_field(const GridShape& shape);

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace pds
