#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace zmpl {

/// Stream-splittable seeding. Every replicate and bootstrap draw gets its own
/// engine whose seed is a hash of (base seed, path of indices), so results do
/// not depend on the order in which replicates are executed.
std::uint64_t splitmix64(std::uint64_t x);

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

class Rng {
 public:
  using engine_type = std::mt19937_64;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng stream(std::uint64_t base, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(base, path));
  }

  // Uniform on the open interval (0, 1) with 53 bits of resolution.
  double uniform_open();

  engine_type& engine() { return engine_; }

 private:
  engine_type engine_;
};

}  // namespace zmpl
