#pragma once

#include <cstdint>
#include <string_view>

namespace biym {

// Counter-based generator: every draw is a pure function of (seed, tag,
// counter), so independent streams can be split off without coupling and
// the bit stream is identical across platforms.
class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view tag);

  std::uint64_t next_u64();
  double next_unit();                       // [0, 1)
  double next_in(double lo, double hi);     // [lo, hi)
  double next_symmetric(double amplitude);  // [-amplitude, amplitude]

  Rng split(std::string_view tag) const;
  Rng split(std::uint64_t index) const;

 private:
  explicit Rng(std::uint64_t key) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace biym
