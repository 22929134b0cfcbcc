#pragma once

#include <cstdint>
#include <random>

namespace pcn {

/// Portable seeded generator: "pcn-mt64 v1".
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Derived streams are seeded through std::seed_seq with the words
/// (seed lo, seed hi, stream lo, stream hi), which is also fully specified.
/// Bounded integers use rejection on raw 64-bit draws and reals use the top
/// 53 bits, so no implementation-defined distribution is involved and
/// sequences are bit-identical across standard libraries.
class Rng {
 public:
  static constexpr const char* kName = "pcn-mt64";
  static constexpr int kVersion = 1;

  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Independent generator for sub-stream i of the same master seed.
  Rng split(std::uint64_t i) const { return Rng(seed_, stream_ * 0x9E3779B97F4A7C15ULL + i + 1); }

  std::uint64_t next() { return engine_(); }
  /// Uniform integer in [0, bound). bound must be positive.
  std::uint64_t below(std::uint64_t bound);
  /// Uniform integer in [lo, hi].
  std::int64_t between(std::int64_t lo, std::int64_t hi);
  /// Uniform real in [0, 1).
  double unit();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace pcn
