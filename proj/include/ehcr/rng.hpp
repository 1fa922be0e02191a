#pragma once

#include <array>
#include <cstdint>

namespace ehcr {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3"). Stateless: output is a pure function of counter and key.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static constexpr const char* kAlgorithm = "philox4x32-10";

  static Counter block(Counter ctr, Key key);
};

/// Sequential view of one Philox stream. The key is the 64-bit seed, the
/// upper counter half is the stream id and the lower half the block index, so
/// (seed, stream, draw index) fully determines every value.
class CounterStream {
 public:
  using result_type = std::uint64_t;

  CounterStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t operator()();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Exponential with the given mean (inverse CDF).
  double exponential(double mean);

  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int used_ = 2;
};

}  // namespace ehcr
