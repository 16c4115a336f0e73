#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace dreg {

/// Philox4x64-10 block function (Salmon et al. counter-based generator).
/// Output depends only on (key, counter), so any replication can be
/// regenerated in isolation and in any order.
using Philox4x64Counter = std::array<std::uint64_t, 4>;
using Philox4x64Key = std::array<std::uint64_t, 2>;

Philox4x64Counter philox4x64(Philox4x64Counter counter, Philox4x64Key key) noexcept;

/// UniformRandomBitGenerator over one Philox stream. The 128-bit stream id
/// occupies the upper counter words, the block index the lower ones.
class StreamEngine {
 public:
  using result_type = std::uint64_t;

  StreamEngine(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0) noexcept
      : key_{seed, 0x5851F42D4C957F2Dull}, stream_{stream, substream} {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (pos_ == 4) refill();
    return buffer_[pos_++];
  }

  /// Uniform double on the open interval (0, 1) with 53 random bits.
  double uniform01() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  void refill() noexcept {
    buffer_ = philox4x64({block_, 0, stream_[0], stream_[1]}, key_);
    ++block_;
    pos_ = 0;
  }

  Philox4x64Key key_;
  std::array<std::uint64_t, 2> stream_;
  std::uint64_t block_ = 0;
  Philox4x64Counter buffer_{};
  int pos_ = 4;
};

/// Standard normal variate from an engine. Uses the Boost ziggurat, which is
/// specified bit-for-bit (unlike std::normal_distribution).
double standard_normal(StreamEngine& engine);

/// Standard logistic variate log(U / (1 - U)).
double standard_logistic(StreamEngine& engine);

/// Well-mixed 64-bit key derived from a parent seed and a label, used to give
/// independent subsystems (data, bootstrap, ...) their own key space.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) noexcept;

}  // namespace dreg
