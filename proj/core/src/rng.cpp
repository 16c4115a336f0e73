#include "dreg/rng.hpp"

#include <cmath>

#include <boost/random/normal_distribution.hpp>

namespace dreg {
namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
  const auto prod = static_cast<unsigned __int128>(a) * b;
  hi = static_cast<std::uint64_t>(prod >> 64);
  lo = static_cast<std::uint64_t>(prod);
}

}  // namespace

Philox4x64Counter philox4x64(Philox4x64Counter c, Philox4x64Key k) noexcept {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

double standard_normal(StreamEngine& engine) {
  boost::random::normal_distribution<double> dist;
  return dist(engine);
}

double standard_logistic(StreamEngine& engine) {
  const double u = engine.uniform01();
  return std::log(u) - std::log1p(-u);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t label) noexcept {
  const auto block = philox4x64({label, 0, 0, 0}, {seed, 0xA0761D6478BD642Full});
  return block[0];
}

}  // namespace dreg
