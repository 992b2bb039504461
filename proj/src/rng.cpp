#include "ffint/rng.hpp"

#include <cmath>

namespace ffint {

namespace {

constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;
constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;

inline void round_once(std::array<std::uint32_t, 4>& c, const std::array<std::uint32_t, 2>& k) {
  std::uint64_t p0 = std::uint64_t(kMulA) * c[0];
  std::uint64_t p1 = std::uint64_t(kMulB) * c[2];
  std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
  std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline std::array<std::uint32_t, 4> block(const DrawKey& k) {
  return philox4x32({k.trajectory, k.step, k.index, k.stream},
                    {std::uint32_t(k.seed), std::uint32_t(k.seed >> 32)});
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  std::uint64_t bits = (std::uint64_t(hi) << 32) | lo;
  return (double((bits >> 11) + 1)) * 0x1.0p-53;  // (0,1]
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    round_once(counter, key);
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return counter;
}

double uniform_double(const DrawKey& k) {
  auto b = block(k);
  return to_unit(b[0], b[1]);
}

double gaussian_double(const DrawKey& k) {
  auto b = block(k);
  double u1 = to_unit(b[0], b[1]);
  double u2 = to_unit(b[2], b[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace ffint
