#pragma once

#include <array>
#include <cstdint>

namespace ffint {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011). Stateless:
// every 128-bit counter/64-bit key pair maps to four independent 32-bit
// words, so draws are addressable by (seed; trajectory, step, draw index)
// and reproducible under any parallel schedule.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// One addressable draw site. Consecutive `index` values give independent
// variates within a (trajectory, step) cell.
struct DrawKey {
  std::uint64_t seed = 0;
  std::uint32_t trajectory = 0;
  std::uint32_t step = 0;
  std::uint32_t index = 0;
  std::uint32_t stream = 0;  // distinguishes consumers (path noise, tests, ...)
};

// Uniform on (0,1] with 53-bit resolution.
double uniform_double(const DrawKey& k);
// Standard normal via Box-Muller on one Philox block.
double gaussian_double(const DrawKey& k);

}  // namespace ffint
