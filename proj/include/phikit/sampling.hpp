// Deterministic sampling for property checks.  Uniform deviates are built from
// raw mt19937_64 output so the same seed gives the same samples on every
// platform (std::uniform_real_distribution is implementation-defined).
#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "phikit/birealisation.hpp"
#include "phikit/fields.hpp"

namespace phikit {

class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  // Components with magnitude in [lo, hi] and random sign.
  Vec state(int n, double lo = 0.25, double hi = 2.0);
  // Uniform direction, norm uniform in [0, max_norm].
  Vec ball(int n, double max_norm);

 private:
  std::mt19937_64 gen_;
};

std::vector<Vec> sample_states(int n, int count, std::uint64_t seed);
std::vector<FiberSample> sample_fibers(int n, int count, std::uint64_t seed,
                                       double max_fiber_norm = 0.1);

}  // namespace phikit
