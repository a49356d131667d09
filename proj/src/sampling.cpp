#include "phikit/sampling.hpp"

#include <cmath>

namespace phikit {

Vec SampleRng::state(int n, double lo, double hi) {
  Vec x(n);
  for (int i = 0; i < n; ++i) {
    const double mag = uniform(lo, hi);
    x[i] = uniform() < 0.5 ? -mag : mag;
  }
  return x;
}

Vec SampleRng::ball(int n, double max_norm) {
  // Direction from a normalised vector of centred uniforms; rejection keeps it
  // isotropic without needing a Gaussian sampler.
  Vec d(n);
  double r2 = 0.0;
  do {
    for (int i = 0; i < n; ++i) d[i] = uniform(-1.0, 1.0);
    r2 = d.squaredNorm();
  } while (r2 > 1.0 || r2 < 1e-12);
  return d / std::sqrt(r2) * uniform(0.0, max_norm);
}

std::vector<Vec> sample_states(int n, int count, std::uint64_t seed) {
  SampleRng rng(seed);
  std::vector<Vec> out;
  for (int i = 0; i < count; ++i) out.push_back(rng.state(n));
  return out;
}

std::vector<FiberSample> sample_fibers(int n, int count, std::uint64_t seed,
                                       double max_fiber_norm) {
  SampleRng rng(seed);
  std::vector<FiberSample> out;
  for (int i = 0; i < count; ++i) {
    Vec x = rng.state(n);
    Vec p = rng.ball(n, max_fiber_norm);
    out.push_back({std::move(x), std::move(p)});
  }
  return out;
}

}  // namespace phikit
