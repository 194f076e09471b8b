#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace rlflow {

// Seeded random source: the 64-bit Mersenne Twister (whose output sequence is
// fixed by the C++ standard) with every distribution transform implemented
// here rather than taken from <random>, so draws do not depend on the
// standard library vendor.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  // (0, 1)
  double uniform_open();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  bool bernoulli(double p) { return uniform() < p; }
  double gamma(double shape, double scale);
  long long poisson(double mean);
  // NB2: Poisson with a Gamma(1/alpha, alpha*mean) rate.
  long long negative_binomial(double mean, double alpha);
  std::vector<double> dirichlet(std::span<const double> concentration);
  // Index drawn with probability proportional to non-negative weights.
  std::size_t categorical(std::span<const double> weights);

  // Independent child stream; derived from this stream's seed material only
  // through `stream_id`, not through how many draws were taken.
  static Rng derive(std::uint64_t seed, std::uint64_t stream_id);

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace rlflow
