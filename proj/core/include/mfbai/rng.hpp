#pragma once

#include <cstdint>

namespace mfbai {

// Counter-based pseudo-random generator. Every output is a pure function of
// (key, counter), so independent streams for parallel trials are derived by
// key splitting instead of shared mutable state. The mixing function is the
// splitmix64 finalizer applied to key ^ golden-ratio-weighted counter.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  // Derives the key for a sub-stream, e.g. for_stream(seed, trial_index).
  static CounterRng for_stream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();

  // Uniform in the open interval (0, 1); never returns an exact endpoint.
  double next_unit();

  // Box-Muller; consumes two words per call.
  double next_gaussian(double mean, double sigma2);

  bool next_bernoulli(double p);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace mfbai
