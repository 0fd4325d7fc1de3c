#include "mfbai/rng.hpp"

#include <cmath>
#include <numbers>

namespace mfbai {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return z;
}

}  // namespace

CounterRng CounterRng::for_stream(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t key = mix64(mix64(seed + kGolden) ^ (stream * kGolden + 1));
  return CounterRng(key);
}

std::uint64_t CounterRng::next_u64() {
  std::uint64_t z = key_ ^ (counter_ * kGolden + kGolden);
  ++counter_;
  return mix64(z);
}

double CounterRng::next_unit() {
  // 53-bit mantissa, shifted off zero so log() stays finite.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_gaussian(double mean, double sigma2) {
  double u1 = next_unit();
  double u2 = next_unit();
  double r = std::sqrt(-2.0 * std::log(u1));
  double z = r * std::cos(2.0 * std::numbers::pi * u2);
  return mean + std::sqrt(sigma2) * z;
}

bool CounterRng::next_bernoulli(double p) { return next_unit() < p; }

}  // namespace mfbai
