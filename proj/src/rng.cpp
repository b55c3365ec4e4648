#include "phasespace/rng.hpp"

#include <cmath>
#include <numbers>

namespace phasespace {
namespace {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

}  // namespace

NoiseStream::NoiseStream(std::uint64_t master_seed, std::uint64_t stream_index)
    : key_(mix64(mix64(master_seed ^ 0x6a09e667f3bcc909ULL) + kGamma * (stream_index + 1))) {}

NoiseStream::result_type NoiseStream::operator()() {
  ++counter_;
  return mix64(mix64(key_ + kGamma * counter_) ^ key_);
}

double NoiseStream::uniform() {
  // 53 random bits, shifted off zero.
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

void NoiseStream::normal(std::span<double> out, double stddev) {
  std::size_t i = 0;
  for (; i + 1 < out.size(); i += 2) {
    const double r = stddev * std::sqrt(-2.0 * std::log(uniform()));
    const double phi = 2.0 * std::numbers::pi * uniform();
    out[i] = r * std::cos(phi);
    out[i + 1] = r * std::sin(phi);
  }
  if (i < out.size()) {
    const double r = stddev * std::sqrt(-2.0 * std::log(uniform()));
    out[i] = r * std::cos(2.0 * std::numbers::pi * uniform());
  }
}

}  // namespace phasespace
