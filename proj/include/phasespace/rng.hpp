#pragma once

#include <cstdint>
#include <span>

namespace phasespace {

/// Counter-based random stream. Output i of a stream is a bijective 64-bit
/// mix of (key, i), so a stream is 16 bytes of state, can be created for any
/// trajectory index without touching other streams, and never depends on the
/// order in which trajectories are processed.
class NoiseStream {
 public:
  using result_type = std::uint64_t;

  NoiseStream() = default;
  NoiseStream(std::uint64_t master_seed, std::uint64_t stream_index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  /// Uniform in the open interval (0, 1).
  double uniform();

  /// Fills `out` with independent zero-mean normal samples of the given
  /// standard deviation (Box-Muller; pairs are never cached across calls).
  void normal(std::span<double> out, double stddev);

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace phasespace
