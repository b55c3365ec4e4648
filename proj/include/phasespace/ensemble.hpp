#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "phasespace/common.hpp"
#include "phasespace/rng.hpp"

namespace phasespace {

/// One bosonic positive-P (or Wigner) trajectory: ket amplitudes alpha and
/// bra amplitudes beta, stored back to back, plus the complex log-weight.
struct PhasePoint {
  std::vector<Complex> state;  // alpha[0..M) then beta[0..M)
  Complex log_weight{0.0, 0.0};
  bool alive = true;
  std::int64_t died_at_step = -1;

  PhasePoint() = default;
  PhasePoint(std::span<const Complex> alpha, std::span<const Complex> beta);

  /// Classical-diagonal point: beta = conj(alpha).
  static PhasePoint coherent(std::span<const Complex> alpha);

  std::size_t modes() const { return state.size() / 2; }
  std::span<Complex> alpha() { return {state.data(), modes()}; }
  std::span<const Complex> alpha() const { return {state.data(), modes()}; }
  std::span<Complex> beta() { return {state.data() + modes(), modes()}; }
  std::span<const Complex> beta() const { return {state.data() + modes(), modes()}; }
};

enum class Spin { up, down };

/// One number-conserving fermionic Gaussian trajectory: the spin-up and
/// spin-down normal Green's functions n_ij = <a_i^dag a_j> (row-major M x M,
/// up block first) and a real log-weight.
struct FermiPoint {
  std::size_t sites = 0;
  std::vector<Complex> state;
  double log_weight = 0.0;
  bool alive = true;
  std::int64_t died_at_step = -1;

  FermiPoint() = default;
  explicit FermiPoint(std::size_t m) : sites(m), state(2 * m * m) {}

  std::span<Complex> green(Spin s) {
    return {state.data() + (s == Spin::up ? 0 : sites * sites), sites * sites};
  }
  std::span<const Complex> green(Spin s) const {
    return {state.data() + (s == Spin::up ? 0 : sites * sites), sites * sites};
  }
  Complex& n(Spin s, std::size_t i, std::size_t j) { return green(s)[i * sites + j]; }
  Complex n(Spin s, std::size_t i, std::size_t j) const { return green(s)[i * sites + j]; }
};

inline Complex log_weight_of(const PhasePoint& p) { return p.log_weight; }
inline Complex log_weight_of(const FermiPoint& p) { return {p.log_weight, 0.0}; }

/// Trajectories in a fixed order, each with a private noise stream derived
/// from (master_seed, index). Dead trajectories stay in place.
template <class Point>
struct Ensemble {
  std::vector<Point> points;
  std::uint64_t master_seed = 0;
  std::vector<NoiseStream> streams;
  std::size_t step_index = 0;
  double time = 0.0;

  Ensemble() = default;
  Ensemble(std::vector<Point> pts, std::uint64_t seed)
      : points(std::move(pts)), master_seed(seed) {
    streams.reserve(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) streams.emplace_back(seed, k);
  }

  std::size_t trajectory_count() const { return points.size(); }

  std::size_t alive_count() const {
    std::size_t n = 0;
    for (const auto& p : points) n += p.alive ? 1 : 0;
    return n;
  }
};

/// `count` independent N(0, variance) samples from trajectory `traj`'s
/// stream. Advances the stream.
template <class Point>
std::vector<double> derive_noise(Ensemble<Point>& ensemble, std::size_t traj,
                                 std::size_t count, double variance);

}  // namespace phasespace
