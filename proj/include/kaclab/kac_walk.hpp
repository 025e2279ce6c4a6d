#ifndef KACLAB_KAC_WALK_HPP
#define KACLAB_KAC_WALK_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kaclab/kernel3d.hpp"
#include "kaclab/parallel.hpp"
#include "kaclab/rng.hpp"
#include "kaclab/scattering.hpp"

namespace kac {

/// Collisions between energy re-projections.
inline constexpr std::uint64_t kReprojectEvery = 1'000'000;

/// N velocities on the sphere sum v_i^2 = N.
struct Ensemble1D {
  std::vector<double> v;
  std::uint64_t since_projection = 0;

  Ensemble1D() = default;
  /// Takes the velocities as given; they must lie on the sphere to 1e-9 relative.
  explicit Ensemble1D(std::vector<double> velocities);
  /// Rescales arbitrary non-zero velocities onto the sphere of radius sqrt(N).
  static Ensemble1D projected(std::vector<double> velocities);

  [[nodiscard]] std::size_t size() const { return v.size(); }
  [[nodiscard]] double energy() const;
  void reproject();
};

using Vec3 = std::array<double, 3>;

/// N three-dimensional velocities with sum |v_j|^2 = N and sum v_j = 0.
struct Ensemble3D {
  std::vector<Vec3> v;
  std::uint64_t since_projection = 0;
  std::uint64_t null_collisions = 0;

  Ensemble3D() = default;
  explicit Ensemble3D(std::vector<Vec3> velocities);
  /// Removes the mean velocity, then rescales onto the energy sphere.
  static Ensemble3D projected(std::vector<Vec3> velocities);

  [[nodiscard]] std::size_t size() const { return v.size(); }
  [[nodiscard]] double energy() const;
  [[nodiscard]] Vec3 momentum() const;
  void reproject();
};

/// Poisson clock of the master equation, rate N (lambda = 1).
struct JumpClock {
  double t = 0.0;
  std::uint64_t collisions = 0;
};

/// Rotates (v_i, v_j) by theta: (v_i cos - v_j sin, v_i sin + v_j cos).
void apply_rotation(std::span<double> v, std::size_t i, std::size_t j, double theta);

/// Uniform unordered pair i != j.
std::pair<std::size_t, std::size_t> sample_pair(std::size_t n, Rng& rng);

/// One Kac collision: uniform pair, angle from rho.
void kac_step(Ensemble1D& e, const ScatteringDensity& rho, Rng& rng);

/// Applies the three-dimensional collision law with outgoing direction w.
void apply_collision_3d(Ensemble3D& e, std::size_t i, std::size_t j, const Vec3& w);

/// Unit vector w with w.e distributed per B and uniform azimuth about e.
Vec3 sample_direction(const Vec3& e, const AngularKernel3D& b, Rng& rng);

/// One three-dimensional collision. Returns false for a null collision (no
/// non-degenerate pair found in 100 attempts).
bool kac_step_3d(Ensemble3D& e, const AngularKernel3D& b, Rng& rng);

/// Runs the Poissonized walk for `duration`: exponential waiting times of
/// rate N, so the number of collisions is Poisson(N * duration).
std::uint64_t evolve(Ensemble1D& e, JumpClock& clock, double duration, const ScatteringDensity& rho, Rng& rng);
std::uint64_t evolve(Ensemble3D& e, JumpClock& clock, double duration, const AngularKernel3D& b, Rng& rng);

/// Replica means of an observable at ascending times.
struct Trace {
  std::vector<double> times;
  std::vector<double> mean;
  std::vector<double> stderr_;
  std::vector<double> collisions_mean;
  std::vector<double> collisions_var;
};

template <class Ensemble>
using Observable = std::function<double(const Ensemble&)>;

/// Per-replica values: `values[r * times.size() + k]` is the observable of
/// replica r at times[k]; `collisions` has the same layout.
struct ReplicaMatrix {
  std::size_t replicas = 0;
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> collisions;
};

ReplicaMatrix run_replicas(const Ensemble1D& e0, const Observable<Ensemble1D>& obs, std::span<const double> times,
                           std::size_t replicas, const ScatteringDensity& rho, StreamKey key, Exec exec);
ReplicaMatrix run_replicas(const Ensemble3D& e0, const Observable<Ensemble3D>& obs, std::span<const double> times,
                           std::size_t replicas, const AngularKernel3D& b, StreamKey key, Exec exec);

/// Reduces a replica matrix in replica order.
Trace reduce_trace(const ReplicaMatrix& m);

Trace observable_trace(const Ensemble1D& e0, const Observable<Ensemble1D>& obs, std::span<const double> times,
                       std::size_t replicas, const ScatteringDensity& rho, StreamKey key, Exec exec = Exec::parallel);
Trace observable_trace(const Ensemble3D& e0, const Observable<Ensemble3D>& obs, std::span<const double> times,
                       std::size_t replicas, const AngularKernel3D& b, StreamKey key, Exec exec = Exec::parallel);

}  // namespace kac

#endif
