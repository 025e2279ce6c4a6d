#include "kaclab/kac_walk.hpp"

#include <cmath>
#include <sstream>

#include "kaclab/error.hpp"
#include "kaclab/stats.hpp"

#include <algorithm>
#include <numbers>

namespace kac {

namespace {

void check_on_sphere(double energy, std::size_t n, const char* what) {
  const double target = static_cast<double>(n);
  if (std::abs(energy - target) > 1e-9 * target) {
    std::ostringstream os;
    os.precision(17);
    os << what << ": sum of squares is " << energy << ", expected " << target;
    throw ValidationError(os.str());
  }
}

inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

template <class Ensemble, class Kernel, class Step>
std::uint64_t evolve_impl(Ensemble& e, JumpClock& clock, double duration, const Kernel& k, Rng& rng, Step step) {
  require(duration >= 0.0, "evolve: negative time");
  require(e.size() >= 2, "evolve: need at least two particles");
  const double rate = static_cast<double>(e.size());
  std::uint64_t count = 0;
  double s = rng.exponential(rate);
  while (s <= duration) {
    step(e, k, rng);
    ++count;
    s += rng.exponential(rate);
  }
  clock.t += duration;
  clock.collisions += count;
  return count;
}

template <class Ensemble, class Kernel>
ReplicaMatrix run_replicas_impl(const Ensemble& e0, const Observable<Ensemble>& obs, std::span<const double> times,
                                std::size_t replicas, const Kernel& k, StreamKey key, Exec exec) {
  require(!times.empty(), "observable_trace: empty time list");
  require(replicas >= 1, "observable_trace: need at least one replica");
  require(times.front() >= 0.0, "observable_trace: negative time");
  for (std::size_t i = 1; i < times.size(); ++i) require(times[i] >= times[i - 1], "observable_trace: times must ascend");

  ReplicaMatrix m;
  m.replicas = replicas;
  m.times.assign(times.begin(), times.end());
  const std::size_t nt = times.size();
  m.values.assign(replicas * nt, 0.0);
  m.collisions.assign(replicas * nt, 0.0);
  for_each_index(exec, replicas, [&](std::size_t r) {
    Rng rng(key, static_cast<std::uint32_t>(r));
    Ensemble e = e0;
    JumpClock clock;
    double now = 0.0;
    for (std::size_t ti = 0; ti < nt; ++ti) {
      evolve(e, clock, times[ti] - now, k, rng);
      now = times[ti];
      m.values[r * nt + ti] = obs(e);
      m.collisions[r * nt + ti] = static_cast<double>(clock.collisions);
    }
  });
  return m;
}

}  // namespace

Ensemble1D::Ensemble1D(std::vector<double> velocities) : v(std::move(velocities)) {
  check_on_sphere(energy(), v.size(), "Ensemble1D");
}

Ensemble1D Ensemble1D::projected(std::vector<double> velocities) {
  Ensemble1D e;
  e.v = std::move(velocities);
  require(e.energy() > 0.0, "Ensemble1D: zero velocity vector");
  e.reproject();
  return e;
}

double Ensemble1D::energy() const {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

void Ensemble1D::reproject() {
  const double scale = std::sqrt(static_cast<double>(v.size()) / energy());
  for (double& x : v) x *= scale;
  since_projection = 0;
}

Ensemble3D::Ensemble3D(std::vector<Vec3> velocities) : v(std::move(velocities)) {
  check_on_sphere(energy(), v.size(), "Ensemble3D");
  const Vec3 p = momentum();
  const double tol = 1e-9 * std::sqrt(static_cast<double>(v.size()));
  for (double c : p) require(std::abs(c) <= tol, "Ensemble3D: total momentum must vanish");
}

Ensemble3D Ensemble3D::projected(std::vector<Vec3> velocities) {
  Ensemble3D e;
  e.v = std::move(velocities);
  e.reproject();
  require(std::isfinite(e.energy()), "Ensemble3D: degenerate velocities");
  return e;
}

double Ensemble3D::energy() const {
  double s = 0.0;
  for (const Vec3& x : v) s += dot(x, x);
  return s;
}

Vec3 Ensemble3D::momentum() const {
  Vec3 p{0.0, 0.0, 0.0};
  for (const Vec3& x : v)
    for (int a = 0; a < 3; ++a) p[a] += x[a];
  return p;
}

void Ensemble3D::reproject() {
  Vec3 p = momentum();
  const double n = static_cast<double>(v.size());
  for (Vec3& x : v)
    for (int a = 0; a < 3; ++a) x[a] -= p[a] / n;
  const double en = energy();
  require(en > 0.0, "Ensemble3D: zero relative velocities");
  const double scale = std::sqrt(n / en);
  for (Vec3& x : v)
    for (double& c : x) c *= scale;
  since_projection = 0;
}

void apply_rotation(std::span<double> v, std::size_t i, std::size_t j, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  const double vi = v[i], vj = v[j];
  v[i] = vi * c - vj * s;
  v[j] = vi * s + vj * c;
}

std::pair<std::size_t, std::size_t> sample_pair(std::size_t n, Rng& rng) {
  const std::size_t i = rng.index(n);
  std::size_t j = rng.index(n - 1);
  if (j >= i) ++j;
  return {i, j};
}

void kac_step(Ensemble1D& e, const ScatteringDensity& rho, Rng& rng) {
  if (e.size() < 2) throw ValidationError("kac_step: need at least two particles");
  const auto [i, j] = sample_pair(e.size(), rng);
  apply_rotation(e.v, i, j, rho.sample(rng));
  if (++e.since_projection >= kReprojectEvery) e.reproject();
}

void apply_collision_3d(Ensemble3D& e, std::size_t i, std::size_t j, const Vec3& w) {
  Vec3& a = e.v[i];
  Vec3& b = e.v[j];
  const Vec3 d{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
  const double g = std::sqrt(dot(d, d));
  for (int k = 0; k < 3; ++k) {
    const double mid = 0.5 * (a[k] + b[k]);
    a[k] = mid + 0.5 * g * w[k];
    b[k] = mid - 0.5 * g * w[k];
  }
}

Vec3 sample_direction(const Vec3& e, const AngularKernel3D& b, Rng& rng) {
  // Complete e to an orthonormal frame using the axis least aligned with it.
  int axis = 0;
  if (std::abs(e[1]) < std::abs(e[axis])) axis = 1;
  if (std::abs(e[2]) < std::abs(e[axis])) axis = 2;
  Vec3 t{0.0, 0.0, 0.0};
  t[axis] = 1.0;
  const double te = dot(t, e);
  Vec3 u{t[0] - te * e[0], t[1] - te * e[1], t[2] - te * e[2]};
  const double un = std::sqrt(dot(u, u));
  for (double& c : u) c /= un;
  const Vec3 w2{e[1] * u[2] - e[2] * u[1], e[2] * u[0] - e[0] * u[2], e[0] * u[1] - e[1] * u[0]};

  const double c = b.sample_cosine(rng);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  const double cp = std::cos(phi), sp = std::sin(phi);
  return {c * e[0] + s * (cp * u[0] + sp * w2[0]), c * e[1] + s * (cp * u[1] + sp * w2[1]),
          c * e[2] + s * (cp * u[2] + sp * w2[2])};
}

bool kac_step_3d(Ensemble3D& e, const AngularKernel3D& b, Rng& rng) {
  if (e.size() < 2) throw ValidationError("kac_step_3d: need at least two particles");
  for (int attempt = 0; attempt < 100; ++attempt) {
    const auto [i, j] = sample_pair(e.size(), rng);
    const Vec3& a = e.v[i];
    const Vec3& c = e.v[j];
    const Vec3 d{a[0] - c[0], a[1] - c[1], a[2] - c[2]};
    const double g = std::sqrt(dot(d, d));
    if (!(g > 0.0)) continue;
    const Vec3 ehat{d[0] / g, d[1] / g, d[2] / g};
    apply_collision_3d(e, i, j, sample_direction(ehat, b, rng));
    if (++e.since_projection >= kReprojectEvery) e.reproject();
    return true;
  }
  ++e.null_collisions;
  return false;
}

std::uint64_t evolve(Ensemble1D& e, JumpClock& clock, double duration, const ScatteringDensity& rho, Rng& rng) {
  return evolve_impl(e, clock, duration, rho, rng,
                     [](Ensemble1D& x, const ScatteringDensity& k, Rng& r) { kac_step(x, k, r); });
}

std::uint64_t evolve(Ensemble3D& e, JumpClock& clock, double duration, const AngularKernel3D& b, Rng& rng) {
  return evolve_impl(e, clock, duration, b, rng,
                     [](Ensemble3D& x, const AngularKernel3D& k, Rng& r) { kac_step_3d(x, k, r); });
}

ReplicaMatrix run_replicas(const Ensemble1D& e0, const Observable<Ensemble1D>& obs, std::span<const double> times,
                           std::size_t replicas, const ScatteringDensity& rho, StreamKey key, Exec exec) {
  return run_replicas_impl(e0, obs, times, replicas, rho, key, exec);
}

ReplicaMatrix run_replicas(const Ensemble3D& e0, const Observable<Ensemble3D>& obs, std::span<const double> times,
                           std::size_t replicas, const AngularKernel3D& b, StreamKey key, Exec exec) {
  return run_replicas_impl(e0, obs, times, replicas, b, key, exec);
}

Trace reduce_trace(const ReplicaMatrix& m) {
  const std::size_t nt = m.times.size();
  Trace tr;
  tr.times = m.times;
  tr.mean.resize(nt);
  tr.stderr_.resize(nt);
  tr.collisions_mean.resize(nt);
  tr.collisions_var.resize(nt);
  std::vector<double> col(m.replicas), cnt(m.replicas);
  for (std::size_t k = 0; k < nt; ++k) {
    for (std::size_t r = 0; r < m.replicas; ++r) {
      col[r] = m.values[r * nt + k];
      cnt[r] = m.collisions[r * nt + k];
    }
    const Estimate est = mean_stderr(col);
    tr.mean[k] = est.value;
    tr.stderr_[k] = est.stderr_;
    tr.collisions_mean[k] = mean_stderr(cnt).value;
    tr.collisions_var[k] = sample_variance(cnt);
  }
  return tr;
}

Trace observable_trace(const Ensemble1D& e0, const Observable<Ensemble1D>& obs, std::span<const double> times,
                       std::size_t replicas, const ScatteringDensity& rho, StreamKey key, Exec exec) {
  return reduce_trace(run_replicas(e0, obs, times, replicas, rho, key, exec));
}

Trace observable_trace(const Ensemble3D& e0, const Observable<Ensemble3D>& obs, std::span<const double> times,
                       std::size_t replicas, const AngularKernel3D& b, StreamKey key, Exec exec) {
  return reduce_trace(run_replicas(e0, obs, times, replicas, b, key, exec));
}

}  // namespace kac
