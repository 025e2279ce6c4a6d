#ifndef KACLAB_RNG_HPP
#define KACLAB_RNG_HPP

// Counter-based random streams.
//
// The generator is Philox4x32-10 (Salmon et al., Random123). A stream is
// addressed by a 64-bit key (the master seed) and the upper two counter words
// (experiment id, replica index); the lower two counter words enumerate
// 128-bit blocks. Doubles take 53 bits from two consecutive 32-bit outputs,
// high word first. Everything here is specified bit-for-bit so that ports in
// other languages can reproduce the same draws.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace kac {

class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint32_t experiment, std::uint32_t replica)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        experiment_(experiment),
        replica_(replica) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (index_ == 4) {
      const Block ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                      replica_, experiment_};
      buffer_ = generate(ctr, key_);
      ++block_;
      index_ = 0;
    }
    return buffer_[index_++];
  }

  /// The raw bijection: ten Philox rounds of `ctr` under `key`.
  static Block generate(Block ctr, Key key);

 private:
  Key key_;
  std::uint32_t experiment_;
  std::uint32_t replica_;
  std::uint64_t block_ = 0;
  Block buffer_{};
  int index_ = 4;
};

/// Identifies one independent random stream.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint32_t experiment = 0;

  [[nodiscard]] StreamKey sub(std::uint32_t salt) const {
    // Mix a salt into the experiment word so one experiment can own several
    // families of replica streams.
    return {seed, experiment ^ (salt * 0x9E3779B9u)};
  }
};

/// Portable distributions on top of a Philox stream. std:: distributions are
/// implementation-defined, so they are avoided wherever streams must match.
class Rng {
 public:
  Rng(StreamKey key, std::uint32_t replica) : engine_(key.seed, key.experiment, replica) {}

  std::uint64_t bits64() {
    const std::uint64_t hi = engine_();
    const std::uint64_t lo = engine_();
    return (hi << 32) | lo;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(bits64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n) {
    auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

  /// Standard normal by Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  double exponential(double rate) { return -std::log(1.0 - uniform()) / rate; }

 private:
  Philox4x32 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace kac

#endif
