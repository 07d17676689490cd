#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tomoq {

// Stateless 64-bit mixer used to derive independent stream seeds from
// (master, index, stream) triples.  mt19937_64 is fully pinned by the
// standard, so seeding it with a mixed value gives reproducible streams
// on every platform.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                 std::uint64_t stream = 0) {
  return splitmix64(splitmix64(master ^ ((index + 1) * 0x9E3779B97F4A7C15ull)) ^ stream);
}

// Seed streams used by the sweep driver.  Keeping them distinct means the
// state, the probe unitary and the relabeling permutation of one sample
// never share an engine.
inline constexpr std::uint64_t stream_state = 0x5354415445ull;    // "STATE"
inline constexpr std::uint64_t stream_unitary = 0x554e4954ull;    // "UNIT"
inline constexpr std::uint64_t stream_relabel = 0x5045524dull;    // "PERM"
inline constexpr std::uint64_t stream_gauge = 0x4741554745ull;    // "GAUGE"

// Deterministic scalar source.  The standard distributions are
// implementation-defined, so the uniform and Gaussian transforms are done by
// hand; identical seeds give identical streams everywhere.
class SeededRng {
public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the paired value is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  // Uniform integer in [0, n); rejection sampling keeps it exactly uniform.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % n;
  }

  std::uint64_t next_u64() { return engine_(); }

private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

} // namespace tomoq
