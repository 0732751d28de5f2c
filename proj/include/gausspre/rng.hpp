#pragma once

#include <cstdint>
#include <random>

namespace gausspre {

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for stream `stream` of a run seeded with `master`. Distinct
/// (master, stream) pairs give statistically unrelated generators, so each
/// Monte-Carlo draw can own its generator and results do not depend on how
/// draws are scheduled across workers.
constexpr std::uint64_t derive_seed(std::uint64_t master,
                                    std::uint64_t stream) noexcept {
  return mix64(mix64(master) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

/// Thin wrapper over std::mt19937_64 with a portable uniform conversion
/// (std::uniform_real_distribution is not reproducible across standard
/// libraries).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t master, std::uint64_t stream)
      : engine_(derive_seed(master, stream)) {}

  std::uint64_t bits() { return engine_(); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gausspre
