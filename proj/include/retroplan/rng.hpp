#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace retroplan {

// Stream salts for deriving independent RNG streams from one master seed.
// Values are arbitrary but fixed; changing them changes every seeded artifact.
enum class RngStream : std::uint64_t {
  taskgen = 0x7461736b67656e01ULL,
  episode = 0x657069736f646501ULL,
  pretrain_tasks = 0x7072657461736bULL,
  pretrain_rollout = 0x707265726f6c6cULL,
  bench_tasks = 0x62656e63687461ULL,
  bench_seeds = 0x62656e63687365ULL,
  model_init = 0x6d6f64656c6901ULL,
  adapter_init = 0x6164617074696eULL,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, RngStream stream) {
  return splitmix64(master ^ static_cast<std::uint64_t>(stream));
}

inline std::uint64_t derive_seed(std::uint64_t master, RngStream stream, std::uint64_t index) {
  return splitmix64(splitmix64(master ^ static_cast<std::uint64_t>(stream)) + index);
}

// Deterministic RNG wrapper. All draws go through explicit integer/bit
// arithmetic (never std distributions) so sequences are identical across
// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Inclusive range. Modulo bias is negligible for the small ranges used here.
  int uniform_int(int lo, int hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: lo > hi");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(gen_() % span);
  }

  double uniform_real(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  // Index draw from an unnormalized weight vector via a single cumulative walk.
  std::size_t weighted_index(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    if (!(total > 0.0)) throw std::invalid_argument("weighted_index: nonpositive total weight");
    const double u = next_unit() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.size() - 1;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace retroplan
