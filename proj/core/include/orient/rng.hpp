#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace orient {

// Deterministic random helpers. Bounded draws, shuffling and gaussians are
// implemented here rather than with std distributions, whose output is
// implementation defined and would break cross-platform reproducibility.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform integer in [0, n). Lemire multiply-shift with rejection.
  std::uint64_t bounded(std::uint64_t n);

  // Uniform double in [0, 1).
  double unit();

  // Standard normal via Box-Muller.
  double gaussian();

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[bounded(i)]);
    }
  }

private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Decorrelated seed for an independent use of the same user-facing seed.
std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t stream);

}  // namespace orient
