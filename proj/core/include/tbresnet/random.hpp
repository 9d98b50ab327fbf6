#pragma once

#include <cstddef>
#include <cstdint>
#include <utility>
#include <random>
#include <string_view>

namespace tbresnet {

using Rng = std::mt19937_64;

/// Derives an independent seed for a named sub-stream ("split", "init",
/// "batch", "attack", ...) so every consumer of randomness can be replayed
/// on its own from the single run seed.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream);

Rng make_rng(std::uint64_t seed, std::string_view stream);

/// Uniform draw on the open interval (0, 1).
double uniform_open01(Rng& rng);

double standard_normal(Rng& rng);

/// Standard Gumbel draw by inverse CDF: -ln(-ln U).
double standard_gumbel(Rng& rng);

/// Gamma(shape, 1) draw (Marsaglia-Tsang), shape > 0.
double standard_gamma(double shape, Rng& rng);

/// Uniform +1/-1 sign.
int rademacher_sign(Rng& rng);

/// Uniform index in [0, n).
std::size_t uniform_index(Rng& rng, std::size_t n);

/// In-place Fisher-Yates shuffle; identical output for a given stream on every platform.
template <typename RandomIt>
void shuffle(RandomIt first, RandomIt last, Rng& rng) {
  const auto n = static_cast<std::size_t>(last - first);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = uniform_index(rng, i);
    using std::swap;
    swap(first[i - 1], first[j]);
  }
}

}  // namespace tbresnet
