#include "tbresnet/random.hpp"

#include <cmath>

namespace tbresnet {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream) {
  return splitmix64(splitmix64(seed) ^ fnv1a(stream));
}

Rng make_rng(std::uint64_t seed, std::string_view stream) { return Rng(derive_seed(seed, stream)); }

double uniform_open01(Rng& rng) {
  // 53 random mantissa bits, shifted by half a step so 0 and 1 are excluded.
  const std::uint64_t bits = rng() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double standard_normal(Rng& rng) {
  // Box-Muller on our own uniforms keeps streams identical across standard libraries.
  const double u1 = uniform_open01(rng);
  const double u2 = uniform_open01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

double standard_gumbel(Rng& rng) { return -std::log(-std::log(uniform_open01(rng))); }

double standard_gamma(double shape, Rng& rng) {
  if (shape < 1.0) {
    // Boost to shape + 1 and rescale by U^(1/shape).
    const double g = standard_gamma(shape + 1.0, rng);
    return g * std::pow(uniform_open01(rng), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform_open01(rng);
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

int rademacher_sign(Rng& rng) { return (rng() >> 63) != 0 ? 1 : -1; }

std::size_t uniform_index(Rng& rng, std::size_t n) {
  __extension__ using u128 = unsigned __int128;
  const u128 product = static_cast<u128>(rng()) * n;
  return static_cast<std::size_t>(product >> 64);
}

}  // namespace tbresnet
