#include "fracnelson/core/random.h"

#include <cmath>

namespace fracnelson::core {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t substream_seed(const SeedSpec& seed, std::uint64_t run, std::uint64_t path) noexcept {
  std::uint64_t h = splitmix64(seed.master);
  h = splitmix64(h ^ seed.stream);
  h = splitmix64(h ^ run);
  return splitmix64(h ^ path);
}

PathRng::PathRng(const SeedSpec& seed, std::uint64_t run, std::uint64_t path)
    : engine_(substream_seed(seed, run, path)) {}

double PathRng::uniform() noexcept {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double PathRng::normal() noexcept {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * f;
  has_spare_ = true;
  return u * f;
}

}  // namespace fracnelson::core
