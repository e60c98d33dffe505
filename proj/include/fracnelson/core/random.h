#pragma once

#include <cstdint>
#include <random>

namespace fracnelson::core {

/// Master seed plus stream id. Path j of run r draws from a substream derived
/// deterministically from (master, stream, r, j).
struct SeedSpec {
  std::uint64_t master = 20070901;
  std::uint64_t stream = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the substream for one path.
std::uint64_t substream_seed(const SeedSpec& seed, std::uint64_t run, std::uint64_t path) noexcept;

/// Per-path generator. Uniforms use the top 53 bits; normals use the Marsaglia
/// polar method, so both are exact in distribution and identical across platforms.
class PathRng {
 public:
  PathRng(const SeedSpec& seed, std::uint64_t run, std::uint64_t path);

  double uniform() noexcept;  // in [0, 1)
  double normal() noexcept;

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fracnelson::core
