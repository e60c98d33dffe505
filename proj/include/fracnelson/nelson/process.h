#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include "fracnelson/core/hurst.h"
#include "fracnelson/core/path_ensemble.h"
#include "fracnelson/core/random.h"
#include "fracnelson/frac/kernel.h"
#include "fracnelson/young/coefficients.h"

namespace fracnelson::nelson {

/// Parsed process descriptor:
///   fbm:H[:cholesky|circulant]   sde:preset[@x0][:H]   volterra:fbm:H | volterra:piecewise:c
///   wiener:bm | wiener:ou:theta[@x0] | wiener:preset[@x0]
struct ProcessSpec {
  enum class Kind { fbm, sde, volterra, wiener };
  Kind kind = Kind::fbm;
  double hurst = 0.5;
  std::string sampler = "cholesky";
  std::string preset;
  double x0 = 0.0;
  std::optional<frac::KernelSpec> kernel;
  std::string text;

  static ProcessSpec parse(const std::string& text);
  /// Hurst index of the driving noise (1/2 for Wiener and Volterra processes).
  double driving_hurst() const;
};

/// Paths of the process on the grid. fBm via Cholesky carries its innovations as
/// driver; SDE ensembles keep the driver of their fBm.
core::PathEnsemble simulate(const ProcessSpec& p, const core::TimeGrid& grid, std::size_t n_paths,
                            const core::SeedSpec& seed, std::uint64_t run = 0);

}  // namespace fracnelson::nelson
