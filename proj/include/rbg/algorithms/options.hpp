#pragma once

#include <cstddef>
#include <optional>

#include "rbg/mathopt/lcp.hpp"

namespace rbg::algorithms {

enum class Algorithm { CutAndPlay, FullEnumeration };

struct SolverOptions {
  Algorithm algorithm = Algorithm::CutAndPlay;
  double deviationEps = 3e-4;
  std::optional<double> timeLimitSeconds;
  int workers = 1;
  mathopt::LCPMethod lcp = mathopt::LCPMethod::Branching;
  std::size_t maxIterations = 100;

  /// Throws UsageError on non-positive tolerances or limits.
  void validate() const;
};

}  // namespace rbg::algorithms
