#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "causalmed/types.hpp"

namespace causalmed {

struct BootstrapConfig {
  std::size_t replicates = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
};

// Empirical quantile pair at probabilities (1-level)/2 and 1-(1-level)/2,
// using zero-indexed position p*(B-1) with linear interpolation between
// neighbouring order statistics.
ConfidenceInterval percentile_interval(std::vector<double> samples,
                                       double level);

struct BootstrapResult {
  // Point estimates from the original-data fit, intervals from the
  // percentile method over the replicate estimates.
  std::vector<EffectEstimate> effects;
  std::size_t discarded = 0;  // replicates whose refit failed
};

// Nonparametric bootstrap: resamples rows with replacement, refits the full
// proposed pipeline and recomputes every contrast per replicate. Replicate
// streams are derived from cfg.seed by a counter, so results do not depend
// on thread count. Fails when more than 10% of replicates are discarded.
BootstrapResult bootstrap_effects(const BasisSpec& spec,
                                  const ObservationTable& data,
                                  const std::vector<EffectContrast>& contrasts,
                                  const BootstrapConfig& cfg,
                                  int threads = 0);

}  // namespace causalmed
