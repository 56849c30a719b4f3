#include "causalmed/inference.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "causalmed/effects.hpp"
#include "causalmed/error.hpp"
#include "causalmed/estimation.hpp"
#include "causalmed/rng.hpp"
#include "parallel.hpp"

namespace causalmed {

ConfidenceInterval percentile_interval(std::vector<double> samples,
                                       double level) {
  if (samples.empty()) {
    throw ConfigError("percentile interval of an empty sample");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw ConfigError("interval level must lie in (0, 1)");
  }
  std::sort(samples.begin(), samples.end());
  const auto quantile = [&samples](double p) {
    const double pos = p * static_cast<double>(samples.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, samples.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return samples[lo] + frac * (samples[hi] - samples[lo]);
  };
  const double tail = (1.0 - level) / 2.0;
  return ConfidenceInterval{quantile(tail), quantile(1.0 - tail)};
}

BootstrapResult bootstrap_effects(const BasisSpec& spec,
                                  const ObservationTable& data,
                                  const std::vector<EffectContrast>& contrasts,
                                  const BootstrapConfig& cfg,
                                  int threads) {
  if (cfg.replicates < 2) {
    throw ConfigError("bootstrap needs at least 2 replicates");
  }
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) {
    throw ConfigError("bootstrap level must lie in (0, 1)");
  }

  const FittedMediation fit0 = fit_proposed(spec, data);
  std::vector<EffectEstimate> point = effect_table(fit0, data, contrasts);

  const std::size_t b_count = cfg.replicates;
  const std::size_t n = data.size();
  // Per replicate: (nde, nie, te) for each contrast, or nullopt on a refit
  // failure under resampling.
  std::vector<std::optional<std::vector<std::array<double, 3>>>> draws(
      b_count);

  detail::parallel_for(b_count, threads, [&](std::size_t b) {
    rng::RandomStream stream(
        rng::derive_seed(cfg.seed, b, rng::SeedDomain::bootstrap));
    ObservationTable resampled;
    resampled.treatment_names = data.treatment_names;
    resampled.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      resampled.rows.push_back(data.rows[stream.next_below(n)]);
    }
    try {
      const FittedMediation fit = fit_proposed(spec, resampled);
      // Effects are averaged over the original sample's treatment rows, so
      // replicate variation reflects parameter uncertainty; identical
      // refits then yield identical effects (degenerate data gives
      // zero-width intervals).
      const auto effects = effect_table(fit, data, contrasts);
      std::vector<std::array<double, 3>> values(effects.size());
      for (std::size_t c = 0; c < effects.size(); ++c) {
        values[c] = {effects[c].nde, effects[c].nie, effects[c].te};
      }
      draws[b] = std::move(values);
    } catch (const IdentificationError&) {
      draws[b] = std::nullopt;
    }
  });

  std::size_t discarded = 0;
  for (const auto& d : draws) {
    if (!d.has_value()) {
      ++discarded;
    }
  }
  if (static_cast<double>(discarded) > 0.1 * static_cast<double>(b_count)) {
    throw IdentificationError(
        "bootstrap unstable: " + std::to_string(discarded) + " of " +
        std::to_string(b_count) +
        " replicates failed to refit (more than the 10% cap); the design is "
        "fragile under resampling");
  }

  for (std::size_t c = 0; c < point.size(); ++c) {
    std::array<std::vector<double>, 3> components;
    for (auto& comp : components) {
      comp.reserve(b_count - discarded);
    }
    for (const auto& d : draws) {  // replicate-index order
      if (d.has_value()) {
        for (std::size_t k = 0; k < 3; ++k) {
          components[k].push_back((*d)[c][k]);
        }
      }
    }
    point[c].interval_level = cfg.level;
    point[c].nde_ci = percentile_interval(components[0], cfg.level);
    point[c].nie_ci = percentile_interval(components[1], cfg.level);
    point[c].te_ci = percentile_interval(components[2], cfg.level);
  }
  return BootstrapResult{std::move(point), discarded};
}

}  // namespace causalmed
