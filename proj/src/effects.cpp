#include "causalmed/effects.hpp"

#include <string>

#include "causalmed/design.hpp"
#include "causalmed/error.hpp"

namespace causalmed {

double predict_gm(const FittedMediation& fit, const TreatmentProfile& z) {
  const auto row = evaluate_basis_row(fit.spec, z);
  double out = 0.0;
  for (std::size_t t = 0; t < row.size(); ++t) {
    out += row[t] * fit.alpha[t];
  }
  return out;
}

double predict_gy(const FittedMediation& fit, const TreatmentProfile& z) {
  const auto row = evaluate_basis_row(fit.spec, z);
  double out = 0.0;
  for (std::size_t t = 0; t < fit.spec.outcome_count; ++t) {
    out += row[t] * fit.gamma[t];
  }
  return out;
}

namespace {

// Full profile with coordinate j set to `level` and the remaining
// coordinates taken from z_minus_j in declaration order.
TreatmentProfile insert_coordinate(const std::vector<double>& z_minus_j,
                                   std::size_t j, double level) {
  TreatmentProfile z;
  z.values.reserve(z_minus_j.size() + 1);
  z.values.assign(z_minus_j.begin(),
                  z_minus_j.begin() + static_cast<long>(j));
  z.values.push_back(level);
  z.values.insert(z.values.end(), z_minus_j.begin() + static_cast<long>(j),
                  z_minus_j.end());
  return z;
}

void check_contrast(const FittedMediation& fit, const EffectContrast& c) {
  if (c.treatment_index >= fit.spec.variables.size()) {
    throw ConfigError("contrast references treatment index " +
                      std::to_string(c.treatment_index) +
                      " but the spec declares " +
                      std::to_string(fit.spec.variables.size()) +
                      " treatments");
  }
}

}  // namespace

EffectEstimate conditional_effects(const FittedMediation& fit,
                                   const EffectContrast& contrast) {
  check_contrast(fit, contrast);
  if (!contrast.conditioning.has_value()) {
    throw ConfigError(
        "conditional effects require a conditioning profile for the other "
        "treatments");
  }
  if (contrast.conditioning->size() + 1 != fit.spec.variables.size()) {
    throw ConfigError("conditioning profile must supply every coordinate "
                      "except the contrasted one (" +
                      std::to_string(fit.spec.variables.size() - 1) +
                      " values expected, got " +
                      std::to_string(contrast.conditioning->size()) + ")");
  }
  const auto hi = insert_coordinate(*contrast.conditioning,
                                    contrast.treatment_index,
                                    contrast.level_hi);
  const auto lo = insert_coordinate(*contrast.conditioning,
                                    contrast.treatment_index,
                                    contrast.level_lo);
  EffectEstimate est;
  est.contrast = contrast;
  est.nde = predict_gy(fit, hi) - predict_gy(fit, lo);
  est.nie = fit.beta * (predict_gm(fit, hi) - predict_gm(fit, lo));
  est.te = est.nde + est.nie;
  return est;
}

EffectEstimate average_effects(const FittedMediation& fit,
                               const ObservationTable& data,
                               const EffectContrast& contrast) {
  check_contrast(fit, contrast);
  if (contrast.conditioning.has_value()) {
    throw ConfigError("average effects take no conditioning profile");
  }
  if (data.treatment_names != fit.spec.variables) {
    throw ConfigError("dataset treatment columns do not match the fitted spec");
  }
  data.check();
  const std::size_t j = contrast.treatment_index;
  double nde_sum = 0.0;
  double nie_sum = 0.0;
  for (const auto& row : data.rows) {
    TreatmentProfile hi = row.z;
    TreatmentProfile lo = row.z;
    hi.values[j] = contrast.level_hi;
    lo.values[j] = contrast.level_lo;
    nde_sum += predict_gy(fit, hi) - predict_gy(fit, lo);
    nie_sum += predict_gm(fit, hi) - predict_gm(fit, lo);
  }
  const double n = static_cast<double>(data.size());
  EffectEstimate est;
  est.contrast = contrast;
  est.nde = nde_sum / n;
  est.nie = fit.beta * (nie_sum / n);
  est.te = est.nde + est.nie;
  return est;
}

std::vector<EffectEstimate> effect_table(
    const FittedMediation& fit, const ObservationTable& data,
    const std::vector<EffectContrast>& contrasts) {
  if (contrasts.empty()) {
    throw ConfigError("no contrasts supplied");
  }
  std::vector<EffectEstimate> out;
  out.reserve(contrasts.size());
  for (std::size_t i = 0; i < contrasts.size(); ++i) {
    try {
      out.push_back(contrasts[i].conditioning.has_value()
                        ? conditional_effects(fit, contrasts[i])
                        : average_effects(fit, data, contrasts[i]));
    } catch (const ConfigError& e) {
      throw ConfigError("contrast " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace causalmed
