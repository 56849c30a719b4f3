#pragma once

#include <vector>

#include "causalmed/types.hpp"

namespace causalmed {

// Fitted mediator surface g_M(z) = phi(z) . alpha.
double predict_gm(const FittedMediation& fit, const TreatmentProfile& z);

// Fitted outcome surface g_Y(z) = phi1(z) . gamma.
double predict_gy(const FittedMediation& fit, const TreatmentProfile& z);

// Effects at a fixed profile for the other treatments:
//   CNDE = g_Y(hi, z_-j) - g_Y(lo, z_-j)
//   CNIE = beta * (g_M(hi, z_-j) - g_M(lo, z_-j))
//   CTE  = CNDE + CNIE.
// The contrast must carry a conditioning profile.
EffectEstimate conditional_effects(const FittedMediation& fit,
                                   const EffectContrast& contrast);

// Average effects: the conditional quantities averaged over the empirical
// distribution of the other treatments (every row of the sample).
EffectEstimate average_effects(const FittedMediation& fit,
                               const ObservationTable& data,
                               const EffectContrast& contrast);

// Applies conditional_effects or average_effects per contrast depending on
// whether a conditioning profile is present; preserves order.
std::vector<EffectEstimate> effect_table(
    const FittedMediation& fit, const ObservationTable& data,
    const std::vector<EffectContrast>& contrasts);

}  // namespace causalmed
