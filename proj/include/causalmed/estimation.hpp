#pragma once

#include <cstddef>
#include <vector>

#include "causalmed/design.hpp"
#include "causalmed/types.hpp"

namespace causalmed {

struct MediatorFit {
  std::vector<double> alpha;  // length L
  double condition = 0.0;
};

// Least-squares fit of the mediator surface: alpha minimises
// sum_i (M_i - phi(Z_i) alpha)^2. Requires full column rank.
MediatorFit fit_mediator_ols(const DesignMatrices& design,
                             const std::vector<double>& mediator);

struct OutcomeFit {
  std::vector<double> delta;  // length L1
  double beta = 0.0;
  double condition = 0.0;
};

// Moment-weighted outcome fit: minimises the sample moments
// phi' (Y - Phi1 delta - beta Phi2 alpha2) in the canonical GMM norm with
// weight (phi'phi)^-1. With X = [Phi1 | Phi2 alpha2] in the column space of
// phi this reduces to the least-squares solution of X theta ~ Y, and in
// exactly identified designs it solves the moment equations exactly. Aborts
// when the instrument combination Phi2 alpha2 is numerically zero (beta
// would be unidentified) or X is rank deficient on this sample.
OutcomeFit fit_outcome_gmm(const DesignMatrices& design,
                           const std::vector<double>& alpha,
                           const std::vector<double>& outcome);

// gamma = delta - beta * alpha[0..L1), with L1 = delta.size().
std::vector<double> recover_gamma(const std::vector<double>& delta,
                                  double beta,
                                  const std::vector<double>& alpha);

// Full pipeline: build design, validate, mediator OLS, moment-weighted
// outcome fit, gamma recovery. Requires n > L + 1.
FittedMediation fit_proposed(const BasisSpec& spec,
                             const ObservationTable& data);

// Classic single-treatment mediation regressions, fitted one treatment at a
// time: M ~ 1 + z_j, Y ~ 1 + z_j + M, and the total regression Y ~ 1 + z_j.
// No latent confounder, no basis terms, no other treatments. Serves as the
// baseline the proposed estimator is compared against.
struct TraditionalTreatmentFit {
  double mediator_intercept = 0.0;
  double mediator_slope = 0.0;       // a_j: slope of M on z_j
  double outcome_intercept = 0.0;
  double direct_slope = 0.0;         // c_j: coefficient of z_j given M
  double mediator_coefficient = 0.0; // b_j: coefficient of M
  double total_slope = 0.0;          // slope of Y on z_j alone
};

struct TraditionalFit {
  std::vector<TraditionalTreatmentFit> per_treatment;  // one per column
  std::size_t sample_size = 0;
};

TraditionalFit fit_traditional(const ObservationTable& data);

// Plug-in effects from the traditional per-treatment regressions:
// NDE = c_j * (hi - lo), NIE = b_j * a_j * (hi - lo), TE = NDE + NIE.
// The fitted model is linear in z_j, so conditional and average effects
// coincide; any conditioning profile on the contrast is ignored.
EffectEstimate traditional_effects(const TraditionalFit& fit,
                                   const EffectContrast& contrast);

}  // namespace causalmed
