#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "causalmed/types.hpp"

namespace causalmed::simulation {

// Generator parameters for the two built-in studies. Both share the
// mediator equation
//   M = Z1 + Z2 + Z3 + Z1*Z2 + Z1*Z3 + Z2*Z3 + U + eps_M
// with Z_k iid uniform on {1,2,3} and U, eps_M, eps_Y iid standard normal.
// Study 1: Y = Z1 + Z2 + Z3 + M + Z1*Z2 + Z1*Z3 + 2*U + eps_Y
//          (Z2*Z3 is the single instrument-like term).
// Study 2: Y = Z1 + Z2 + Z3 + M + 2*U + eps_Y
//          (all three pairwise products act as instruments).
struct StudyDGP {
  int study = 1;  // 1 or 2
  std::size_t n = 0;
  std::uint64_t seed = 0;
};

// Canonical basis for a study: terms {1, z1, z2, z3, z1*z2, z1*z3, z2*z3}
// with outcome_count 6 (study 1) or 4 (study 2).
BasisSpec study_basis(int study);

// Generating coefficients over study_basis(study)'s term order.
struct StudyTruth {
  std::vector<double> alpha;  // mediator surface
  double beta = 1.0;          // coefficient of M in the outcome equation
  std::vector<double> gamma;  // outcome surface (length outcome_count)
};

StudyTruth study_truth(int study);

// Draws a dataset from the study's equations. noise_scale multiplies U,
// eps_M and eps_Y; 0 yields the exact polynomial surfaces (the draws are
// still consumed, so the treatment sample is unchanged).
ObservationTable generate_study_dataset(const StudyDGP& dgp,
                                        double noise_scale = 1.0);

// Variant with correlated treatments: each Z_k is a tertile cut of
// sqrt(rho) * C + sqrt(1-rho) * N_k for a shared standard-normal factor C,
// so the marginals stay uniform on {1,2,3}. This goes beyond the built-in
// studies (which draw treatments independently) and exists for robustness
// exploration only.
ObservationTable generate_correlated_study_dataset(
    const StudyDGP& dgp, double treatment_correlation,
    double noise_scale = 1.0);

// Analytic effects implied by the study's polynomials. Average contrasts
// use the population law of the other treatments (E[Z^d] = (1+2^d+3^d)/3);
// conditional contrasts evaluate the polynomials directly.
EffectEstimate true_effects(int study, const EffectContrast& contrast);

struct ReplicationRow {
  std::string estimand;  // e.g. "NDE1(2,1)"
  std::string method;    // "proposed" or "traditional"
  double truth = 0.0;
  double mean_estimate = 0.0;
  double bias = 0.0;  // mean_estimate - truth
  double se = 0.0;    // standard deviation of the replicate estimates
};

struct ReplicationReport {
  int study = 1;
  std::size_t n = 0;
  std::size_t replications = 0;
  std::uint64_t seed = 0;
  std::size_t failed = 0;  // replicates whose fit failed (excluded)
  std::vector<ReplicationRow> rows;  // 9 estimands x 2 methods, table order
};

// Repeats generate -> fit (proposed and traditional) -> effects for the
// nine (2,1) estimands, and aggregates bias and SE against true_effects.
// Per-replicate seeds are derived from `seed` by a counter, so the report
// is a pure function of (study, n, replications, seed). Errors out when
// more than 5% of replicates fail.
ReplicationReport run_replications(int study, std::size_t n,
                                   std::size_t replications,
                                   std::uint64_t seed, int threads = 0);

}  // namespace causalmed::simulation
