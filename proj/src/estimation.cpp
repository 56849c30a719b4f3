#include "causalmed/estimation.hpp"

#include <cmath>
#include <string>

#include "causalmed/error.hpp"

namespace causalmed {

namespace {

linalg::Vector to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const linalg::Vector>(v.data(),
                                          static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const linalg::Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

MediatorFit fit_mediator_ols(const DesignMatrices& design,
                             const std::vector<double>& mediator) {
  if (mediator.size() != design.n()) {
    throw ConfigError("mediator vector length does not match the design");
  }
  if (design.n() <= design.term_count()) {
    throw IdentificationError(
        "mediator fit: need more observations than basis terms");
  }
  linalg::LeastSquares ls;
  try {
    ls = linalg::solve_least_squares(design.phi, to_eigen(mediator));
  } catch (const IdentificationError& e) {
    throw IdentificationError(std::string("mediator fit: ") + e.what());
  }
  return MediatorFit{to_std(ls.solution), ls.condition};
}

OutcomeFit fit_outcome_gmm(const DesignMatrices& design,
                           const std::vector<double>& alpha,
                           const std::vector<double>& outcome) {
  const std::size_t n = design.n();
  const std::size_t l = design.term_count();
  const std::size_t l1 = design.outcome_count;
  if (alpha.size() != l) {
    throw ConfigError("alpha length does not match the design");
  }
  if (outcome.size() != n) {
    throw ConfigError("outcome vector length does not match the design");
  }
  if (l1 >= l) {
    throw IdentificationError(
        "no instrument terms: the outcome basis spans the full mediator "
        "basis, violating Condition 1 (proper subspace required)");
  }

  const std::vector<double> alpha2(alpha.begin() + static_cast<long>(l1),
                                   alpha.end());
  const linalg::Vector projected = design.instrument_combination(alpha2);

  // Identification degenerates when the instrument part of the mediator
  // surface vanishes: beta enters only through beta * Phi2 alpha2.
  const linalg::Vector sigma_phi = linalg::singular_values(design.phi);
  const double tol =
      linalg::rank_tolerance(n, l, sigma_phi.size() > 0 ? sigma_phi[0] : 0.0);
  if (projected.norm() <= tol * design.phi.norm()) {
    throw IdentificationError(
        "weak instruments: Phi2*alpha2 numerically zero, the mediator "
        "coefficient is unidentified");
  }

  linalg::Matrix x(design.phi.rows(), static_cast<Eigen::Index>(l1) + 1);
  x.leftCols(static_cast<Eigen::Index>(l1)) = design.outcome_columns();
  x.col(static_cast<Eigen::Index>(l1)) = projected;

  const linalg::Vector sigma_x = linalg::singular_values(x);
  const double tol_x = linalg::rank_tolerance(
      n, l1 + 1, sigma_x.size() > 0 ? sigma_x[0] : 0.0);
  if (linalg::numerical_rank(sigma_x, tol_x) < l1 + 1) {
    throw IdentificationError(
        "outcome parameters unidentified on this sample: [Phi1 | Phi2*alpha2] "
        "is rank deficient");
  }

  // Minimise the sample moments phi'(Y - X theta) in the canonical GMM norm
  // with weight (phi'phi)^-1. The columns of X lie in the column space of
  // phi, so the weighted moment norm equals the Euclidean norm of the
  // projected residual and the minimiser is the least-squares solution of
  // X theta ~ Y. In exactly identified designs (L = L1 + 1) this solves the
  // moment equations exactly, so the weighting is immaterial there.
  linalg::LeastSquares ls;
  try {
    ls = linalg::solve_least_squares(x, to_eigen(outcome));
  } catch (const IdentificationError&) {
    throw IdentificationError(
        "outcome parameters unidentified on this sample: moment system is "
        "rank deficient");
  }
  OutcomeFit fit;
  fit.delta = std::vector<double>(ls.solution.data(),
                                  ls.solution.data() + static_cast<long>(l1));
  fit.beta = ls.solution[static_cast<Eigen::Index>(l1)];
  fit.condition = ls.condition;
  return fit;
}

std::vector<double> recover_gamma(const std::vector<double>& delta,
                                  double beta,
                                  const std::vector<double>& alpha) {
  if (alpha.size() < delta.size()) {
    throw ConfigError("alpha is shorter than delta");
  }
  std::vector<double> gamma(delta.size());
  for (std::size_t i = 0; i < delta.size(); ++i) {
    gamma[i] = delta[i] - beta * alpha[i];
  }
  return gamma;
}

FittedMediation fit_proposed(const BasisSpec& spec,
                             const ObservationTable& data) {
  spec.check();
  data.check();
  const std::size_t l = spec.terms.size();
  if (data.size() <= l + 1) {
    throw IdentificationError(
        "insufficient sample size: need n > L + 1, got n = " +
        std::to_string(data.size()) + " with L = " + std::to_string(l));
  }
  const DesignMatrices design = build_design(spec, data);
  validate_identifiability(spec, design);

  std::vector<double> mediator(data.size());
  std::vector<double> outcome(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    mediator[i] = data.rows[i].mediator;
    outcome[i] = data.rows[i].outcome;
  }

  const MediatorFit med = fit_mediator_ols(design, mediator);
  const OutcomeFit out = fit_outcome_gmm(design, med.alpha, outcome);

  FittedMediation fit;
  fit.spec = spec;
  fit.alpha = med.alpha;
  fit.beta = out.beta;
  fit.delta = out.delta;
  fit.gamma = recover_gamma(out.delta, out.beta, med.alpha);
  fit.sample_size = data.size();
  fit.diagnostics = SolveDiagnostics{med.condition, out.condition};
  return fit;
}

namespace {

TraditionalTreatmentFit fit_traditional_one(const ObservationTable& data,
                                            std::size_t j) {
  const auto n = static_cast<Eigen::Index>(data.size());
  linalg::Vector y(n);
  linalg::Vector m(n);
  linalg::Matrix design_zm(n, 3);  // [1, z_j, M]
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = data.rows[static_cast<std::size_t>(i)];
    y[i] = row.outcome;
    m[i] = row.mediator;
    design_zm(i, 0) = 1.0;
    design_zm(i, 1) = row.z.values[j];
    design_zm(i, 2) = row.mediator;
  }
  const linalg::Matrix design_z = design_zm.leftCols(2);

  TraditionalTreatmentFit fit;
  try {
    const auto med = linalg::solve_least_squares(design_z, m);
    fit.mediator_intercept = med.solution[0];
    fit.mediator_slope = med.solution[1];
    const auto out = linalg::solve_least_squares(design_zm, y);
    fit.outcome_intercept = out.solution[0];
    fit.direct_slope = out.solution[1];
    fit.mediator_coefficient = out.solution[2];
    const auto total = linalg::solve_least_squares(design_z, y);
    fit.total_slope = total.solution[1];
  } catch (const IdentificationError& e) {
    throw IdentificationError("traditional fit: treatment " +
                              data.treatment_names[j] + ": " + e.what());
  }
  return fit;
}

}  // namespace

TraditionalFit fit_traditional(const ObservationTable& data) {
  data.check();
  TraditionalFit fit;
  fit.sample_size = data.size();
  fit.per_treatment.reserve(data.treatment_count());
  for (std::size_t j = 0; j < data.treatment_count(); ++j) {
    fit.per_treatment.push_back(fit_traditional_one(data, j));
  }
  return fit;
}

EffectEstimate traditional_effects(const TraditionalFit& fit,
                                   const EffectContrast& contrast) {
  if (contrast.treatment_index >= fit.per_treatment.size()) {
    throw ConfigError("contrast references treatment index " +
                      std::to_string(contrast.treatment_index) +
                      " but the fit covers " +
                      std::to_string(fit.per_treatment.size()) + " treatments");
  }
  const auto& t = fit.per_treatment[contrast.treatment_index];
  const double diff = contrast.level_hi - contrast.level_lo;
  EffectEstimate est;
  est.contrast = contrast;
  est.nde = t.direct_slope * diff;
  est.nie = t.mediator_coefficient * t.mediator_slope * diff;
  est.te = est.nde + est.nie;
  return est;
}

}  // namespace causalmed
