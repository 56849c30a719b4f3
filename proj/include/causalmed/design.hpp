#pragma once

#include <cstddef>
#include <vector>

#include "causalmed/linalg.hpp"
#include "causalmed/types.hpp"

namespace causalmed {

// Evaluates every basis term at one treatment profile; entry l is
// phi_l(z). Intercept -> 1, monomial -> value^degree, product -> product of
// powers. Exact for integer-valued inputs within double range.
std::vector<double> evaluate_basis_row(const BasisSpec& spec,
                                       const TreatmentProfile& z);

// Stacked basis evaluations: row i is phi(Z_i). Columns follow the spec's
// term order; the first outcome_count columns are Phi1, the rest Phi2.
struct DesignMatrices {
  linalg::Matrix phi;
  std::size_t outcome_count = 0;

  std::size_t n() const { return static_cast<std::size_t>(phi.rows()); }
  std::size_t term_count() const { return static_cast<std::size_t>(phi.cols()); }
  std::size_t instrument_count() const { return term_count() - outcome_count; }

  // Phi1: the outcome-basis columns.
  linalg::Matrix outcome_columns() const {
    return phi.leftCols(static_cast<Eigen::Index>(outcome_count));
  }

  // Phi2 * alpha2 without materialising Phi2.
  linalg::Vector instrument_combination(const std::vector<double>& alpha2) const;
};

DesignMatrices build_design(const BasisSpec& spec, const ObservationTable& data);

struct ValidationReport {
  std::size_t rank = 0;
  double sigma_max = 0.0;
  double sigma_min = 0.0;
  double tolerance = 0.0;  // rank threshold used for the decision
  double condition = 0.0;
};

// Checks that the basis is numerically linearly independent on the observed
// support (rank(Phi) = L) and that the spec leaves instrument terms
// (Condition 1). Throws IdentificationError naming the first dependent
// column on rank failure. The companion fit-time check on
// [Phi1 | Phi2*alpha2] lives in fit_outcome_gmm, where alpha2 is known.
ValidationReport validate_identifiability(const BasisSpec& spec,
                                          const DesignMatrices& design);

}  // namespace causalmed
