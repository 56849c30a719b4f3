#include "causalmed/design.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "causalmed/error.hpp"

namespace causalmed {

namespace {

double int_pow(double base, unsigned degree) {
  double out = 1.0;
  for (unsigned k = 0; k < degree; ++k) {
    out *= base;
  }
  return out;
}

}  // namespace

std::vector<double> evaluate_basis_row(const BasisSpec& spec,
                                       const TreatmentProfile& z) {
  if (z.values.size() != spec.variables.size()) {
    throw ConfigError("profile has " + std::to_string(z.values.size()) +
                      " coordinates but the spec declares " +
                      std::to_string(spec.variables.size()) + " treatments");
  }
  std::vector<double> row(spec.terms.size(), 1.0);
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    double value = 1.0;
    for (const auto& f : spec.terms[t].factors) {
      if (f.variable >= z.values.size()) {
        throw ConfigError("basis term '" +
                          term_to_string(spec.terms[t], spec.variables) +
                          "' references an unresolved variable");
      }
      value *= int_pow(z.values[f.variable], f.degree);
    }
    row[t] = value;
  }
  return row;
}

DesignMatrices build_design(const BasisSpec& spec,
                            const ObservationTable& data) {
  data.check();
  if (data.treatment_names != spec.variables) {
    throw ConfigError(
        "dataset treatment columns do not match the spec's variable list");
  }
  DesignMatrices design;
  design.outcome_count = spec.outcome_count;
  design.phi.resize(static_cast<Eigen::Index>(data.size()),
                    static_cast<Eigen::Index>(spec.terms.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto row = evaluate_basis_row(spec, data.rows[i].z);
    for (std::size_t t = 0; t < row.size(); ++t) {
      design.phi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) =
          row[t];
    }
  }
  return design;
}

linalg::Vector DesignMatrices::instrument_combination(
    const std::vector<double>& alpha2) const {
  if (alpha2.size() != instrument_count()) {
    throw ConfigError("instrument coefficient vector has wrong length");
  }
  const Eigen::Map<const linalg::Vector> a2(alpha2.data(),
                                            static_cast<Eigen::Index>(alpha2.size()));
  return phi.rightCols(static_cast<Eigen::Index>(instrument_count())) * a2;
}

namespace {

// Finds the first column that is numerically dependent on its predecessors
// (modified Gram-Schmidt with one reorthogonalisation pass).
std::size_t first_dependent_column(const linalg::Matrix& phi, double tolerance) {
  linalg::Matrix q(phi.rows(), phi.cols());
  Eigen::Index kept = 0;
  for (Eigen::Index j = 0; j < phi.cols(); ++j) {
    linalg::Vector v = phi.col(j);
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < kept; ++k) {
        v -= q.col(k).dot(v) * q.col(k);
      }
    }
    const double norm = v.norm();
    if (norm <= tolerance) {
      return static_cast<std::size_t>(j);
    }
    q.col(kept) = v / norm;
    ++kept;
  }
  return static_cast<std::size_t>(phi.cols());
}

}  // namespace

ValidationReport validate_identifiability(const BasisSpec& spec,
                                          const DesignMatrices& design) {
  spec.check();
  if (design.outcome_count != spec.outcome_count ||
      design.term_count() != spec.terms.size()) {
    throw ConfigError("design matrices were not built from this spec");
  }
  const linalg::Vector sigma = linalg::singular_values(design.phi);
  ValidationReport report;
  report.sigma_max = sigma.size() > 0 ? sigma[0] : 0.0;
  report.sigma_min = sigma.size() > 0 ? sigma[sigma.size() - 1] : 0.0;
  report.tolerance = linalg::rank_tolerance(design.n(), design.term_count(),
                                            report.sigma_max);
  report.rank = linalg::numerical_rank(sigma, report.tolerance);
  report.condition =
      report.sigma_min > 0.0 ? report.sigma_max / report.sigma_min
                             : std::numeric_limits<double>::infinity();
  if (report.rank < design.term_count()) {
    const std::size_t col =
        first_dependent_column(design.phi, report.tolerance);
    std::string name = col < spec.terms.size()
                           ? term_to_string(spec.terms[col], spec.variables)
                           : "?";
    throw IdentificationError(
        "basis not linearly independent on observed support: column '" +
        name + "' (index " + std::to_string(col) +
        ") is numerically dependent on the preceding columns; numerical rank " +
        std::to_string(report.rank) + " < " +
        std::to_string(design.term_count()));
  }
  return report;
}

}  // namespace causalmed
