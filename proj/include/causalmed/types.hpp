#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace causalmed {

// One unit's treatment coordinates, numerically coded. The estimator treats
// levels arithmetically (products such as z1*z2 are meaningful), matching
// integer- or score-coded treatments.
struct TreatmentProfile {
  std::vector<double> values;

  bool operator==(const TreatmentProfile&) const = default;
};

struct ObservationRow {
  TreatmentProfile z;
  double mediator = 0.0;
  double outcome = 0.0;

  bool operator==(const ObservationRow&) const = default;
};

// Rectangular dataset: named treatment columns plus one continuous mediator
// and one continuous outcome per row.
struct ObservationTable {
  std::vector<std::string> treatment_names;
  std::vector<ObservationRow> rows;

  std::size_t treatment_count() const { return treatment_names.size(); }
  std::size_t size() const { return rows.size(); }

  // Structural invariants: nonempty, consistent widths, finite values,
  // distinct nonempty column names. Throws ConfigError.
  void check() const;

  bool operator==(const ObservationTable&) const = default;
};

// One multiplicative factor variable^degree of a basis term.
struct BasisFactor {
  std::size_t variable = 0;  // index into the owning spec's variable list
  unsigned degree = 1;

  bool operator==(const BasisFactor&) const = default;
};

// A polynomial basis term: product of factors over distinct variables.
// No factors = intercept, one factor = monomial, several = interaction.
struct BasisTerm {
  std::vector<BasisFactor> factors;  // sorted by variable, variables distinct

  static BasisTerm intercept() { return BasisTerm{}; }
  static BasisTerm monomial(std::size_t variable, unsigned degree = 1) {
    return BasisTerm{{BasisFactor{variable, degree}}};
  }
  // Sorts the factors into canonical order; throws ConfigError on repeated
  // variables or zero degrees.
  static BasisTerm product(std::vector<BasisFactor> factors);

  bool is_intercept() const { return factors.empty(); }
  bool contains_variable(std::size_t v) const;

  bool operator==(const BasisTerm&) const = default;
};

// Ordered basis over the declared treatment variables. The first
// outcome_count terms span the outcome surface g_Y; the remaining terms are
// the instrument-like part of the mediator surface g_M (Condition 1: the
// outcome space must be a proper subspace, i.e. outcome_count < terms.size()).
struct BasisSpec {
  std::vector<std::string> variables;
  std::vector<BasisTerm> terms;
  std::size_t outcome_count = 0;

  std::size_t size() const { return terms.size(); }             // L
  std::size_t instrument_count() const {                        // L - L1
    return terms.size() - outcome_count;
  }

  // Validates the Condition-1 structure and term well-formedness.
  // Throws ConfigError or IdentificationError with a named reason.
  void check() const;

  bool operator==(const BasisSpec&) const = default;
};

// Renders a term in the config grammar: "1", "z1", "z1^2", "z1*z2^2".
std::string term_to_string(const BasisTerm& term,
                           const std::vector<std::string>& variables);

// Parses the config grammar back into a term; inverse of term_to_string.
BasisTerm parse_term(const std::string& text,
                     const std::vector<std::string>& variables);

struct SolveDiagnostics {
  double mediator_condition = 0.0;  // condition number of the design solve
  double outcome_condition = 0.0;   // condition number of the moment solve

  bool operator==(const SolveDiagnostics&) const = default;
};

// Output of the proposed two-stage fit. gamma is defined as
// delta - beta * alpha[0..L1), so the delta identity holds by construction.
struct FittedMediation {
  BasisSpec spec;
  std::vector<double> alpha;  // length L, mediator surface coefficients
  double beta = 0.0;          // mediator -> outcome coefficient
  std::vector<double> delta;  // length L1, reduced-form outcome coefficients
  std::vector<double> gamma;  // length L1, outcome surface coefficients
  std::size_t sample_size = 0;
  SolveDiagnostics diagnostics;

  bool operator==(const FittedMediation&) const = default;
};

// A level contrast on one treatment coordinate. With a conditioning profile
// (the other coordinates, in declaration order with coordinate j skipped)
// the effects are conditional; without it they are averaged over the sample.
struct EffectContrast {
  std::size_t treatment_index = 0;
  double level_hi = 0.0;
  double level_lo = 0.0;
  std::optional<std::vector<double>> conditioning;

  bool operator==(const EffectContrast&) const = default;
};

struct ConfidenceInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool operator==(const ConfidenceInterval&) const = default;
};

// Natural direct, indirect and total effect for one contrast; te is always
// constructed as nde + nie. Interval fields are filled by the bootstrap.
struct EffectEstimate {
  EffectContrast contrast;
  double nde = 0.0;
  double nie = 0.0;
  double te = 0.0;
  std::optional<double> interval_level;
  std::optional<ConfidenceInterval> nde_ci;
  std::optional<ConfidenceInterval> nie_ci;
  std::optional<ConfidenceInterval> te_ci;

  bool operator==(const EffectEstimate&) const = default;
};

}  // namespace causalmed
