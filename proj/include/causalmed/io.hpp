#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "causalmed/inference.hpp"
#include "causalmed/simulation.hpp"
#include "causalmed/types.hpp"

namespace causalmed::io {

using json = nlohmann::ordered_json;

// Comma-separated numeric table, first line is the header. Columns are
// looked up by name; extra columns are ignored. Values round-trip exactly
// (shortest-representation doubles).
ObservationTable read_table_csv(std::istream& in,
                                const std::vector<std::string>& treatments,
                                const std::string& mediator,
                                const std::string& outcome);

void write_table_csv(std::ostream& out, const ObservationTable& table,
                     const std::string& mediator_name = "m",
                     const std::string& outcome_name = "y");

// Analysis configuration document. JSON keys: treatments, mediator,
// outcome, mediator_basis, outcome_basis, contrasts, bootstrap.
struct AnalysisConfig {
  std::vector<std::string> treatments;
  std::string mediator;
  std::string outcome;
  std::vector<BasisTerm> mediator_basis;  // over `treatments`
  std::vector<BasisTerm> outcome_basis;   // proper subset of mediator_basis
  std::vector<EffectContrast> contrasts;
  std::optional<BootstrapConfig> bootstrap;

  // Orders the outcome terms first (config order), then the remaining
  // mediator terms. Rejects configurations whose outcome basis is not a
  // proper subset of the mediator basis (Condition 1).
  BasisSpec to_basis_spec() const;
};

AnalysisConfig parse_analysis_config(const json& doc);
AnalysisConfig read_analysis_config(std::istream& in);

// Round-trip serialisers for the core types.
json basis_spec_to_json(const BasisSpec& spec);
BasisSpec basis_spec_from_json(const json& doc);
json effect_estimate_to_json(const EffectEstimate& estimate);
EffectEstimate effect_estimate_from_json(const json& doc);
json fitted_mediation_to_json(const FittedMediation& fit);
FittedMediation fitted_mediation_from_json(const json& doc);
json replication_report_to_json(const simulation::ReplicationReport& report);
simulation::ReplicationReport replication_report_from_json(const json& doc);

// The analyze subcommand's report document.
json analysis_report(const AnalysisConfig& config, const FittedMediation& fit,
                     const std::vector<EffectEstimate>& effects,
                     std::size_t bootstrap_discarded);

// Aligned plain-text table for a replication report, one line per
// (estimand, method) in study-table order.
std::string replication_report_table(const simulation::ReplicationReport& report);

}  // namespace causalmed::io
