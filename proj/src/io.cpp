#include "causalmed/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "causalmed/error.hpp"

namespace causalmed::io {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    std::string field = line.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) {
      field.pop_back();
    }
    while (!field.empty() && field.front() == ' ') {
      field.erase(field.begin());
    }
    fields.push_back(std::move(field));
    if (comma == std::string::npos) {
      break;
    }
    start = comma + 1;
  }
  return fields;
}

double parse_double(const std::string& text, std::size_t line_no) {
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("line " + std::to_string(line_no) +
                      ": cannot parse numeric value '" + text + "'");
  }
  return value;
}

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc()) {
    throw IoError("failed to format a double");
  }
  return std::string(buf, ptr);
}

}  // namespace

ObservationTable read_table_csv(std::istream& in,
                                const std::vector<std::string>& treatments,
                                const std::string& mediator,
                                const std::string& outcome) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ConfigError("empty data file: missing header line");
  }
  const auto header = split_csv_line(line);
  const auto column_of = [&header](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw ConfigError("column '" + name + "' not found in the data header");
    }
    return static_cast<std::size_t>(it - header.begin());
  };

  std::vector<std::size_t> treatment_cols;
  treatment_cols.reserve(treatments.size());
  for (const auto& name : treatments) {
    treatment_cols.push_back(column_of(name));
  }
  const std::size_t mediator_col = column_of(mediator);
  const std::size_t outcome_col = column_of(outcome);

  ObservationTable table;
  table.treatment_names = treatments;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") {
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    }
    ObservationRow row;
    row.z.values.reserve(treatment_cols.size());
    for (std::size_t col : treatment_cols) {
      row.z.values.push_back(parse_double(fields[col], line_no));
    }
    row.mediator = parse_double(fields[mediator_col], line_no);
    row.outcome = parse_double(fields[outcome_col], line_no);
    table.rows.push_back(std::move(row));
  }
  table.check();
  return table;
}

void write_table_csv(std::ostream& out, const ObservationTable& table,
                     const std::string& mediator_name,
                     const std::string& outcome_name) {
  table.check();
  for (const auto& name : table.treatment_names) {
    out << name << ',';
  }
  out << mediator_name << ',' << outcome_name << '\n';
  for (const auto& row : table.rows) {
    for (double v : row.z.values) {
      out << format_double(v) << ',';
    }
    out << format_double(row.mediator) << ',' << format_double(row.outcome)
        << '\n';
  }
}

namespace {

std::vector<BasisTerm> parse_terms(const json& doc, const std::string& key,
                                   const std::vector<std::string>& treatments) {
  if (!doc.contains(key) || !doc[key].is_array() || doc[key].empty()) {
    throw ConfigError("config: '" + key + "' must be a nonempty array");
  }
  std::vector<BasisTerm> terms;
  terms.reserve(doc[key].size());
  for (const auto& entry : doc[key]) {
    if (!entry.is_string()) {
      throw ConfigError("config: entries of '" + key + "' must be strings");
    }
    terms.push_back(parse_term(entry.get<std::string>(), treatments));
  }
  return terms;
}

EffectContrast parse_contrast(const json& doc,
                              const std::vector<std::string>& treatments) {
  if (!doc.is_object() || !doc.contains("treatment") || !doc.contains("hi") ||
      !doc.contains("lo")) {
    throw ConfigError(
        "config: each contrast needs 'treatment', 'hi' and 'lo'");
  }
  const std::string name = doc["treatment"].get<std::string>();
  const auto it = std::find(treatments.begin(), treatments.end(), name);
  if (it == treatments.end()) {
    throw ConfigError("config: contrast references unknown treatment '" +
                      name + "'");
  }
  EffectContrast contrast;
  contrast.treatment_index = static_cast<std::size_t>(it - treatments.begin());
  contrast.level_hi = doc["hi"].get<double>();
  contrast.level_lo = doc["lo"].get<double>();
  if (doc.contains("conditioning") && !doc["conditioning"].is_null()) {
    const auto& cond = doc["conditioning"];
    if (!cond.is_object()) {
      throw ConfigError("config: 'conditioning' must map treatments to values");
    }
    std::vector<double> values;
    for (std::size_t k = 0; k < treatments.size(); ++k) {
      if (k == contrast.treatment_index) {
        continue;
      }
      if (!cond.contains(treatments[k])) {
        throw ConfigError("config: conditioning is missing treatment '" +
                          treatments[k] + "'");
      }
      values.push_back(cond[treatments[k]].get<double>());
    }
    if (cond.size() != treatments.size() - 1) {
      throw ConfigError(
          "config: conditioning must cover exactly the non-contrasted "
          "treatments");
    }
    contrast.conditioning = std::move(values);
  }
  return contrast;
}

}  // namespace

AnalysisConfig parse_analysis_config(const json& doc) {
  if (!doc.is_object()) {
    throw ConfigError("config: expected a JSON object");
  }
  AnalysisConfig config;
  if (!doc.contains("treatments") || !doc["treatments"].is_array() ||
      doc["treatments"].empty()) {
    throw ConfigError("config: 'treatments' must be a nonempty array");
  }
  for (const auto& t : doc["treatments"]) {
    config.treatments.push_back(t.get<std::string>());
  }
  if (!doc.contains("mediator") || !doc.contains("outcome")) {
    throw ConfigError("config: 'mediator' and 'outcome' are required");
  }
  config.mediator = doc["mediator"].get<std::string>();
  config.outcome = doc["outcome"].get<std::string>();
  config.mediator_basis = parse_terms(doc, "mediator_basis", config.treatments);
  config.outcome_basis = parse_terms(doc, "outcome_basis", config.treatments);
  if (doc.contains("contrasts")) {
    if (!doc["contrasts"].is_array()) {
      throw ConfigError("config: 'contrasts' must be an array");
    }
    for (const auto& c : doc["contrasts"]) {
      config.contrasts.push_back(parse_contrast(c, config.treatments));
    }
  }
  if (doc.contains("bootstrap") && !doc["bootstrap"].is_null()) {
    const auto& b = doc["bootstrap"];
    BootstrapConfig cfg;
    if (b.contains("replicates")) {
      cfg.replicates = b["replicates"].get<std::size_t>();
    }
    if (b.contains("level")) {
      cfg.level = b["level"].get<double>();
    }
    if (b.contains("seed")) {
      cfg.seed = b["seed"].get<std::uint64_t>();
    }
    config.bootstrap = cfg;
  }
  return config;
}

AnalysisConfig read_analysis_config(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_analysis_config(doc);
}

BasisSpec AnalysisConfig::to_basis_spec() const {
  BasisSpec spec;
  spec.variables = treatments;
  for (const auto& term : outcome_basis) {
    const bool in_mediator =
        std::find(mediator_basis.begin(), mediator_basis.end(), term) !=
        mediator_basis.end();
    if (!in_mediator) {
      throw ConfigError(
          "outcome basis term '" + term_to_string(term, treatments) +
          "' does not appear in the mediator basis; Condition 1 requires the "
          "outcome basis to be a proper subset of the mediator basis");
    }
    spec.terms.push_back(term);
  }
  spec.outcome_count = outcome_basis.size();
  for (const auto& term : mediator_basis) {
    const bool in_outcome =
        std::find(outcome_basis.begin(), outcome_basis.end(), term) !=
        outcome_basis.end();
    if (!in_outcome) {
      spec.terms.push_back(term);
    }
  }
  if (spec.terms.size() == spec.outcome_count) {
    throw IdentificationError(
        "outcome basis equals the mediator basis, violating Condition 1: it "
        "must be a proper subset so that instrument terms remain");
  }
  spec.check();
  return spec;
}

json basis_spec_to_json(const BasisSpec& spec) {
  json doc;
  doc["variables"] = spec.variables;
  json terms = json::array();
  for (const auto& term : spec.terms) {
    terms.push_back(term_to_string(term, spec.variables));
  }
  doc["terms"] = std::move(terms);
  doc["outcome_count"] = spec.outcome_count;
  return doc;
}

BasisSpec basis_spec_from_json(const json& doc) {
  BasisSpec spec;
  spec.variables = doc.at("variables").get<std::vector<std::string>>();
  for (const auto& t : doc.at("terms")) {
    spec.terms.push_back(parse_term(t.get<std::string>(), spec.variables));
  }
  spec.outcome_count = doc.at("outcome_count").get<std::size_t>();
  return spec;
}

namespace {

json interval_to_json(const std::optional<ConfidenceInterval>& ci) {
  if (!ci.has_value()) {
    return nullptr;
  }
  return json::array({ci->lo, ci->hi});
}

std::optional<ConfidenceInterval> interval_from_json(const json& doc) {
  if (doc.is_null()) {
    return std::nullopt;
  }
  return ConfidenceInterval{doc.at(0).get<double>(), doc.at(1).get<double>()};
}

}  // namespace

json effect_estimate_to_json(const EffectEstimate& estimate) {
  json doc;
  doc["treatment_index"] = estimate.contrast.treatment_index;
  doc["hi"] = estimate.contrast.level_hi;
  doc["lo"] = estimate.contrast.level_lo;
  doc["conditioning"] = estimate.contrast.conditioning.has_value()
                            ? json(*estimate.contrast.conditioning)
                            : json(nullptr);
  doc["nde"] = estimate.nde;
  doc["nie"] = estimate.nie;
  doc["te"] = estimate.te;
  doc["interval_level"] = estimate.interval_level.has_value()
                              ? json(*estimate.interval_level)
                              : json(nullptr);
  doc["nde_ci"] = interval_to_json(estimate.nde_ci);
  doc["nie_ci"] = interval_to_json(estimate.nie_ci);
  doc["te_ci"] = interval_to_json(estimate.te_ci);
  return doc;
}

EffectEstimate effect_estimate_from_json(const json& doc) {
  EffectEstimate est;
  est.contrast.treatment_index = doc.at("treatment_index").get<std::size_t>();
  est.contrast.level_hi = doc.at("hi").get<double>();
  est.contrast.level_lo = doc.at("lo").get<double>();
  if (!doc.at("conditioning").is_null()) {
    est.contrast.conditioning =
        doc.at("conditioning").get<std::vector<double>>();
  }
  est.nde = doc.at("nde").get<double>();
  est.nie = doc.at("nie").get<double>();
  est.te = doc.at("te").get<double>();
  if (!doc.at("interval_level").is_null()) {
    est.interval_level = doc.at("interval_level").get<double>();
  }
  est.nde_ci = interval_from_json(doc.at("nde_ci"));
  est.nie_ci = interval_from_json(doc.at("nie_ci"));
  est.te_ci = interval_from_json(doc.at("te_ci"));
  return est;
}

json fitted_mediation_to_json(const FittedMediation& fit) {
  json doc;
  doc["spec"] = basis_spec_to_json(fit.spec);
  doc["alpha"] = fit.alpha;
  doc["beta"] = fit.beta;
  doc["delta"] = fit.delta;
  doc["gamma"] = fit.gamma;
  doc["n"] = fit.sample_size;
  doc["condition_numbers"] = {
      {"mediator", fit.diagnostics.mediator_condition},
      {"outcome", fit.diagnostics.outcome_condition},
  };
  return doc;
}

FittedMediation fitted_mediation_from_json(const json& doc) {
  FittedMediation fit;
  fit.spec = basis_spec_from_json(doc.at("spec"));
  fit.alpha = doc.at("alpha").get<std::vector<double>>();
  fit.beta = doc.at("beta").get<double>();
  fit.delta = doc.at("delta").get<std::vector<double>>();
  fit.gamma = doc.at("gamma").get<std::vector<double>>();
  fit.sample_size = doc.at("n").get<std::size_t>();
  fit.diagnostics.mediator_condition =
      doc.at("condition_numbers").at("mediator").get<double>();
  fit.diagnostics.outcome_condition =
      doc.at("condition_numbers").at("outcome").get<double>();
  return fit;
}

json replication_report_to_json(const simulation::ReplicationReport& report) {
  json doc;
  doc["study"] = report.study;
  doc["n"] = report.n;
  doc["replications"] = report.replications;
  doc["seed"] = report.seed;
  doc["failed_replications"] = report.failed;
  json rows = json::array();
  for (const auto& row : report.rows) {
    json r;
    r["estimand"] = row.estimand;
    r["method"] = row.method;
    r["truth"] = row.truth;
    r["mean"] = row.mean_estimate;
    r["bias"] = row.bias;
    r["se"] = row.se;
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  return doc;
}

simulation::ReplicationReport replication_report_from_json(const json& doc) {
  simulation::ReplicationReport report;
  report.study = doc.at("study").get<int>();
  report.n = doc.at("n").get<std::size_t>();
  report.replications = doc.at("replications").get<std::size_t>();
  report.seed = doc.at("seed").get<std::uint64_t>();
  report.failed = doc.at("failed_replications").get<std::size_t>();
  for (const auto& r : doc.at("rows")) {
    simulation::ReplicationRow row;
    row.estimand = r.at("estimand").get<std::string>();
    row.method = r.at("method").get<std::string>();
    row.truth = r.at("truth").get<double>();
    row.mean_estimate = r.at("mean").get<double>();
    row.bias = r.at("bias").get<double>();
    row.se = r.at("se").get<double>();
    report.rows.push_back(std::move(row));
  }
  return report;
}

json analysis_report(const AnalysisConfig& config, const FittedMediation& fit,
                     const std::vector<EffectEstimate>& effects,
                     std::size_t bootstrap_discarded) {
  json doc;
  json model;
  model["treatments"] = config.treatments;
  model["mediator"] = config.mediator;
  model["outcome"] = config.outcome;
  json mediator_terms = json::array();
  for (const auto& t : config.mediator_basis) {
    mediator_terms.push_back(term_to_string(t, config.treatments));
  }
  json outcome_terms = json::array();
  for (const auto& t : config.outcome_basis) {
    outcome_terms.push_back(term_to_string(t, config.treatments));
  }
  model["mediator_basis"] = std::move(mediator_terms);
  model["outcome_basis"] = std::move(outcome_terms);
  doc["model"] = std::move(model);

  json fit_doc;
  fit_doc["n"] = fit.sample_size;
  fit_doc["L"] = fit.spec.terms.size();
  fit_doc["L1"] = fit.spec.outcome_count;
  fit_doc["alpha"] = fit.alpha;
  fit_doc["beta"] = fit.beta;
  fit_doc["delta"] = fit.delta;
  fit_doc["gamma"] = fit.gamma;
  fit_doc["condition_numbers"] = {
      {"mediator", fit.diagnostics.mediator_condition},
      {"outcome", fit.diagnostics.outcome_condition},
  };
  doc["fit"] = std::move(fit_doc);

  json effect_rows = json::array();
  for (const auto& est : effects) {
    json row = effect_estimate_to_json(est);
    // Report rows use the treatment name for readability.
    row.erase("treatment_index");
    json named;
    named["treatment"] = config.treatments[est.contrast.treatment_index];
    for (auto& [key, value] : row.items()) {
      named[key] = value;
    }
    effect_rows.push_back(std::move(named));
  }
  doc["effects"] = std::move(effect_rows);

  if (config.bootstrap.has_value()) {
    doc["bootstrap"] = {
        {"replicates", config.bootstrap->replicates},
        {"level", config.bootstrap->level},
        {"seed", config.bootstrap->seed},
        {"discarded", bootstrap_discarded},
    };
  } else {
    doc["bootstrap"] = nullptr;
  }
  return doc;
}

std::string replication_report_table(
    const simulation::ReplicationReport& report) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %-12s %9s %10s %10s\n", "estimand",
                "method", "truth", "bias", "SE");
  out << line;
  for (const auto& row : report.rows) {
    std::snprintf(line, sizeof(line), "%-12s %-12s %9.3f %10.3f %10.3f\n",
                  row.estimand.c_str(), row.method.c_str(), row.truth,
                  row.bias, row.se);
    out << line;
  }
  return out.str();
}

}  // namespace causalmed::io
