#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "causalmed/effects.hpp"
#include "causalmed/error.hpp"
#include "causalmed/estimation.hpp"
#include "causalmed/inference.hpp"
#include "causalmed/io.hpp"
#include "causalmed/simulation.hpp"

namespace {

using causalmed::io::json;

// Writes `text` to the path, or to stdout when the path is "-".
void write_output(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw causalmed::IoError("cannot open output file '" + path + "'");
  }
  out << text;
  if (!out) {
    throw causalmed::IoError("failed writing to '" + path + "'");
  }
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw causalmed::IoError("cannot open input file '" + path + "'");
  }
  return in;
}

// Human summary goes to stdout unless the JSON already owns stdout.
std::ostream& summary_stream(const std::string& out_path) {
  return out_path == "-" ? std::cerr : std::cout;
}

int run_analyze(const std::string& data_path, const std::string& config_path,
                const std::string& out_path) {
  auto config_file = open_input(config_path);
  const causalmed::io::AnalysisConfig config =
      causalmed::io::read_analysis_config(config_file);
  const causalmed::BasisSpec spec = config.to_basis_spec();

  auto data_file = open_input(data_path);
  const causalmed::ObservationTable data = causalmed::io::read_table_csv(
      data_file, config.treatments, config.mediator, config.outcome);

  std::vector<causalmed::EffectContrast> contrasts = config.contrasts;
  if (contrasts.empty()) {
    // Default: unit contrast (2 vs 1) on every treatment.
    for (std::size_t j = 0; j < config.treatments.size(); ++j) {
      contrasts.push_back(causalmed::EffectContrast{j, 2.0, 1.0, std::nullopt});
    }
  }

  causalmed::FittedMediation fit;
  std::vector<causalmed::EffectEstimate> effects;
  std::size_t discarded = 0;
  if (config.bootstrap.has_value()) {
    const auto result = causalmed::bootstrap_effects(spec, data, contrasts,
                                                     *config.bootstrap);
    fit = causalmed::fit_proposed(spec, data);
    effects = result.effects;
    discarded = result.discarded;
  } else {
    fit = causalmed::fit_proposed(spec, data);
    effects = causalmed::effect_table(fit, data, contrasts);
  }

  const json report =
      causalmed::io::analysis_report(config, fit, effects, discarded);
  write_output(out_path, report.dump(2) + "\n");

  auto& out = summary_stream(out_path);
  out << "n = " << fit.sample_size << ", L = " << fit.spec.terms.size()
      << ", L1 = " << fit.spec.outcome_count << ", beta = " << fit.beta
      << "\n";
  for (const auto& est : effects) {
    out << config.treatments[est.contrast.treatment_index] << " ("
        << est.contrast.level_hi << " vs " << est.contrast.level_lo
        << "): NDE = " << est.nde << ", NIE = " << est.nie
        << ", TE = " << est.te;
    if (est.te_ci.has_value()) {
      out << ", TE " << 100.0 * *est.interval_level << "% CI = ["
          << est.te_ci->lo << ", " << est.te_ci->hi << "]";
    }
    out << "\n";
  }
  return 0;
}

int run_simulate(int study, std::size_t n, std::size_t reps,
                 std::uint64_t seed, const std::string& out_path) {
  const auto report = causalmed::simulation::run_replications(study, n, reps,
                                                              seed);
  const json doc = causalmed::io::replication_report_to_json(report);
  write_output(out_path, doc.dump(2) + "\n");
  summary_stream(out_path) << causalmed::io::replication_report_table(report);
  return 0;
}

int run_export_study(int study, std::size_t n, std::uint64_t seed,
                     const std::string& out_path) {
  const causalmed::simulation::StudyDGP dgp{study, n, seed};
  const causalmed::ObservationTable table =
      causalmed::simulation::generate_study_dataset(dgp);
  std::ostringstream csv;
  causalmed::io::write_table_csv(csv, table);
  write_output(out_path, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "causalmed: natural direct/indirect effect estimation for multiple "
      "treatments with a latent mediator-outcome confounder"};
  app.require_subcommand(1);

  std::string data_path;
  std::string config_path;
  std::string out_path;
  auto* analyze = app.add_subcommand(
      "analyze", "Fit a dataset and report effect estimates");
  analyze->add_option("--data", data_path, "CSV data file")->required();
  analyze->add_option("--config", config_path, "JSON model config")
      ->required();
  analyze->add_option("--out", out_path, "report destination ('-' = stdout)")
      ->required();

  int study = 1;
  std::size_t n = 0;
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::string sim_out;
  auto* simulate = app.add_subcommand(
      "simulate", "Run a replication study and report bias/SE tables");
  simulate->add_option("--study", study, "study id (1 or 2)")->required();
  simulate->add_option("--n", n, "sample size per replicate")->required();
  simulate->add_option("--reps", reps, "number of replications")->required();
  simulate->add_option("--seed", seed, "master seed")->required();
  simulate->add_option("--out", sim_out, "report destination ('-' = stdout)")
      ->required();

  int export_study = 1;
  std::size_t export_n = 0;
  std::uint64_t export_seed = 0;
  std::string export_out;
  auto* exporter = app.add_subcommand(
      "export-study", "Write one generated study dataset as CSV");
  exporter->add_option("--study", export_study, "study id (1 or 2)")
      ->required();
  exporter->add_option("--n", export_n, "sample size")->required();
  exporter->add_option("--seed", export_seed, "seed")->required();
  exporter->add_option("--out", export_out, "CSV destination ('-' = stdout)")
      ->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (analyze->parsed()) {
      return run_analyze(data_path, config_path, out_path);
    }
    if (simulate->parsed()) {
      return run_simulate(study, n, reps, seed, sim_out);
    }
    return run_export_study(export_study, export_n, export_seed, export_out);
  } catch (const causalmed::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const causalmed::IdentificationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const causalmed::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
