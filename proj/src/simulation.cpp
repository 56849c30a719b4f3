#include "causalmed/simulation.hpp"

#include <array>
#include <cmath>
#include <optional>

#include "causalmed/effects.hpp"
#include "causalmed/error.hpp"
#include "causalmed/estimation.hpp"
#include "causalmed/rng.hpp"
#include "parallel.hpp"

namespace causalmed::simulation {

namespace {

void check_study(int study) {
  if (study != 1 && study != 2) {
    throw ConfigError("unknown study " + std::to_string(study) +
                      " (expected 1 or 2)");
  }
}

double int_pow(double base, unsigned degree) {
  double out = 1.0;
  for (unsigned k = 0; k < degree; ++k) {
    out *= base;
  }
  return out;
}

// E[Z^d] for Z uniform on {1,2,3}.
double level_moment(unsigned degree) {
  return (1.0 + int_pow(2.0, degree) + int_pow(3.0, degree)) / 3.0;
}

}  // namespace

BasisSpec study_basis(int study) {
  check_study(study);
  BasisSpec spec;
  spec.variables = {"z1", "z2", "z3"};
  spec.terms = {
      BasisTerm::intercept(),
      BasisTerm::monomial(0),
      BasisTerm::monomial(1),
      BasisTerm::monomial(2),
      BasisTerm::product({{0, 1}, {1, 1}}),
      BasisTerm::product({{0, 1}, {2, 1}}),
      BasisTerm::product({{1, 1}, {2, 1}}),
  };
  spec.outcome_count = study == 1 ? 6 : 4;
  return spec;
}

StudyTruth study_truth(int study) {
  check_study(study);
  StudyTruth truth;
  truth.alpha = {0, 1, 1, 1, 1, 1, 1};
  truth.beta = 1.0;
  truth.gamma = study == 1 ? std::vector<double>{0, 1, 1, 1, 1, 1}
                           : std::vector<double>{0, 1, 1, 1};
  return truth;
}

namespace {

ObservationRow make_row(int study, double z1, double z2, double z3, double u,
                        double em, double ey, double scale) {
  const double m = z1 + z2 + z3 + z1 * z2 + z1 * z3 + z2 * z3 +
                   scale * (u + em);
  double y = z1 + z2 + z3 + m + scale * (2.0 * u + ey);
  if (study == 1) {
    y += z1 * z2 + z1 * z3;
  }
  return ObservationRow{TreatmentProfile{{z1, z2, z3}}, m, y};
}

}  // namespace

ObservationTable generate_study_dataset(const StudyDGP& dgp,
                                        double noise_scale) {
  check_study(dgp.study);
  if (dgp.n == 0) {
    throw ConfigError("empty dataset requested");
  }
  rng::RandomStream stream(dgp.seed);
  ObservationTable table;
  table.treatment_names = {"z1", "z2", "z3"};
  table.rows.reserve(dgp.n);
  for (std::size_t i = 0; i < dgp.n; ++i) {
    const double z1 = 1.0 + static_cast<double>(stream.next_below(3));
    const double z2 = 1.0 + static_cast<double>(stream.next_below(3));
    const double z3 = 1.0 + static_cast<double>(stream.next_below(3));
    const double u = stream.next_normal();
    const double em = stream.next_normal();
    const double ey = stream.next_normal();
    table.rows.push_back(
        make_row(dgp.study, z1, z2, z3, u, em, ey, noise_scale));
  }
  return table;
}

ObservationTable generate_correlated_study_dataset(const StudyDGP& dgp,
                                                   double treatment_correlation,
                                                   double noise_scale) {
  check_study(dgp.study);
  if (dgp.n == 0) {
    throw ConfigError("empty dataset requested");
  }
  if (!(treatment_correlation >= 0.0 && treatment_correlation < 1.0)) {
    throw ConfigError("treatment correlation must lie in [0, 1)");
  }
  // Tertile boundary of the standard normal: P(|X| <= q) = 1/3.
  constexpr double kTertile = 0.43072729929545756;
  const double shared = std::sqrt(treatment_correlation);
  const double idio = std::sqrt(1.0 - treatment_correlation);
  rng::RandomStream stream(dgp.seed);
  ObservationTable table;
  table.treatment_names = {"z1", "z2", "z3"};
  table.rows.reserve(dgp.n);
  for (std::size_t i = 0; i < dgp.n; ++i) {
    const double c = stream.next_normal();
    double z[3];
    for (double& zk : z) {
      const double latent = shared * c + idio * stream.next_normal();
      zk = latent < -kTertile ? 1.0 : (latent <= kTertile ? 2.0 : 3.0);
    }
    const double u = stream.next_normal();
    const double em = stream.next_normal();
    const double ey = stream.next_normal();
    table.rows.push_back(
        make_row(dgp.study, z[0], z[1], z[2], u, em, ey, noise_scale));
  }
  return table;
}

namespace {

// Expected difference of one basis term when coordinate j moves hi -> lo.
// Average contrasts integrate the other coordinates over uniform {1,2,3};
// conditional contrasts plug in the supplied profile.
double term_difference(const BasisTerm& term, const EffectContrast& contrast) {
  const std::size_t j = contrast.treatment_index;
  if (!term.contains_variable(j)) {
    return 0.0;
  }
  double hi_part = 1.0;
  double lo_part = 1.0;
  double others = 1.0;
  for (const auto& f : term.factors) {
    if (f.variable == j) {
      hi_part = int_pow(contrast.level_hi, f.degree);
      lo_part = int_pow(contrast.level_lo, f.degree);
    } else if (contrast.conditioning.has_value()) {
      const std::size_t pos =
          f.variable < j ? f.variable : f.variable - 1;
      others *= int_pow((*contrast.conditioning)[pos], f.degree);
    } else {
      others *= level_moment(f.degree);
    }
  }
  return (hi_part - lo_part) * others;
}

}  // namespace

EffectEstimate true_effects(int study, const EffectContrast& contrast) {
  check_study(study);
  const BasisSpec spec = study_basis(study);
  if (contrast.treatment_index >= spec.variables.size()) {
    throw ConfigError("contrast references treatment index " +
                      std::to_string(contrast.treatment_index) +
                      " but the study has 3 treatments");
  }
  if (contrast.conditioning.has_value() &&
      contrast.conditioning->size() + 1 != spec.variables.size()) {
    throw ConfigError("conditioning profile must supply the other 2 values");
  }
  const StudyTruth truth = study_truth(study);
  EffectEstimate est;
  est.contrast = contrast;
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    const double diff = term_difference(spec.terms[t], contrast);
    if (t < spec.outcome_count) {
      est.nde += truth.gamma[t] * diff;
    }
    est.nie += truth.beta * truth.alpha[t] * diff;
  }
  est.te = est.nde + est.nie;
  return est;
}

namespace {

constexpr std::array<const char*, 3> kEffectNames = {"NDE", "NIE", "TE"};

double sample_sd(const std::vector<double>& xs, double mean) {
  double ss = 0.0;
  for (double x : xs) {
    ss += (x - mean) * (x - mean);
  }
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

ReplicationReport run_replications(int study, std::size_t n,
                                   std::size_t replications,
                                   std::uint64_t seed, int threads) {
  check_study(study);
  if (replications < 2) {
    throw ConfigError("need at least 2 replications");
  }
  const BasisSpec spec = study_basis(study);
  std::vector<EffectContrast> contrasts;
  for (std::size_t j = 0; j < 3; ++j) {
    contrasts.push_back(EffectContrast{j, 2.0, 1.0, std::nullopt});
  }

  // estimates[r][j][k][method]: effect k of treatment j, method 0 =
  // proposed, 1 = traditional.
  using Replicate = std::array<std::array<std::array<double, 2>, 3>, 3>;
  std::vector<std::optional<Replicate>> estimates(replications);

  detail::parallel_for(replications, threads, [&](std::size_t r) {
    const StudyDGP dgp{study, n,
                       rng::derive_seed(seed, r, rng::SeedDomain::simulation)};
    const ObservationTable data = generate_study_dataset(dgp);
    try {
      const FittedMediation fit = fit_proposed(spec, data);
      const TraditionalFit trad = fit_traditional(data);
      Replicate rep;
      for (std::size_t j = 0; j < 3; ++j) {
        const EffectEstimate p = average_effects(fit, data, contrasts[j]);
        const EffectEstimate t = traditional_effects(trad, contrasts[j]);
        rep[j][0] = {p.nde, t.nde};
        rep[j][1] = {p.nie, t.nie};
        rep[j][2] = {p.te, t.te};
      }
      estimates[r] = rep;
    } catch (const IdentificationError&) {
      estimates[r] = std::nullopt;
    }
  });

  ReplicationReport report;
  report.study = study;
  report.n = n;
  report.replications = replications;
  report.seed = seed;
  for (const auto& e : estimates) {
    if (!e.has_value()) {
      ++report.failed;
    }
  }
  if (static_cast<double>(report.failed) >
      0.05 * static_cast<double>(replications)) {
    throw IdentificationError(
        "replication study unstable: " + std::to_string(report.failed) +
        " of " + std::to_string(replications) +
        " replicates failed to fit (more than the 5% cap)");
  }

  for (std::size_t j = 0; j < 3; ++j) {
    for (std::size_t k = 0; k < 3; ++k) {
      const EffectEstimate truth = true_effects(study, contrasts[j]);
      const double true_value =
          k == 0 ? truth.nde : (k == 1 ? truth.nie : truth.te);
      for (std::size_t method = 0; method < 2; ++method) {
        std::vector<double> values;
        values.reserve(replications - report.failed);
        for (const auto& e : estimates) {
          if (e.has_value()) {
            values.push_back((*e)[j][k][method]);
          }
        }
        double mean = 0.0;
        for (double v : values) {
          mean += v;
        }
        mean /= static_cast<double>(values.size());
        ReplicationRow row;
        row.estimand = std::string(kEffectNames[k]) + std::to_string(j + 1) +
                       "(2,1)";
        row.method = method == 0 ? "proposed" : "traditional";
        row.truth = true_value;
        row.mean_estimate = mean;
        row.bias = mean - true_value;
        row.se = sample_sd(values, mean);
        report.rows.push_back(std::move(row));
      }
    }
  }
  return report;
}

}  // namespace causalmed::simulation
