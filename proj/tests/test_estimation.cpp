#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "causalmed/design.hpp"
#include "causalmed/error.hpp"
#include "causalmed/estimation.hpp"
#include "causalmed/rng.hpp"
#include "causalmed/simulation.hpp"
#include "test_support.hpp"

using namespace causalmed;

namespace {

// Probability limits of the traditional per-treatment regressions under the
// two study generators, derived analytically and confirmed by a single
// n = 10^6 probe run (see test below): mediator coefficient b_j and direct
// slope c_j.
constexpr double kStudy1B1 = 268.0 / 165.0;
constexpr double kStudy1C1 = 62.0 / 33.0;
constexpr double kStudy1B23 = 298.0 / 165.0;
constexpr double kStudy1C23 = -34.0 / 33.0;
constexpr double kStudy2B = 68.0 / 55.0;
constexpr double kStudy2C = -2.0 / 11.0;

ObservationTable exact_surface_dataset(const BasisSpec& spec,
                                       const std::vector<double>& alpha,
                                       const std::vector<double>& gamma,
                                       double beta, std::size_t n,
                                       std::uint64_t seed,
                                       double mediator_noise = 0.0,
                                       double outcome_noise = 0.0) {
  rng::RandomStream rs(seed);
  ObservationTable data;
  data.treatment_names = spec.variables;
  for (std::size_t i = 0; i < n; ++i) {
    TreatmentProfile z;
    for (std::size_t j = 0; j < spec.variables.size(); ++j) {
      z.values.push_back(1.0 + static_cast<double>(rs.next_below(3)));
    }
    const auto row = evaluate_basis_row(spec, z);
    double gm = 0.0;
    double gy = 0.0;
    for (std::size_t t = 0; t < row.size(); ++t) {
      gm += row[t] * alpha[t];
      if (t < spec.outcome_count) {
        gy += row[t] * gamma[t];
      }
    }
    const double m = gm + mediator_noise * rs.next_normal();
    const double y = gy + beta * m + outcome_noise * rs.next_normal();
    data.rows.push_back(ObservationRow{std::move(z), m, y});
  }
  return data;
}

}  // namespace

TEST_CASE("noiseless data reproduces the generating coefficients") {
  for (int study : {1, 2}) {
    const BasisSpec spec = simulation::study_basis(study);
    const simulation::StudyTruth truth = simulation::study_truth(study);
    const simulation::StudyDGP dgp{study, 600, 91};
    const ObservationTable data =
        simulation::generate_study_dataset(dgp, /*noise_scale=*/0.0);
    const FittedMediation fit = fit_proposed(spec, data);
    for (std::size_t t = 0; t < truth.alpha.size(); ++t) {
      CHECK(std::abs(fit.alpha[t] - truth.alpha[t]) < 1e-8);
    }
    CHECK(std::abs(fit.beta - truth.beta) < 1e-8);
    for (std::size_t t = 0; t < truth.gamma.size(); ++t) {
      CHECK(std::abs(fit.gamma[t] - truth.gamma[t]) < 1e-8);
    }
    CHECK(test_support::delta_identity_gap(fit) < 1e-10);
  }
}

TEST_CASE("noiseless recovery holds for non-unit coefficients") {
  BasisSpec spec;
  spec.variables = {"z1", "z2"};
  spec.terms = {BasisTerm::intercept(), BasisTerm::monomial(0),
                BasisTerm::monomial(1), BasisTerm::product({{0, 1}, {1, 1}})};
  spec.outcome_count = 3;
  const std::vector<double> alpha = {0.5, -1.25, 2.0, 0.75};
  const std::vector<double> gamma = {1.5, 0.25, -0.5};
  const double beta = -2.5;
  const auto data = exact_surface_dataset(spec, alpha, gamma, beta, 200, 5);
  const FittedMediation fit = fit_proposed(spec, data);
  for (std::size_t t = 0; t < alpha.size(); ++t) {
    CHECK(std::abs(fit.alpha[t] - alpha[t]) < 1e-8);
  }
  CHECK(std::abs(fit.beta - beta) < 1e-8);
  for (std::size_t t = 0; t < gamma.size(); ++t) {
    CHECK(std::abs(fit.gamma[t] - gamma[t]) < 1e-8);
    CHECK(std::abs(fit.delta[t] - (gamma[t] + beta * alpha[t])) < 1e-8);
  }
}

TEST_CASE("constant mediator fits the intercept then aborts on weak instruments") {
  const BasisSpec spec = simulation::study_basis(1);
  simulation::StudyDGP dgp{1, 100, 17};
  ObservationTable data = simulation::generate_study_dataset(dgp);
  for (auto& row : data.rows) {
    row.mediator = 3.5;
  }
  const auto design = build_design(spec, data);
  const auto med = fit_mediator_ols(
      design, std::vector<double>(data.size(), 3.5));
  CHECK(std::abs(med.alpha[0] - 3.5) < 1e-10);
  for (std::size_t t = 1; t < med.alpha.size(); ++t) {
    CHECK(std::abs(med.alpha[t]) < 1e-10);
  }
  CHECK_THROWS_WITH_AS(fit_proposed(spec, data),
                       doctest::Contains("weak instruments"),
                       IdentificationError);
}

TEST_CASE("zero mediator column aborts in the outcome stage") {
  const BasisSpec spec = simulation::study_basis(1);
  simulation::StudyDGP dgp{1, 100, 18};
  ObservationTable data = simulation::generate_study_dataset(dgp);
  for (auto& row : data.rows) {
    row.mediator = 0.0;
  }
  CHECK_THROWS_WITH_AS(fit_proposed(spec, data),
                       doctest::Contains("weak instruments"),
                       IdentificationError);
}

TEST_CASE("insufficient sample size is rejected up front") {
  const BasisSpec spec = simulation::study_basis(1);
  const simulation::StudyDGP dgp{1, 7, 3};  // n = L
  const ObservationTable data = simulation::generate_study_dataset(dgp);
  CHECK_THROWS_WITH_AS(fit_proposed(spec, data),
                       doctest::Contains("insufficient sample size"),
                       IdentificationError);
}

TEST_CASE("recover_gamma arithmetic") {
  CHECK(recover_gamma({3.0, 3.0}, 1.0, {1.0, 2.0}) ==
        std::vector<double>{2.0, 1.0});
  CHECK(recover_gamma({3.0, 3.0}, 0.0, {1.0, 2.0}) ==
        std::vector<double>{3.0, 3.0});
}

TEST_CASE("closed-form GMM solution matches a generic numerical minimiser") {
  for (std::uint64_t i = 0; i < 10; ++i) {
    const auto instance = test_support::random_gmm_instance(1000 + i);
    const auto design = build_design(instance.spec, instance.data);
    std::vector<double> mediator(instance.data.size());
    std::vector<double> outcome(instance.data.size());
    for (std::size_t r = 0; r < instance.data.size(); ++r) {
      mediator[r] = instance.data.rows[r].mediator;
      outcome[r] = instance.data.rows[r].outcome;
    }
    const auto med = fit_mediator_ols(design, mediator);
    const auto out = fit_outcome_gmm(design, med.alpha, outcome);

    const std::size_t l1 = design.outcome_count;
    linalg::Matrix x(design.phi.rows(), static_cast<Eigen::Index>(l1) + 1);
    x.leftCols(static_cast<Eigen::Index>(l1)) = design.outcome_columns();
    x.col(static_cast<Eigen::Index>(l1)) = design.instrument_combination(
        std::vector<double>(med.alpha.begin() + static_cast<long>(l1),
                            med.alpha.end()));
    const linalg::Vector y =
        Eigen::Map<const linalg::Vector>(outcome.data(),
                                         static_cast<Eigen::Index>(outcome.size()));
    const linalg::Vector oracle = test_support::minimize_moment_objective(x, y);

    linalg::Vector closed(static_cast<Eigen::Index>(l1) + 1);
    for (std::size_t t = 0; t < l1; ++t) {
      closed[static_cast<Eigen::Index>(t)] = out.delta[t];
    }
    closed[static_cast<Eigen::Index>(l1)] = out.beta;
    const double rel = (closed - oracle).norm() / (1.0 + closed.norm());
    CHECK(rel < 1e-6);
  }
}

TEST_CASE("scaling the outcome by a power of two scales the fit exactly") {
  const BasisSpec spec = simulation::study_basis(2);
  const simulation::StudyDGP dgp{2, 300, 11};
  const ObservationTable data = simulation::generate_study_dataset(dgp);
  ObservationTable scaled = data;
  for (auto& row : scaled.rows) {
    row.outcome *= 4.0;
  }
  const FittedMediation f0 = fit_proposed(spec, data);
  const FittedMediation f4 = fit_proposed(spec, scaled);
  CHECK(f4.beta == 4.0 * f0.beta);
  for (std::size_t t = 0; t < f0.delta.size(); ++t) {
    CHECK(f4.delta[t] == 4.0 * f0.delta[t]);
    CHECK(f4.gamma[t] == 4.0 * f0.gamma[t]);
  }
  CHECK(f4.alpha == f0.alpha);
}

TEST_CASE("scaling the mediator rescales alpha and beta inversely") {
  const BasisSpec spec = simulation::study_basis(2);
  const simulation::StudyDGP dgp{2, 300, 12};
  const ObservationTable data = simulation::generate_study_dataset(dgp);
  ObservationTable scaled = data;
  for (auto& row : scaled.rows) {
    row.mediator *= 3.0;
  }
  const FittedMediation f0 = fit_proposed(spec, data);
  const FittedMediation f3 = fit_proposed(spec, scaled);
  CHECK(f3.beta == doctest::Approx(f0.beta / 3.0).epsilon(1e-12));
  for (std::size_t t = 0; t < f0.alpha.size(); ++t) {
    CHECK(f3.alpha[t] == doctest::Approx(3.0 * f0.alpha[t]).epsilon(1e-12));
  }
  // The product beta * alpha is scale invariant.
  CHECK(f3.beta * f3.alpha[1] ==
        doctest::Approx(f0.beta * f0.alpha[1]).epsilon(1e-12));
}

TEST_CASE("fits are deterministic and row-permutation invariant") {
  const BasisSpec spec = simulation::study_basis(1);
  const simulation::StudyDGP dgp{1, 250, 21};
  const ObservationTable data = simulation::generate_study_dataset(dgp);
  const FittedMediation a = fit_proposed(spec, data);
  const FittedMediation b = fit_proposed(spec, data);
  CHECK(a == b);  // bit identical

  ObservationTable shuffled = data;
  std::mt19937 shuffler(3);
  std::shuffle(shuffled.rows.begin(), shuffled.rows.end(), shuffler);
  const FittedMediation c = fit_proposed(spec, shuffled);
  // 1e-12 relative to the parameter vector's scale.
  double scale = std::abs(a.beta);
  for (double v : a.delta) {
    scale = std::max(scale, std::abs(v));
  }
  const double bound = 1e-12 * (1.0 + scale);
  CHECK(std::abs(c.beta - a.beta) <= bound);
  for (std::size_t t = 0; t < a.alpha.size(); ++t) {
    CHECK(std::abs(c.alpha[t] - a.alpha[t]) <= bound);
  }
  for (std::size_t t = 0; t < a.gamma.size(); ++t) {
    CHECK(std::abs(c.gamma[t] - a.gamma[t]) <= bound);
  }
}

TEST_CASE("study-1 fit at n = 2000 recovers the generating surfaces") {
  const BasisSpec spec = simulation::study_basis(1);
  const simulation::StudyDGP dgp{1, 2000, 20240801};
  const ObservationTable data = simulation::generate_study_dataset(dgp);
  const FittedMediation fit = fit_proposed(spec, data);
  CHECK(std::abs(fit.beta - 1.0) <= 0.1);
  // Per-coefficient tolerances are 4 pilot standard errors (pilot: 300
  // replications at n = 2000).
  const simulation::StudyTruth truth = simulation::study_truth(1);
  const std::vector<double> tolerance = {1.29, 0.54, 0.54, 0.54,
                                         0.20, 0.19, 0.19};
  for (std::size_t t = 0; t < truth.alpha.size(); ++t) {
    CHECK(std::abs(fit.alpha[t] - truth.alpha[t]) <= tolerance[t]);
  }
  CHECK(test_support::delta_identity_gap(fit) < 1e-10);
}

TEST_CASE("traditional and proposed agree when mediation is unconfounded") {
  // Other treatments reach the outcome only through M and U is absent, so
  // the per-treatment regressions are consistent for beta too.
  BasisSpec spec;
  spec.variables = {"z1", "z2"};
  spec.terms = {BasisTerm::intercept(), BasisTerm::monomial(0),
                BasisTerm::monomial(1), BasisTerm::product({{0, 1}, {1, 1}})};
  spec.outcome_count = 3;
  const std::vector<double> alpha = {1.0, 1.0, 1.0, 0.8};
  const std::vector<double> gamma = {0.5, 0.0, 0.0};
  const double beta = 1.3;
  const auto data =
      exact_surface_dataset(spec, alpha, gamma, beta, 5000, 27, 1.0, 1.0);
  const FittedMediation proposed = fit_proposed(spec, data);
  const TraditionalFit traditional = fit_traditional(data);
  for (const auto& t : traditional.per_treatment) {
    CHECK(std::abs(t.mediator_coefficient - proposed.beta) <= 0.05);
  }
}

TEST_CASE("study-1 traditional mediator coefficient absorbs the confounding") {
  const simulation::StudyDGP dgp{1, 2000, 31};
  const ObservationTable data = simulation::generate_study_dataset(dgp);
  const TraditionalFit fit = fit_traditional(data);
  for (const auto& t : fit.per_treatment) {
    CHECK(t.mediator_coefficient - 1.0 >= 0.5);
  }
}

TEST_CASE("traditional probability limits match the analytic derivation") {
  // Single large-sample runs against the closed-form plims; tolerances are
  // ~4 standard errors at n = 10^5.
  const simulation::StudyDGP dgp1{1, 100000, 404};
  const TraditionalFit fit1 =
      fit_traditional(simulation::generate_study_dataset(dgp1));
  CHECK(std::abs(fit1.per_treatment[0].mediator_coefficient - kStudy1B1) <=
        0.02);
  CHECK(std::abs(fit1.per_treatment[0].direct_slope - kStudy1C1) <= 0.11);
  for (std::size_t j : {std::size_t{1}, std::size_t{2}}) {
    CHECK(std::abs(fit1.per_treatment[j].mediator_coefficient - kStudy1B23) <=
          0.02);
    CHECK(std::abs(fit1.per_treatment[j].direct_slope - kStudy1C23) <= 0.11);
  }
  const simulation::StudyDGP dgp2{2, 100000, 405};
  const TraditionalFit fit2 =
      fit_traditional(simulation::generate_study_dataset(dgp2));
  for (const auto& t : fit2.per_treatment) {
    CHECK(std::abs(t.mediator_coefficient - kStudy2B) <= 0.02);
    CHECK(std::abs(t.direct_slope - kStudy2C) <= 0.11);
  }
}

TEST_CASE("traditional total slope decomposes into direct plus mediated") {
  const simulation::StudyDGP dgp{2, 800, 57};
  const ObservationTable data = simulation::generate_study_dataset(dgp);
  const TraditionalFit fit = fit_traditional(data);
  for (const auto& t : fit.per_treatment) {
    const double recomposed =
        t.direct_slope + t.mediator_coefficient * t.mediator_slope;
    CHECK(t.total_slope == doctest::Approx(recomposed).epsilon(1e-9));
  }
  const EffectEstimate est =
      traditional_effects(fit, EffectContrast{0, 2.0, 1.0, std::nullopt});
  CHECK(est.te == est.nde + est.nie);
}

TEST_CASE("traditional fit rejects a mediator collinear with the treatment") {
  ObservationTable data;
  data.treatment_names = {"z1", "z2"};
  rng::RandomStream rs(5);
  for (int i = 0; i < 50; ++i) {
    const double z1 = 1.0 + static_cast<double>(rs.next_below(3));
    const double z2 = 1.0 + static_cast<double>(rs.next_below(3));
    data.rows.push_back(
        ObservationRow{TreatmentProfile{{z1, z2}}, 2.0 * z1, z1 + z2});
  }
  CHECK_THROWS_WITH_AS(fit_traditional(data),
                       doctest::Contains("traditional fit"),
                       IdentificationError);
}
