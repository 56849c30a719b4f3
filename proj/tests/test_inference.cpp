#include <doctest.h>

#include <cmath>

#include "causalmed/effects.hpp"
#include "causalmed/error.hpp"
#include "causalmed/estimation.hpp"
#include "causalmed/inference.hpp"
#include "causalmed/rng.hpp"
#include "causalmed/simulation.hpp"

using namespace causalmed;

TEST_CASE("percentile interval examples") {
  CHECK(percentile_interval({1, 2, 3, 4, 5}, 0.5) ==
        ConfidenceInterval{2.0, 4.0});
  CHECK(percentile_interval({7.25, 7.25, 7.25}, 0.9) ==
        ConfidenceInterval{7.25, 7.25});

  std::vector<double> ramp(1000);
  for (std::size_t i = 0; i < ramp.size(); ++i) {
    ramp[i] = static_cast<double>(i);
  }
  const auto ci = percentile_interval(ramp, 0.95);
  CHECK(ci.lo == doctest::Approx(24.975).epsilon(1e-12));
  CHECK(ci.hi == doctest::Approx(974.025).epsilon(1e-12));
}

TEST_CASE("percentile intervals are monotone in the level") {
  std::vector<double> samples;
  rng::RandomStream rs(1234);
  for (int i = 0; i < 500; ++i) {
    samples.push_back(rs.next_normal() * 3.0 + 1.0);
  }
  double prev_lo = -1e300;
  double prev_hi = 1e300;
  for (double level : {0.99, 0.95, 0.8, 0.5, 0.2}) {
    const auto ci = percentile_interval(samples, level);
    CHECK(ci.lo <= ci.hi);
    CHECK(ci.lo >= prev_lo);
    CHECK(ci.hi <= prev_hi);
    prev_lo = ci.lo;
    prev_hi = ci.hi;
  }
}

TEST_CASE("percentile interval input validation") {
  CHECK_THROWS_AS(percentile_interval({}, 0.5), ConfigError);
  CHECK_THROWS_AS(percentile_interval({1.0, 2.0}, 0.0), ConfigError);
  CHECK_THROWS_AS(percentile_interval({1.0, 2.0}, 1.0), ConfigError);
}

namespace {

std::vector<EffectContrast> unit_contrasts() {
  return {EffectContrast{0, 2.0, 1.0, std::nullopt},
          EffectContrast{1, 2.0, 1.0, std::nullopt},
          EffectContrast{2, 2.0, 1.0, std::nullopt}};
}

}  // namespace

TEST_CASE("noiseless bootstrap collapses to the point estimate") {
  const BasisSpec spec = simulation::study_basis(1);
  const simulation::StudyDGP dgp{1, 120, 808};
  const ObservationTable data =
      simulation::generate_study_dataset(dgp, /*noise_scale=*/0.0);
  const BootstrapConfig cfg{64, 0.95, 99};
  const auto result = bootstrap_effects(spec, data, unit_contrasts(), cfg);
  CHECK(result.discarded == 0);
  for (const auto& est : result.effects) {
    REQUIRE(est.nde_ci.has_value());
    CHECK(std::abs(est.nde_ci->hi - est.nde_ci->lo) < 1e-9);
    CHECK(std::abs(est.nde_ci->lo - est.nde) < 1e-9);
    CHECK(std::abs(est.te_ci->hi - est.te_ci->lo) < 1e-9);
    CHECK(std::abs(est.te_ci->lo - est.te) < 1e-9);
  }
}

TEST_CASE("bootstrap is a pure function of its inputs") {
  const BasisSpec spec = simulation::study_basis(2);
  const simulation::StudyDGP dgp{2, 90, 515};
  const ObservationTable data = simulation::generate_study_dataset(dgp);
  const BootstrapConfig cfg{100, 0.9, 31337};
  const auto a = bootstrap_effects(spec, data, unit_contrasts(), cfg);
  const auto b = bootstrap_effects(spec, data, unit_contrasts(), cfg);
  CHECK(a.effects == b.effects);
  CHECK(a.discarded == b.discarded);

  // Thread count must not change anything.
  const auto serial = bootstrap_effects(spec, data, unit_contrasts(), cfg, 1);
  const auto parallel = bootstrap_effects(spec, data, unit_contrasts(), cfg, 4);
  CHECK(serial.effects == parallel.effects);

  // A different seed reshuffles the resamples.
  const BootstrapConfig other{100, 0.9, 31338};
  const auto c = bootstrap_effects(spec, data, unit_contrasts(), other);
  CHECK(a.effects != c.effects);
}

TEST_CASE("point estimates come from the original-data fit") {
  const BasisSpec spec = simulation::study_basis(2);
  const simulation::StudyDGP dgp{2, 150, 2222};
  const ObservationTable data = simulation::generate_study_dataset(dgp);
  const FittedMediation fit = fit_proposed(spec, data);
  const auto base = effect_table(fit, data, unit_contrasts());
  const BootstrapConfig cfg{50, 0.95, 7};
  const auto result = bootstrap_effects(spec, data, unit_contrasts(), cfg);
  REQUIRE(result.effects.size() == base.size());
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(result.effects[i].nde == base[i].nde);
    CHECK(result.effects[i].nie == base[i].nie);
    CHECK(result.effects[i].te == base[i].te);
    CHECK(result.effects[i].te == result.effects[i].nde + result.effects[i].nie);
  }
}

TEST_CASE("study-1 interval width is in line with the replication SE") {
  // Monte-Carlo SE of the proposed NDE1 estimate at n = 500 is about 0.64,
  // so the 95% percentile half-width should fall within a factor two of
  // 1.96 * 0.64.
  const BasisSpec spec = simulation::study_basis(1);
  const simulation::StudyDGP dgp{1, 500, 314159};
  const ObservationTable data = simulation::generate_study_dataset(dgp);
  const BootstrapConfig cfg{500, 0.95, 2718};
  const auto result = bootstrap_effects(
      spec, data, {EffectContrast{0, 2.0, 1.0, std::nullopt}}, cfg);
  REQUIRE(result.effects[0].nde_ci.has_value());
  const auto& ci = *result.effects[0].nde_ci;
  const double half_width = (ci.hi - ci.lo) / 2.0;
  const double reference = 1.96 * 0.643;
  CHECK(half_width >= reference / 2.0);
  CHECK(half_width <= reference * 2.0);
}

TEST_CASE("bootstrap fails loudly when too many replicates degenerate") {
  // z1 has a single row at level 3; resamples that miss it collapse the
  // quadratic column, so well over 10% of replicates must be discarded.
  BasisSpec spec;
  spec.variables = {"z1"};
  spec.terms = {BasisTerm::intercept(), BasisTerm::monomial(0),
                BasisTerm::monomial(0, 2)};
  spec.outcome_count = 2;
  ObservationTable data;
  data.treatment_names = {"z1"};
  rng::RandomStream rs(6);
  for (int i = 0; i < 24; ++i) {
    const double z = i == 0 ? 3.0 : (i % 2 == 0 ? 1.0 : 2.0);
    const double m = 1.0 + z + 0.5 * z * z + 0.1 * rs.next_normal();
    const double y = 2.0 + z + 1.5 * m + 0.1 * rs.next_normal();
    data.rows.push_back(ObservationRow{TreatmentProfile{{z}}, m, y});
  }
  const BootstrapConfig cfg{200, 0.95, 11};
  CHECK_THROWS_WITH_AS(
      bootstrap_effects(spec, data,
                        {EffectContrast{0, 2.0, 1.0, std::nullopt}}, cfg),
      doctest::Contains("10%"), IdentificationError);
}

TEST_CASE("bootstrap config validation") {
  const BasisSpec spec = simulation::study_basis(1);
  const simulation::StudyDGP dgp{1, 60, 404};
  const ObservationTable data = simulation::generate_study_dataset(dgp);
  CHECK_THROWS_AS(bootstrap_effects(spec, data, unit_contrasts(),
                                    BootstrapConfig{1, 0.95, 0}),
                  ConfigError);
  CHECK_THROWS_AS(bootstrap_effects(spec, data, unit_contrasts(),
                                    BootstrapConfig{10, 1.5, 0}),
                  ConfigError);
}
