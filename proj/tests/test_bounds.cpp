#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "test_classes.hpp"
#include "seqpred/seqpred.hpp"

using namespace seqpred;
using Catch::Approx;

TEST_CASE("unit loss bound formula") {
  CHECK(unit_loss_bound(5.0, 0.0) == 0.0);
  // with an error-free informed scheme the excess is at most twice the entropy
  CHECK(unit_loss_bound(0.0, 0.7) == Approx(1.4).epsilon(1e-15));
  const double h = std::log(2.0);
  CHECK(unit_loss_bound(100.0, h) == Approx(h + std::sqrt(400.0 * h + h * h)).epsilon(1e-15));
  CHECK(unit_loss_bound(100.0, h) == Approx(17.357).margin(5e-3));
  CHECK_THROWS_AS(unit_loss_bound(-1.0, 0.5), InvalidRange);
  CHECK_THROWS_AS(unit_loss_bound(1.0, -0.5), InvalidRange);
}

TEST_CASE("general loss bound formula and its reduction to the unit case") {
  CHECK(general_loss_bound(3.0, 0.0, 10, 0.0, 1.0) == 0.0);

  const double h = std::log(2.0);
  const double expect = 2.0 * h + std::sqrt(4.0 * 50.0 * 2.0 * h + 4.0 * h * h);
  CHECK(general_loss_bound(-50.0, h, 100, -1.0, 2.0) == Approx(expect).epsilon(1e-15));
  CHECK(general_loss_bound(-50.0, h, 100, -1.0, 2.0) == Approx(18.096).margin(5e-3));

  std::mt19937 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    const double lm = unif(rng);
    const double hh = unif(rng);
    CHECK(general_loss_bound(lm, hh, 7, 0.0, 1.0) == unit_loss_bound(lm, hh));
  }

  CHECK_THROWS_AS(general_loss_bound(-1.0, 0.5, 10, 0.0, 1.0), InvalidRange);
  CHECK_THROWS_AS(general_loss_bound(5.0, 0.5, 10, 1.0, 1.0), InvalidRange);  // L_mu < n l_min
}

TEST_CASE("bound sandwich on every environment with the error loss") {
  const int n = 12;
  for (const auto& [name, mc] : testenv::fixed_classes()) {
    INFO("class " << name);
    for (std::size_t i = 0; i < mc.size(); ++i) {
      const BoundCheck bc = check_bounds(mc.model(i), mc, LossSpec::error_loss(), n);
      CHECK(bc.diff_nonneg);
      CHECK(bc.unit.pass);
      CHECK(bc.general.pass);
      CHECK(bc.pass());
    }
  }
}

TEST_CASE("check_bounds worked cases") {
  // singleton: both schemes coincide, zero difference against a zero bound
  const ModelClass single = ModelClass::uniform({Measure::bernoulli(2.0 / 3.0)});
  const BoundCheck s = check_bounds(Measure::bernoulli(2.0 / 3.0), single, LossSpec::error_loss(), 10);
  CHECK(s.loss_xi == s.loss_mu);
  CHECK(s.entropy == 0.0);
  CHECK(s.unit.bound == 0.0);
  CHECK(s.unit.measured == 0.0);
  CHECK(s.pass());

  // deterministic pair: one tie error against a 2 ln 2 budget
  const ModelClass pair = ModelClass::uniform({testenv::det_all(0), testenv::det_all(1)});
  const BoundCheck d = check_bounds(testenv::det_all(1), pair, LossSpec::error_loss(), 8);
  CHECK(d.loss_xi - d.loss_mu == 1.0);
  CHECK(d.unit.bound == Approx(2.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(d.pass());

  // Bernoulli pair at n = 12
  const ModelClass bp =
      ModelClass::uniform({Measure::bernoulli(1.0 / 3.0), Measure::bernoulli(2.0 / 3.0)});
  const BoundCheck b = check_bounds(Measure::bernoulli(2.0 / 3.0), bp, LossSpec::error_loss(), 12);
  CHECK(b.unit.slack >= 0.0);
  CHECK(b.general.slack >= 0.0);
  CHECK(b.pass());

  // constant loss: degenerate range, zero difference by indifference
  const BoundCheck c =
      check_bounds(Measure::bernoulli(2.0 / 3.0), bp, LossSpec::table(LossTable::of(0.4, 0.4, 0.4, 0.4)), 8);
  CHECK(c.general.measured == 0.0);
  CHECK(c.pass());
}

TEST_CASE("general bound holds for shifted and widened loss ranges") {
  const ModelClass bp =
      ModelClass::uniform({Measure::bernoulli(1.0 / 3.0), Measure::bernoulli(2.0 / 3.0)});
  const Measure mu = Measure::bernoulli(2.0 / 3.0);
  // error table mapped affinely to [-1,1] and [5,7]
  const LossSpec wide = LossSpec::table(LossTable::of(-1.0, 1.0, 1.0, -1.0), -1.0, 1.0);
  const LossSpec shifted = LossSpec::table(LossTable::of(5.0, 7.0, 7.0, 5.0), 5.0, 7.0);
  for (const LossSpec& loss : {wide, shifted}) {
    const BoundCheck bc = check_bounds(mu, bp, loss, 10);
    CHECK(bc.pass());
  }

  // decisions must match the unit-range run exactly
  const auto base = exact_action_trace(mu, Predictor::mixture(bp, LossSpec::error_loss()), 10);
  CHECK(base == exact_action_trace(mu, Predictor::mixture(bp, wide), 10));
  CHECK(base == exact_action_trace(mu, Predictor::mixture(bp, shifted), 10));
}

TEST_CASE("quotient of universal to informed loss approaches one") {
  const ModelClass bp =
      ModelClass::uniform({Measure::bernoulli(1.0 / 3.0), Measure::bernoulli(2.0 / 3.0)});
  const Measure mu = Measure::bernoulli(2.0 / 3.0);
  const LossSpec err = LossSpec::error_loss();
  const StepLoss xi = exact_expected_loss(mu, Predictor::mixture(bp, err), 12);
  const StepLoss inf = exact_expected_loss(mu, Predictor::informed(mu, err), 12);
  const double q4 = xi.cumulative[3] / inf.cumulative[3];
  const double q12 = xi.cumulative[11] / inf.cumulative[11];
  CHECK(std::abs(q12 - 1.0) < std::abs(q4 - 1.0));
  CHECK(q12 >= 1.0 - 1e-12);
}

TEST_CASE("adversarial family: the universal scheme pays log2(class size)") {
  const LossSpec err = LossSpec::error_loss();
  for (int k = 2; k <= 5; ++k) {
    INFO("k = " << k);
    const ModelClass family = ModelClass::uniform(testenv::det_prefix_family(k));
    const Measure mu = Measure::deterministic(BitString::repeated(1, k), BitString("0"));
    REQUIRE(family.find(mu).has_value());

    const Predictor xi = Predictor::mixture(family, err);
    const StepLoss at_k = exact_expected_loss(mu, xi, k);
    CHECK(at_k.cumulative.back() >= static_cast<double>(k));
    CHECK(at_k.cumulative.back() == static_cast<double>(k));  // every early step is a tie error

    // while the deterministic upper bound keeps holding
    const double d_mu = static_cast<double>(k) * std::log(2.0);
    const StepLoss longer = exact_expected_loss(mu, xi, k + 6);
    for (double cum : longer.cumulative) {
      CHECK(cum <= 2.0 * d_mu + 1e-9);
    }
  }
}

TEST_CASE("proof inequality grid: worked values") {
  // diagonal of the lower branch collapses to A*y
  {
    InequalityGridSpec spec;
    const double a = 0.7, y = 0.3, z = 0.3;
    const double b1 = a / 4.0 + 1.0 / a + 1.0;
    const double f = b1 * 0.0 + (a + 1.0) * (1.0 - y) * z / (1.0 - z) - y;
    CHECK(f == Approx(a * y).epsilon(1e-12));
  }

  // the spec'd sample point: A = 1, y = 0.9, z = 0.1
  {
    const double a1 = 2.0, b1 = 2.25, y = 0.9, z = 0.1;
    const double kl = y * std::log(y / z) + (1.0 - y) * std::log((1.0 - y) / (1.0 - z));
    const double f = b1 * kl + a1 * (1.0 - y) * z / (1.0 - z) - y;
    CHECK(f == Approx(3.0772).margin(2e-4));
    CHECK(f >= 0.0);
  }
}

TEST_CASE("proof inequality grid: minima stay nonnegative at modest resolution") {
  InequalityGridSpec spec;
  spec.resolution = 401;
  const InequalityGridResult r = verify_proof_inequalities(spec);
  REQUIRE(r.rows.size() == spec.a_values.size());
  for (const auto& row : r.rows) {
    INFO("A = " << row.a);
    CHECK(row.min_low >= -spec.tolerance);
    CHECK(row.min_high >= -spec.tolerance);
    CHECK(row.b == Approx(row.a / 4.0 + 1.0 / row.a).epsilon(1e-15));
  }
  CHECK(r.pass(spec.tolerance));
}

TEST_CASE("both branches agree where they meet at z = 1/2") {
  const double b1 = 2.25, a1 = 2.0;
  for (double y : {0.0, 0.25, 0.5, 0.9, 1.0}) {
    const double z = 0.5;
    const double kl = y == 0.0   ? -std::log1p(-z)
                      : y == 1.0 ? -std::log(z)
                                 : y * std::log(y / z) + (1.0 - y) * std::log((1.0 - y) / (1.0 - z));
    const double low = b1 * kl + a1 * (1.0 - y) * z / (1.0 - z) - y;
    const double high = b1 * kl + a1 * (1.0 - y) - y * (1.0 - z) / z;
    CHECK(low == high);
  }
}

TEST_CASE("grid spec validation") {
  InequalityGridSpec bad;
  bad.resolution = 1;
  CHECK_THROWS_AS(verify_proof_inequalities(bad), ConfigError);
  bad.resolution = 100;
  bad.a_values = {0.0};
  CHECK_THROWS_AS(verify_proof_inequalities(bad), ConfigError);
}
