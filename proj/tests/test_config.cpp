#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "seqpred/seqpred.hpp"

using namespace seqpred;
using Catch::Approx;

namespace {

const char* kFullConfig = R"(# a bernoulli pair environment
env = bernoulli_pair
n = 12
mode = exact
seed = 42

[model]
kind = bernoulli
theta = 1/3

[model]
kind = bernoulli
theta = 2/3

weights = uniform
mu_index = 1

[loss]
table = 0 1 1 0
l_min = 0
l_max = 1
)";

}  // namespace

TEST_CASE("a full config parses and builds") {
  const ExperimentConfig cfg = parse_experiment_config(kFullConfig);
  CHECK(cfg.env_id == "bernoulli_pair");
  CHECK(cfg.horizons == std::vector<int>{12});
  CHECK(cfg.mode == "exact");
  CHECK(cfg.seed == 42);
  REQUIRE(cfg.models.size() == 2);
  CHECK(cfg.models[0].theta == Approx(1.0 / 3.0).epsilon(1e-15));

  const ModelClass mc = cfg.build_model_class();
  CHECK(mc.size() == 2);
  CHECK(mc.weight(0) == 0.5);

  const Measure mu = cfg.build_mu();
  CHECK(mu == Measure::bernoulli(2.0 / 3.0));
  CHECK(cfg.resolve_mu_index(mc) == 1);

  const LossSpec loss = cfg.build_loss();
  CHECK(loss.static_table()->v[0][1] == 1.0);
  CHECK(loss.l_min() == 0.0);
  CHECK(loss.l_max() == 1.0);

  CHECK(cfg.raw_text.find("theta = 2/3") != std::string::npos);  // fractions survive verbatim
}

TEST_CASE("fractions parse exactly as quotients") {
  CHECK(parse_number("1/3") == Approx(1.0 / 3.0).epsilon(1e-17));
  CHECK(parse_number("-1/2") == -0.5);
  CHECK(parse_number("5/18") == Approx(5.0 / 18.0).epsilon(1e-17));
  CHECK(parse_number("0.25") == 0.25);
  CHECK(parse_number("2") == 2.0);
  CHECK_THROWS_AS(parse_number("1/0"), ConfigError);
  CHECK_THROWS_AS(parse_number("abc"), ConfigError);
  CHECK_THROWS_AS(parse_number("1.2.3"), ConfigError);
}

TEST_CASE("measure declarations cover every kind") {
  const char* text = R"(
[model]
kind = deterministic
head = 01
cycle = 110

[model]
kind = markov
order = 2
table = 0.1 0.9 0.4 0.7
initial = 0.4 0.1 0.3 0.2

[model]
kind = bernoulli
theta = 0.25

weights = 0.5 0.25 0.25
mu_index = 0
)";
  const ExperimentConfig cfg = parse_experiment_config(text);
  const ModelClass mc = cfg.build_model_class();
  REQUIRE(mc.size() == 3);
  CHECK(mc.model(0) == Measure::deterministic(BitString("01"), BitString("110")));
  CHECK(mc.model(2) == Measure::bernoulli(0.25));
  CHECK(mc.weight(1) == 0.25);
  CHECK(conditional_prob(mc.model(1), BitString("0"), 1) == Approx(0.2).margin(1e-15));
}

TEST_CASE("weights via complexities") {
  const char* text = R"(
[model]
kind = bernoulli
theta = 0.2

[model]
kind = bernoulli
theta = 0.8

complexities = 1 2
mu_index = 0
)";
  const ModelClass mc = parse_experiment_config(text).build_model_class();
  CHECK(mc.weight(0) == Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(mc.weight(1) == Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("a separate mu section resolves against the class by structure") {
  const char* text = R"(
[model]
kind = bernoulli
theta = 1/3

[model]
kind = bernoulli
theta = 2/3

[mu]
kind = bernoulli
theta = 2/3
)";
  const ExperimentConfig cfg = parse_experiment_config(text);
  const ModelClass mc = cfg.build_model_class();
  CHECK(cfg.resolve_mu_index(mc) == 1);
}

TEST_CASE("config validation failures name the problem") {
  // weights off normalization
  const char* bad_weights = R"(
[model]
kind = bernoulli
theta = 0.5

[model]
kind = bernoulli
theta = 0.6

weights = 0.45 0.45
mu_index = 0
)";
  CHECK_THROWS_MATCHES(parse_experiment_config(bad_weights).build_model_class(), ConfigError,
                       Catch::Matchers::MessageMatches(
                           Catch::Matchers::ContainsSubstring("sum to 1")));

  // mu missing from the class when membership is required
  const char* mu_outside = R"(
[model]
kind = bernoulli
theta = 0.5

[mu]
kind = bernoulli
theta = 0.7
)";
  const ExperimentConfig cfg = parse_experiment_config(mu_outside);
  CHECK_THROWS_AS(cfg.resolve_mu_index(cfg.build_model_class()), ConfigError);

  CHECK_THROWS_AS(parse_experiment_config("nonsense line"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("[oops]\n"), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("mode = sometimes\n"), ConfigError);

  // loss table entry outside the declared range
  const char* bad_loss = R"(
[model]
kind = bernoulli
theta = 0.5

mu_index = 0

[loss]
table = 0 2 1 0
l_min = 0
l_max = 1
)";
  CHECK_THROWS_AS(parse_experiment_config(bad_loss).build_loss(), ConfigError);

  // wrong table arity
  const char* short_loss = R"(
[loss]
table = 0 1 1
)";
  CHECK_THROWS_AS(parse_experiment_config(short_loss).build_loss(), ConfigError);

  // errors carry the line number
  try {
    parse_experiment_config("env = ok\ntheta = oops\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("loss schedules parse") {
  const char* text = R"(
[loss]
table = 0 1 1 0
schedule = periodic-mask
period = 3
)";
  const LossSpec loss = parse_experiment_config(text).build_loss();
  CHECK(loss(2, BitString(), 1, 0) == 0.0);
  CHECK(loss(3, BitString(), 1, 0) == 1.0);

  CHECK_THROWS_AS(parse_experiment_config("[loss]\ntable = 0 1 1 0\nschedule = hourly\n").build_loss(),
                  ConfigError);
}

TEST_CASE("profit sections build game specs with derived and declared ranges") {
  const char* text = R"(
env = coin
n = 6

[model]
kind = bernoulli
theta = 0.4

[model]
kind = bernoulli
theta = 0.6

mu_index = 1

[profit]
table = 1 -1 -1 1
)";
  const ExperimentConfig cfg = parse_experiment_config(text);
  const GameSpec spec = cfg.build_game(6);
  CHECK(spec.p_max == 1.0);
  CHECK(spec.p_delta == 2.0);
  CHECK(spec.n == 6);
  // the induced loss is the negated table with the declared range
  const LossSpec loss = spec.as_loss();
  CHECK(loss(1, BitString(), 0, 0) == -1.0);
  CHECK(loss.l_min() == -1.0);
  CHECK(loss.l_max() == 1.0);

  const char* declared = R"(
[model]
kind = bernoulli
theta = 0.6

mu_index = 0

[profit]
table = 1 -1 -1 1
p_max = 2
p_delta = 4
)";
  const GameSpec wide = parse_experiment_config(declared).build_game(4);
  CHECK(wide.p_max == 2.0);
  CHECK(wide.p_delta == 4.0);
}

TEST_CASE("defaults: horizon, mode, loss and grid") {
  const ExperimentConfig cfg = parse_experiment_config("env = empty\n");
  CHECK(cfg.horizons == std::vector<int>{8});
  CHECK(cfg.mode == "exact");
  CHECK(cfg.samples == 100000);
  const LossSpec loss = cfg.build_loss();  // defaults to the error loss
  CHECK(loss.static_table()->v[1][0] == 1.0);
  CHECK(cfg.grid.resolution == 2000);
  CHECK(cfg.grid.a_values.size() == 8);
}

TEST_CASE("grid section overrides") {
  const char* text = R"(
[grid]
a_values = 0.5 2
resolution = 128
tolerance = 1e-8
)";
  const ExperimentConfig cfg = parse_experiment_config(text);
  CHECK(cfg.grid.a_values == std::vector<double>{0.5, 2.0});
  CHECK(cfg.grid.resolution == 128);
  CHECK(cfg.grid.tolerance == 1e-8);
}
