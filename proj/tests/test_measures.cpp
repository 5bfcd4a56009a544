#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "oracle.hpp"
#include "seqpred/seqpred.hpp"

using namespace seqpred;
using Catch::Approx;

namespace {

std::vector<Measure> sample_measures() {
  return {
      Measure::bernoulli(0.3),
      Measure::bernoulli(2.0 / 3.0),
      Measure::markov(2, {0.1, 0.9, 0.4, 0.7}),
      Measure::markov(2, {0.5, 0.25, 0.75, 0.5}, {0.4, 0.1, 0.3, 0.2}),
      Measure::deterministic(BitString("01"), BitString("110")),
      Measure::deterministic(BitString(""), BitString("1")),
  };
}

BitString nth_string(std::uint64_t bits, int len) {
  BitString s;
  for (int i = len - 1; i >= 0; --i) s.push_back(static_cast<int>((bits >> i) & 1));
  return s;
}

}  // namespace

TEST_CASE("bernoulli probabilities match closed forms") {
  CHECK(measure_prob(Measure::bernoulli(0.5), BitString("101")).linear() == Approx(0.125).epsilon(1e-14));
  CHECK(measure_prob(Measure::bernoulli(2.0 / 3.0), BitString("110")).linear() ==
        Approx(4.0 / 27.0).epsilon(1e-12));
  CHECK(measure_prob(Measure::bernoulli(0.3), BitString()).linear() == 1.0);
}

TEST_CASE("deterministic measures put mass 1 on a single sequence") {
  const Measure ones = Measure::deterministic(BitString(""), BitString("1"));
  CHECK(measure_prob(ones, BitString("110")).is_zero());
  CHECK(measure_prob(ones, BitString("1111")).linear() == 1.0);

  const Measure m = Measure::deterministic(BitString("01"), BitString("110"));
  // head 01, then cycle 110 repeating: 01 110 110 ...
  CHECK(measure_prob(m, BitString("01110110")).linear() == 1.0);
  CHECK(measure_prob(m, BitString("01110111")).is_zero());

  // Exactly one prefix per level carries probability 1.
  for (int len = 1; len <= 16; ++len) {
    int alive = 0;
    for (std::uint64_t b = 0; b < (std::uint64_t{1} << std::min(len, 12)); ++b) {
      // restrict full enumeration to 12 bits; deeper levels spot-check below
      if (len > 12) break;
      const LogProb p = measure_prob(m, nth_string(b, len));
      if (!p.is_zero()) {
        CHECK(p.linear() == 1.0);
        ++alive;
      }
    }
    if (len <= 12) CHECK(alive == 1);
  }
}

TEST_CASE("conditionals follow the table, the cycle and the chain") {
  CHECK(conditional_prob(Measure::bernoulli(0.3), BitString("0110"), 1) == 0.3);
  CHECK(conditional_prob(Measure::deterministic(BitString(""), BitString("10")), BitString("10"), 1) == 1.0);
  const Measure mk = Measure::markov(1, {0.2, 0.9});
  CHECK(conditional_prob(mk, BitString("01"), 1) == 0.9);
  CHECK(conditional_prob(mk, BitString("10"), 1) == 0.2);
}

TEST_CASE("conditioning on a null prefix is an error") {
  const Measure ones = Measure::deterministic(BitString(""), BitString("1"));
  CHECK_THROWS_AS(conditional_prob(ones, BitString("0"), 1), UndefinedConditional);
}

TEST_CASE("conditionals of each kind sum to one") {
  for (const auto& m : sample_measures()) {
    for (std::uint64_t b = 0; b < 32; ++b) {
      const BitString prefix = nth_string(b, 5);
      if (measure_prob(m, prefix).is_zero()) continue;
      const double c0 = conditional_prob(m, prefix, 0);
      const double c1 = conditional_prob(m, prefix, 1);
      CHECK(c0 + c1 == Approx(1.0).margin(1e-12));
    }
  }
}

TEST_CASE("measure additivity on all prefixes up to length 16") {
  for (const auto& m : sample_measures()) {
    // full tree to depth 8, then a deep alternating tail
    for (int len = 0; len <= 8; ++len) {
      for (std::uint64_t b = 0; b < (std::uint64_t{1} << len); ++b) {
        const BitString x = nth_string(b, len);
        const double px = measure_prob(m, x).linear();
        BitString x0 = x, x1 = x;
        x0.push_back(0);
        x1.push_back(1);
        const double sum = measure_prob(m, x0).linear() + measure_prob(m, x1).linear();
        if (px == 0.0) {
          CHECK(sum == 0.0);
        } else {
          CHECK(sum == Approx(px).epsilon(1e-12));
        }
      }
    }
    BitString deep;
    for (int t = 0; t < 16; ++t) {
      const double px = measure_prob(m, deep).linear();
      BitString x0 = deep, x1 = deep;
      x0.push_back(0);
      x1.push_back(1);
      const double sum = measure_prob(m, x0).linear() + measure_prob(m, x1).linear();
      if (px > 0.0) CHECK(sum == Approx(px).epsilon(1e-12));
      deep.push_back(t % 2);
    }
  }
}

TEST_CASE("per-level normalization up to length 12") {
  for (const auto& m : sample_measures()) {
    for (int len : {4, 8, 12}) {
      long double total = 0.0L;
      for (std::uint64_t b = 0; b < (std::uint64_t{1} << len); ++b) {
        total += measure_prob(m, nth_string(b, len)).linear();
      }
      CHECK(static_cast<double>(total) == Approx(1.0).margin(1e-10));
    }
  }
}

TEST_CASE("probabilities agree with the brute-force oracle") {
  for (const auto& m : sample_measures()) {
    for (int len : {0, 1, 3, 6}) {
      for (std::uint64_t b = 0; b < (std::uint64_t{1} << len); ++b) {
        const BitString x = nth_string(b, len);
        const double expected = static_cast<double>(oracle::prob(m, x));
        const LogProb got = measure_prob(m, x);
        if (expected == 0.0) {
          CHECK(got.is_zero());
        } else {
          CHECK(got.linear() == Approx(expected).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("markov startup marginals come from the initial distribution") {
  const Measure m = Measure::markov(2, {0.5, 0.5, 0.5, 0.5}, {0.4, 0.1, 0.3, 0.2});
  CHECK(conditional_prob(m, BitString(), 1) == Approx(0.5).margin(1e-15));
  CHECK(conditional_prob(m, BitString("0"), 1) == Approx(0.2).margin(1e-15));
  CHECK(conditional_prob(m, BitString("1"), 0) == Approx(0.6).margin(1e-15));

  // Default startup is uniform.
  const Measure u = Measure::markov(2, {0.1, 0.9, 0.4, 0.7});
  CHECK(conditional_prob(u, BitString(), 1) == 0.5);
  CHECK(conditional_prob(u, BitString("1"), 1) == 0.5);
  CHECK(conditional_prob(u, BitString("10"), 1) == 0.4);
}

TEST_CASE("log-space survives products that underflow linear doubles") {
  const Measure m = Measure::bernoulli(0.001);
  BitString x = BitString::repeated(1, 2000);
  const LogProb p = measure_prob(m, x);
  CHECK_FALSE(p.is_zero());
  CHECK(p.log() == Approx(2000.0 * std::log(0.001)).epsilon(1e-12));
  CHECK(p.linear() == 0.0);  // underflow in linear space, still not an exact zero
}

TEST_CASE("construction rejects invalid parameters") {
  CHECK_THROWS_AS(Measure::bernoulli(1.5), ConfigError);
  CHECK_THROWS_AS(Measure::bernoulli(-0.1), ConfigError);
  CHECK_THROWS_AS(Measure::markov(0, {0.5}), ConfigError);
  CHECK_THROWS_AS(Measure::markov(2, {0.5, 0.5}), ConfigError);
  CHECK_THROWS_AS(Measure::markov(1, {0.5, 1.5}), ConfigError);
  CHECK_THROWS_AS(Measure::markov(1, {0.5, 0.5}, {0.9, 0.2}), ConfigError);
  CHECK_THROWS_AS(Measure::deterministic(BitString("1"), BitString("")), ConfigError);
  CHECK_THROWS_AS(BitString("012"), ConfigError);
}

TEST_CASE("measures compare structurally") {
  CHECK(Measure::bernoulli(0.5) == Measure::bernoulli(0.5));
  CHECK_FALSE(Measure::bernoulli(0.5) == Measure::bernoulli(0.25));
  CHECK_FALSE(Measure::bernoulli(0.5) == Measure::deterministic(BitString(""), BitString("1")));
  CHECK(Measure::deterministic(BitString("0"), BitString("10")) ==
        Measure::deterministic(BitString("0"), BitString("10")));
}
