#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "seqpred/bitstring.hpp"
#include "seqpred/errors.hpp"
#include "seqpred/logprob.hpp"

namespace seqpred {

// P(bit = 1) = theta, independently at every step.
struct Bernoulli {
  double theta = 0.5;
  bool operator==(const Bernoulli&) const = default;
};

// Binary Markov chain of fixed order k >= 1. Contexts are the last k bits
// packed oldest-first (the bit k steps back is the most significant), and
// next_one[c] = P(next = 1 | context c). The first k bits are drawn from
// `initial`, a distribution over all length-k strings with the same
// packing; uniform unless overridden.
struct MarkovBinary {
  int order = 1;
  std::vector<double> next_one;
  std::vector<double> initial;
  bool operator==(const MarkovBinary&) const = default;
};

// Probability 1 on the single infinite sequence head . cycle . cycle . ...
// and 0 on every prefix inconsistent with it.
struct DeterministicSeq {
  BitString head;
  BitString cycle;
  bool operator==(const DeterministicSeq&) const = default;
};

inline constexpr int kMaxMarkovOrder = 12;

class Measure {
 public:
  using Kind = std::variant<Bernoulli, MarkovBinary, DeterministicSeq>;

  Measure(Bernoulli b) : kind_(validate(std::move(b))) {}          // NOLINT(google-explicit-constructor)
  Measure(MarkovBinary m) : kind_(validate(std::move(m))) {}       // NOLINT(google-explicit-constructor)
  Measure(DeterministicSeq d) : kind_(validate(std::move(d))) {}   // NOLINT(google-explicit-constructor)

  static Measure bernoulli(double theta) { return Measure(Bernoulli{theta}); }

  static Measure markov(int order, std::vector<double> next_one, std::vector<double> initial = {}) {
    return Measure(MarkovBinary{order, std::move(next_one), std::move(initial)});
  }

  static Measure deterministic(BitString head, BitString cycle) {
    return Measure(DeterministicSeq{std::move(head), std::move(cycle)});
  }

  const Kind& kind() const { return kind_; }

  bool operator==(const Measure&) const = default;

 private:
  static Kind validate(Bernoulli b) {
    if (!(b.theta >= 0.0 && b.theta <= 1.0)) {
      throw ConfigError("bernoulli theta must lie in [0,1]");
    }
    return b;
  }

  static Kind validate(MarkovBinary m) {
    if (m.order < 1 || m.order > kMaxMarkovOrder) {
      throw ConfigError("markov order must lie in [1, " + std::to_string(kMaxMarkovOrder) + "]");
    }
    const std::size_t n_ctx = std::size_t{1} << m.order;
    if (m.next_one.size() != n_ctx) {
      throw ConfigError("markov table must have one entry per length-" + std::to_string(m.order) +
                        " context (" + std::to_string(n_ctx) + " values)");
    }
    for (double p : m.next_one) {
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("markov table entries must lie in [0,1]");
    }
    if (m.initial.empty()) {
      m.initial.assign(n_ctx, 1.0 / static_cast<double>(n_ctx));
    } else {
      if (m.initial.size() != n_ctx) {
        throw ConfigError("markov initial distribution must have " + std::to_string(n_ctx) + " values");
      }
      double sum = 0.0;
      for (double p : m.initial) {
        if (!(p >= 0.0)) throw ConfigError("markov initial entries must be nonnegative");
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-9) {
        throw ConfigError("markov initial distribution must sum to 1");
      }
      for (double& p : m.initial) p /= sum;
    }
    return m;
  }

  static Kind validate(DeterministicSeq d) {
    if (d.cycle.empty()) throw ConfigError("deterministic cycle must be nonempty");
    return d;
  }

  Kind kind_;
};

// Incremental conditional evaluation along a growing prefix. A cursor
// points into its Measure and must not outlive it.
class MeasureCursor {
 public:
  explicit MeasureCursor(const Measure& m) {
    if (const auto* b = std::get_if<Bernoulli>(&m.kind())) {
      st_ = BernoulliState{b};
    } else if (const auto* mk = std::get_if<MarkovBinary>(&m.kind())) {
      st_ = MarkovState{mk, 0, 0, 1.0};
    } else {
      st_ = DetState{&std::get<DeterministicSeq>(m.kind()), 0};
    }
  }

  bool alive() const { return alive_; }

  // P(bit | prefix consumed so far); requires alive().
  double cond(int bit) const {
    assert(alive_);
    if (const auto* s = std::get_if<BernoulliState>(&st_)) {
      return bit ? s->m->theta : 1.0 - s->m->theta;
    }
    if (const auto* s = std::get_if<MarkovState>(&st_)) {
      if (s->pos < s->m->order) {
        return initial_mass(*s->m, s->ctx, s->pos, bit) / s->prefix_mass;
      }
      const double q = s->m->next_one[s->ctx];
      return bit ? q : 1.0 - q;
    }
    const auto& s = std::get<DetState>(st_);
    return forced_bit(*s.m, s.pos) == bit ? 1.0 : 0.0;
  }

  void advance(int bit) {
    assert(alive_);
    if (std::holds_alternative<BernoulliState>(st_)) {
      if (cond(bit) == 0.0) alive_ = false;
      return;
    }
    if (auto* s = std::get_if<MarkovState>(&st_)) {
      if (s->pos < s->m->order) {
        s->prefix_mass = initial_mass(*s->m, s->ctx, s->pos, bit);
        if (s->prefix_mass == 0.0) alive_ = false;
        s->ctx = (s->ctx << 1) | static_cast<std::uint32_t>(bit);
      } else {
        if (cond(bit) == 0.0) alive_ = false;
        const std::uint32_t mask = (std::uint32_t{1} << s->m->order) - 1;
        s->ctx = ((s->ctx << 1) | static_cast<std::uint32_t>(bit)) & mask;
      }
      ++s->pos;
      return;
    }
    auto& s = std::get<DetState>(st_);
    if (forced_bit(*s.m, s.pos) != bit) alive_ = false;
    ++s.pos;
  }

 private:
  struct BernoulliState {
    const Bernoulli* m;
  };
  struct MarkovState {
    const MarkovBinary* m;
    int pos;             // bits consumed
    std::uint32_t ctx;   // last min(pos, order) bits, oldest-first
    double prefix_mass;  // marginal mass of the consumed prefix while pos < order
  };
  struct DetState {
    const DeterministicSeq* m;
    std::uint64_t pos;
  };

  static int forced_bit(const DeterministicSeq& d, std::uint64_t pos) {
    if (pos < d.head.size()) return d.head[pos];
    return d.cycle[(pos - d.head.size()) % d.cycle.size()];
  }

  // Mass of initial strings beginning with ctx (pos bits) followed by bit.
  static double initial_mass(const MarkovBinary& m, std::uint32_t ctx, int pos, int bit) {
    const int tail = m.order - pos - 1;
    const std::size_t lo = ((static_cast<std::size_t>(ctx) << 1) | static_cast<unsigned>(bit)) << tail;
    const std::size_t width = std::size_t{1} << tail;
    double sum = 0.0;
    for (std::size_t i = lo; i < lo + width; ++i) sum += m.initial[i];
    return sum;
  }

  std::variant<BernoulliState, MarkovState, DetState> st_;
  bool alive_ = true;
};

// rho(x_{1:n}), evaluated in log space, with an exact-zero sentinel.
inline LogProb measure_prob(const Measure& m, const BitString& x) {
  MeasureCursor cur(m);
  double log_p = 0.0;
  for (int bit : x) {
    const double c = cur.cond(bit);
    if (c == 0.0) return LogProb::zero();
    log_p += std::log(c);
    cur.advance(bit);
  }
  return LogProb::from_log(log_p);
}

// rho(bit | prefix) = rho(prefix.bit) / rho(prefix).
// Throws UndefinedConditional when the prefix has probability zero.
inline double conditional_prob(const Measure& m, const BitString& prefix, int bit) {
  MeasureCursor cur(m);
  for (int b : prefix) {
    if (cur.cond(b) == 0.0) {
      throw UndefinedConditional("conditional on a measure-null prefix \"" + prefix.str() + "\"");
    }
    cur.advance(b);
  }
  return cur.cond(bit);
}

}  // namespace seqpred
