#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "seqpred/bitstring.hpp"
#include "seqpred/errors.hpp"
#include "seqpred/loss.hpp"
#include "seqpred/measure.hpp"
#include "seqpred/model_class.hpp"
#include "seqpred/numeric.hpp"
#include "seqpred/predictor.hpp"

namespace seqpred {

// Largest horizon enumerated exactly unless overridden; beyond it the
// Monte Carlo estimator is the only option.
inline constexpr int kDefaultExactCap = 20;

struct WalkCounters {
  std::uint64_t visited = 0;  // enumerated prefixes x_{<t}, t = 1..n
  std::uint64_t pruned = 0;   // subtrees cut because mu(child) = 0
};

// Depth-first enumeration of all mu-non-null prefixes up to length n-1.
// The visitor sees every node once:
//   at_node(t, prefix, weight, cond0, cond1)  with weight = mu(x_{<t})
//   descend(bit) / ascend()                   around each child subtree
// Traversal order is fixed (bit 0 first), so results are deterministic.
template <class Visitor>
WalkCounters walk_prefix_tree(const Measure& mu, int n, Visitor&& vis) {
  WalkCounters counters;
  BitString prefix;
  MeasureCursor root(mu);

  auto rec = [&](auto&& self, const MeasureCursor& cur, double weight, int t) -> void {
    ++counters.visited;
    const double c0 = cur.cond(0);
    const double c1 = cur.cond(1);
    vis.at_node(t, prefix, weight, c0, c1);
    if (t == n) return;
    for (int bit = 0; bit < 2; ++bit) {
      const double cb = bit ? c1 : c0;
      if (cb == 0.0) {
        ++counters.pruned;
        continue;
      }
      MeasureCursor child = cur;
      child.advance(bit);
      prefix.push_back(bit);
      vis.descend(bit);
      self(self, child, weight * cb, t + 1);
      vis.ascend();
      prefix.pop_back();
    }
  };

  if (n >= 1) rec(rec, root, 1.0, 1);
  return counters;
}

namespace detail {

inline void require_horizon(int n, int exact_cap) {
  if (n < 1) throw ConfigError("horizon must be >= 1");
  if (n > exact_cap) {
    throw HorizonTooLarge("horizon " + std::to_string(n) + " exceeds the exact enumeration cap " +
                          std::to_string(exact_cap) + "; use the Monte Carlo estimator");
  }
}

inline std::vector<double> running_totals(const std::vector<CompensatedSum>& per_step) {
  std::vector<double> cum(per_step.size());
  CompensatedSum acc;
  for (std::size_t i = 0; i < per_step.size(); ++i) {
    acc.add(per_step[i].value());
    cum[i] = acc.value();
  }
  return cum;
}

}  // namespace detail

struct StepLoss {
  std::vector<double> per_step;    // expected loss of step t
  std::vector<double> cumulative;  // running totals L_t
  WalkCounters counters;
};

// Total and per-step mu-expected loss of a scheme over the first n steps,
// by exact enumeration. Optionally records the scheme's action at every
// enumerated node in traversal order.
inline StepLoss exact_expected_loss(const Measure& mu, const Predictor& scheme, int n,
                                    int exact_cap = kDefaultExactCap,
                                    std::vector<std::uint8_t>* action_trace = nullptr) {
  detail::require_horizon(n, exact_cap);

  struct Visitor {
    const LossSpec* loss;
    PredictorCursor cursor;
    std::vector<PredictorCursor> stack;
    std::vector<CompensatedSum> per_step;
    std::vector<std::uint8_t>* trace;

    void at_node(int t, const BitString& prefix, double weight, double c0, double c1) {
      const int y = cursor.action(t, prefix);
      if (trace) trace->push_back(static_cast<std::uint8_t>(y));
      double step = 0.0;
      if (c0 != 0.0) step += c0 * (*loss)(t, prefix, 0, y);
      if (c1 != 0.0) step += c1 * (*loss)(t, prefix, 1, y);
      per_step[static_cast<std::size_t>(t) - 1].add(weight * step);
    }
    void descend(int bit) {
      stack.push_back(cursor);
      cursor.advance(bit);
    }
    void ascend() {
      cursor = std::move(stack.back());
      stack.pop_back();
    }
  };

  Visitor vis{&scheme.loss(), scheme.cursor(), {}, std::vector<CompensatedSum>(n), action_trace};
  const WalkCounters counters = walk_prefix_tree(mu, n, vis);

  StepLoss out;
  out.per_step.reserve(n);
  for (const auto& acc : vis.per_step) out.per_step.push_back(acc.value());
  out.cumulative = detail::running_totals(vis.per_step);
  out.counters = counters;
  return out;
}

// The scheme's action bits at every enumerated node, in traversal order.
// Two schemes decide identically on an environment iff their traces match.
inline std::vector<std::uint8_t> exact_action_trace(const Measure& mu, const Predictor& scheme, int n,
                                                    int exact_cap = kDefaultExactCap) {
  std::vector<std::uint8_t> trace;
  exact_expected_loss(mu, scheme, n, exact_cap, &trace);
  return trace;
}

struct EntropyResult {
  std::vector<double> per_step;    // mu-expected relative entropy of step t
  std::vector<double> cumulative;  // H_t
  double total = 0.0;              // H_n
  double d_mu = 0.0;               // ln(1 / w_mu)
  WalkCounters counters;
};

namespace detail {

inline std::size_t require_member(const Measure& mu, const ModelClass& mc) {
  const auto idx = mc.find(mu);
  if (!idx) {
    throw ModelNotInClass("the environment measure must be an entry of the model class");
  }
  return *idx;
}

}  // namespace detail

// Cumulative mu-expected relative entropy between the one-step conditionals
// of mu and of the mixture. Requires mu to be an entry of the class, which
// guarantees the mixture conditional is positive wherever mu's is.
inline EntropyResult exact_entropy(const Measure& mu, const ModelClass& mc, int n,
                                   int exact_cap = kDefaultExactCap) {
  detail::require_horizon(n, exact_cap);
  const std::size_t mu_index = detail::require_member(mu, mc);

  struct Visitor {
    MixtureCursor xi;
    std::vector<MixtureCursor> stack;
    std::vector<CompensatedSum> per_step;

    void at_node(int t, const BitString& prefix, double weight, double c0, double c1) {
      double term = 0.0;
      for (int bit = 0; bit < 2; ++bit) {
        const double mc_b = bit ? c1 : c0;
        if (mc_b == 0.0) continue;  // 0 * ln 0 := 0
        const double xc_b = xi.cond(bit);
        if (xc_b == 0.0) {
          throw Error("dominance violated: mixture conditional is zero on a mu-live bit at \"" +
                      prefix.str() + "\"");
        }
        term += mc_b * std::log(mc_b / xc_b);
      }
      per_step[static_cast<std::size_t>(t) - 1].add(weight * term);
    }
    void descend(int bit) {
      stack.push_back(xi);
      xi.advance(bit);
    }
    void ascend() {
      xi = std::move(stack.back());
      stack.pop_back();
    }
  };

  Visitor vis{MixtureCursor(mc), {}, std::vector<CompensatedSum>(n)};
  const WalkCounters counters = walk_prefix_tree(mu, n, vis);

  EntropyResult out;
  out.per_step.reserve(n);
  for (const auto& acc : vis.per_step) out.per_step.push_back(acc.value());
  out.cumulative = detail::running_totals(vis.per_step);
  out.total = out.cumulative.back();
  out.d_mu = mc.description_length(mu_index);
  out.counters = counters;
  return out;
}

struct ConvergenceResult {
  std::vector<double> per_step;    // mu-expected squared conditional gap of step t
  std::vector<double> cumulative;  // S_t
  double total = 0.0;              // S_n
  WalkCounters counters;
};

// S_n = sum_t sum_{x_{1:t}} mu(x_{<t}) (mu(x_t|x_{<t}) - xi(x_t|x_{<t}))^2.
inline ConvergenceResult convergence_sum(const Measure& mu, const ModelClass& mc, int n,
                                         int exact_cap = kDefaultExactCap) {
  detail::require_horizon(n, exact_cap);
  detail::require_member(mu, mc);

  struct Visitor {
    MixtureCursor xi;
    std::vector<MixtureCursor> stack;
    std::vector<CompensatedSum> per_step;

    void at_node(int t, const BitString&, double weight, double c0, double c1) {
      const double g0 = c0 - xi.cond(0);
      const double g1 = c1 - xi.cond(1);
      per_step[static_cast<std::size_t>(t) - 1].add(weight * (g0 * g0 + g1 * g1));
    }
    void descend(int bit) {
      stack.push_back(xi);
      xi.advance(bit);
    }
    void ascend() {
      xi = std::move(stack.back());
      stack.pop_back();
    }
  };

  Visitor vis{MixtureCursor(mc), {}, std::vector<CompensatedSum>(n)};
  const WalkCounters counters = walk_prefix_tree(mu, n, vis);

  ConvergenceResult out;
  out.per_step.reserve(n);
  for (const auto& acc : vis.per_step) out.per_step.push_back(acc.value());
  out.cumulative = detail::running_totals(vis.per_step);
  out.total = out.cumulative.back();
  out.counters = counters;
  return out;
}

struct McResult {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

// Monte Carlo estimate of the scheme's total mu-expected loss over n steps.
// Sample i draws its randomness from (seed, i) alone and results are
// reduced in sample order, so the outcome is identical for any worker
// count and bit-identical across reruns with the same seed.
inline McResult mc_expected_loss(const Measure& mu, const Predictor& scheme, int n,
                                 std::uint64_t samples, std::uint64_t seed, int threads = 1) {
  if (n < 1) throw ConfigError("horizon must be >= 1");
  if (samples < 2) throw ConfigError("Monte Carlo needs at least 2 samples");

  std::vector<double> losses(samples);
  const LossSpec& loss = scheme.loss();

  auto run_range = [&](std::uint64_t lo, std::uint64_t hi) {
    for (std::uint64_t i = lo; i < hi; ++i) {
      std::mt19937_64 rng(derive_stream_seed(seed, i));
      MeasureCursor env(mu);
      PredictorCursor cur = scheme.cursor();
      BitString history;
      CompensatedSum total;
      for (int t = 1; t <= n; ++t) {
        const int y = cur.action(t, history);
        const double p1 = env.cond(1);
        const int bit = uniform_unit(rng()) < p1 ? 1 : 0;
        total.add(loss(t, history, bit, y));
        env.advance(bit);
        cur.advance(bit);
        history.push_back(bit);
      }
      losses[i] = total.value();
    }
  };

  int workers = threads;
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  if (static_cast<std::uint64_t>(workers) > samples) workers = static_cast<int>(samples);

  if (workers == 1) {
    run_range(0, samples);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::uint64_t chunk = (samples + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::uint64_t lo = chunk * static_cast<std::uint64_t>(w);
      const std::uint64_t hi = std::min(samples, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(run_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  // Welford in sample order. Keeps the mean exactly equal to the common
  // value when every sample coincides (deterministic environments).
  double mean = 0.0;
  double m2 = 0.0;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const double delta = losses[i] - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (losses[i] - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);

  McResult out;
  out.estimate = mean;
  out.std_error = std::sqrt(var / static_cast<double>(samples));
  out.samples = samples;
  return out;
}

// Exact quantities of one environment at one horizon: losses of the
// universal and the informed scheme, per-step entropy, and the convergence
// sum, aligned per step.
struct EvalReport {
  int n = 0;
  std::vector<double> loss_xi_step, loss_xi_cum;
  std::vector<double> loss_mu_step, loss_mu_cum;
  std::vector<double> h_step, entropy_cum;
  std::vector<double> conv_step, conv_cum;
  double d_mu = 0.0;
  double l_min = 0.0, l_max = 0.0;
  std::uint64_t visited = 0;
  std::uint64_t pruned = 0;
};

inline EvalReport evaluate_environment(const Measure& mu, const ModelClass& mc, const LossSpec& loss,
                                       int n, int exact_cap = kDefaultExactCap) {
  EvalReport r;
  r.n = n;
  r.l_min = loss.l_min();
  r.l_max = loss.l_max();

  const StepLoss xi = exact_expected_loss(mu, Predictor::mixture(mc, loss), n, exact_cap);
  const StepLoss mu_l = exact_expected_loss(mu, Predictor::informed(mu, loss), n, exact_cap);
  const EntropyResult ent = exact_entropy(mu, mc, n, exact_cap);
  const ConvergenceResult conv = convergence_sum(mu, mc, n, exact_cap);

  r.loss_xi_step = xi.per_step;
  r.loss_xi_cum = xi.cumulative;
  r.loss_mu_step = mu_l.per_step;
  r.loss_mu_cum = mu_l.cumulative;
  r.h_step = ent.per_step;
  r.entropy_cum = ent.cumulative;
  r.conv_step = conv.per_step;
  r.conv_cum = conv.cumulative;
  r.d_mu = ent.d_mu;
  r.visited = ent.counters.visited;
  r.pruned = ent.counters.pruned;
  return r;
}

// First violated report invariant, if any: losses inside [t l_min, t l_max],
// S_t <= H_t <= d_mu, and both sums nondecreasing.
inline std::optional<std::string> check_eval_invariants(const EvalReport& r) {
  const double tol = 1e-9;
  for (int t = 1; t <= r.n; ++t) {
    const std::size_t i = static_cast<std::size_t>(t) - 1;
    const double lo = static_cast<double>(t) * r.l_min - tol;
    const double hi = static_cast<double>(t) * r.l_max + tol;
    for (const auto* l : {&r.loss_xi_cum, &r.loss_mu_cum}) {
      if ((*l)[i] < lo || (*l)[i] > hi) {
        return "cumulative loss at t=" + std::to_string(t) + " outside [t*l_min, t*l_max]";
      }
    }
    if (r.entropy_cum[i] > r.d_mu + tol) {
      return "H_t exceeds d_mu at t=" + std::to_string(t);
    }
    if (r.conv_cum[i] > r.entropy_cum[i] + tol) {
      return "S_t exceeds H_t at t=" + std::to_string(t);
    }
    if (i > 0) {
      if (r.entropy_cum[i] < r.entropy_cum[i - 1] - 1e-12) {
        return "H_t decreased at t=" + std::to_string(t);
      }
      if (r.conv_cum[i] < r.conv_cum[i - 1] - 1e-12) {
        return "S_t decreased at t=" + std::to_string(t);
      }
    }
  }
  return std::nullopt;
}

}  // namespace seqpred
