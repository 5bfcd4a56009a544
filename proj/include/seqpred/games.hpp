#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seqpred/errors.hpp"
#include "seqpred/evaluate.hpp"
#include "seqpred/loss.hpp"
#include "seqpred/measure.hpp"
#include "seqpred/model_class.hpp"

namespace seqpred {

// 2x2 profit table, indexed [outcome][action]; the per-round loss is the
// negated profit.
struct ProfitTable {
  double v[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

  static ProfitTable of(double p00, double p01, double p10, double p11) {
    ProfitTable t;
    t.v[0][0] = p00;
    t.v[0][1] = p01;
    t.v[1][0] = p10;
    t.v[1][1] = p11;
    return t;
  }

  double min_entry() const {
    return std::min(std::min(v[0][0], v[0][1]), std::min(v[1][0], v[1][1]));
  }
  double max_entry() const {
    return std::max(std::max(v[0][0], v[0][1]), std::max(v[1][0], v[1][1]));
  }
};

// A betting game: outcomes drawn from mu, binary actions, profits from the
// table. p_max and p_delta are the declared a-priori range (profits lie in
// [p_max - p_delta, p_max]), not the observed range.
struct GameSpec {
  Measure mu;
  ModelClass models;
  ProfitTable profit;
  double p_max = 0.0;
  double p_delta = 0.0;
  int n = 1;

  static GameSpec make(Measure mu, ModelClass models, const ProfitTable& profit, int n) {
    return make(mu, std::move(models), profit, n, profit.max_entry(),
                profit.max_entry() - profit.min_entry());
  }

  static GameSpec make(Measure mu, ModelClass models, const ProfitTable& profit, int n,
                       double p_max, double p_delta) {
    if (p_delta < 0.0) throw ConfigError("profit range p_delta must be nonnegative");
    if (profit.max_entry() > p_max + 1e-15 || profit.min_entry() < p_max - p_delta - 1e-15) {
      throw ConfigError("profit table entries must lie in [p_max - p_delta, p_max]");
    }
    return GameSpec{std::move(mu), std::move(models), profit, p_max, p_delta, n};
  }

  LossSpec as_loss() const {
    const LossTable t = LossTable::of(-profit.v[0][0], -profit.v[0][1], -profit.v[1][0], -profit.v[1][1]);
    return LossSpec::table(t, -p_max, p_delta - p_max);
  }
};

// Guaranteed total profit of the universal scheme:
// P_xi >= P_mu - p_delta H - sqrt(4 (n p_max - P_mu) p_delta H + p_delta^2 H^2).
inline double profit_lower_bound(double profit_mu, double entropy, int n, double p_max, double p_delta) {
  if (entropy < 0.0 || p_delta < 0.0) {
    throw InvalidRange("profit_lower_bound expects H >= 0 and p_delta >= 0");
  }
  const double headroom = static_cast<double>(n) * p_max - profit_mu;
  if (headroom < 0.0) {
    throw InvalidRange("profit_lower_bound requires P_mu <= n * p_max");
  }
  const double s = p_delta * entropy;
  return profit_mu - s - std::sqrt(4.0 * headroom * s + s * s);
}

// Exact positivity condition of the profit lower bound for a fixed average
// informed profit: rounds beyond 2 p_delta (2 p_max - pbar) / pbar^2 * H
// are in the winning zone.
inline double winning_zone_threshold(double pbar_mu, double p_max, double p_delta, double entropy) {
  if (!(pbar_mu > 0.0)) {
    throw NonpositiveEdge("no winning strategy exists: informed average profit is not positive");
  }
  return 2.0 * p_delta * (2.0 * p_max - pbar_mu) / (pbar_mu * pbar_mu) * entropy;
}

// Weakened, range-only threshold: n > (2 p_delta / pbar)^2 * d_mu puts the
// universal scheme in the winning zone whenever p_delta > p_max.
inline double time_to_win_threshold(double pbar_mu, double p_delta, double d_mu) {
  if (!(pbar_mu > 0.0)) {
    throw NonpositiveEdge("no winning strategy exists: informed average profit is not positive");
  }
  if (d_mu < 0.0) throw InvalidRange("time_to_win_threshold expects d_mu >= 0");
  const double r = 2.0 * p_delta / pbar_mu;
  return r * r * d_mu;
}

struct GameReport {
  int n = 0;
  double profit_xi = 0.0;   // = -L_xi, exactly
  double profit_mu = 0.0;   // = -L_mu, exactly
  double pbar_xi = 0.0;
  double pbar_mu = 0.0;
  double entropy = 0.0;     // H_n
  double d_mu = 0.0;
  double bound = 0.0;       // profit lower bound at H_n
  double winning_threshold = 0.0;      // infinity when pbar_mu <= 0
  double time_to_win = 0.0;            // infinity when pbar_mu <= 0
  bool bound_holds = false;            // profit_xi >= bound - 1e-9
  bool past_winning_threshold = false;
  bool past_time_to_win = false;
  bool in_winning_zone = false;        // profit_xi > 0
};

// Exact game evaluation: total profits of both schemes, the profit lower
// bound, and both horizon thresholds. Requires mu to be in the class.
inline GameReport run_game(const GameSpec& spec, int exact_cap = kDefaultExactCap) {
  const LossSpec loss = spec.as_loss();

  GameReport r;
  r.n = spec.n;

  const StepLoss xi = exact_expected_loss(spec.mu, Predictor::mixture(spec.models, loss), spec.n, exact_cap);
  const StepLoss inf = exact_expected_loss(spec.mu, Predictor::informed(spec.mu, loss), spec.n, exact_cap);
  const EntropyResult ent = exact_entropy(spec.mu, spec.models, spec.n, exact_cap);

  r.profit_xi = -xi.cumulative.back();
  r.profit_mu = -inf.cumulative.back();
  r.pbar_xi = r.profit_xi / static_cast<double>(spec.n);
  r.pbar_mu = r.profit_mu / static_cast<double>(spec.n);
  r.entropy = std::max(0.0, ent.total);
  r.d_mu = ent.d_mu;

  r.bound = profit_lower_bound(r.profit_mu, r.entropy, spec.n, spec.p_max, spec.p_delta);
  r.bound_holds = r.profit_xi >= r.bound - 1e-9;

  if (r.pbar_mu > 0.0) {
    r.winning_threshold = winning_zone_threshold(r.pbar_mu, spec.p_max, spec.p_delta, r.entropy);
    r.time_to_win = time_to_win_threshold(r.pbar_mu, spec.p_delta, r.d_mu);
  } else {
    r.winning_threshold = std::numeric_limits<double>::infinity();
    r.time_to_win = std::numeric_limits<double>::infinity();
  }
  r.past_winning_threshold = static_cast<double>(spec.n) > r.winning_threshold;
  r.past_time_to_win = static_cast<double>(spec.n) > r.time_to_win;
  r.in_winning_zone = r.profit_xi > 0.0;
  return r;
}

// Average-profit gap pbar_mu - pbar_xi at each requested horizon, from one
// exact evaluation at the largest horizon.
inline std::vector<std::pair<int, double>> average_profit_gap(const GameSpec& spec,
                                                              std::span<const int> horizons,
                                                              int exact_cap = kDefaultExactCap) {
  if (horizons.empty()) return {};
  int n_max = 0;
  for (int n : horizons) {
    if (n < 1) throw ConfigError("horizons must be >= 1");
    n_max = std::max(n_max, n);
  }

  const LossSpec loss = spec.as_loss();
  const StepLoss xi = exact_expected_loss(spec.mu, Predictor::mixture(spec.models, loss), n_max, exact_cap);
  const StepLoss inf = exact_expected_loss(spec.mu, Predictor::informed(spec.mu, loss), n_max, exact_cap);

  std::vector<std::pair<int, double>> out;
  out.reserve(horizons.size());
  for (int n : horizons) {
    const std::size_t i = static_cast<std::size_t>(n) - 1;
    const double pbar_xi = -xi.cumulative[i] / static_cast<double>(n);
    const double pbar_mu = -inf.cumulative[i] / static_cast<double>(n);
    out.emplace_back(n, pbar_mu - pbar_xi);
  }
  return out;
}

}  // namespace seqpred
