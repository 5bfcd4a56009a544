#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "seqpred/bitstring.hpp"
#include "seqpred/errors.hpp"

namespace seqpred {

// 2x2 loss table, indexed [outcome][action].
struct LossTable {
  double v[2][2] = {{0.0, 0.0}, {0.0, 0.0}};

  static LossTable of(double l00, double l01, double l10, double l11) {
    LossTable t;
    t.v[0][0] = l00;
    t.v[0][1] = l01;
    t.v[1][0] = l10;
    t.v[1][1] = l11;
    return t;
  }

  double min_entry() const {
    return std::min(std::min(v[0][0], v[0][1]), std::min(v[1][0], v[1][1]));
  }
  double max_entry() const {
    return std::max(std::max(v[0][0], v[0][1]), std::max(v[1][0], v[1][1]));
  }

  bool operator==(const LossTable& o) const {
    return v[0][0] == o.v[0][0] && v[0][1] == o.v[0][1] && v[1][0] == o.v[1][0] && v[1][1] == o.v[1][1];
  }
};

// Bounded loss assignment l(t, history, outcome, action) with a declared
// range [l_min, l_max]. Static tables are the fast path; a periodic mask
// zeroes the loss on steps where no prediction is scored; fully custom
// evaluators cover per-step, history-dependent losses.
class LossSpec {
 public:
  using Evaluator = std::function<double(int t, const BitString& history, int outcome, int action)>;

  static LossSpec table(const LossTable& t) { return table(t, t.min_entry(), t.max_entry()); }

  static LossSpec table(const LossTable& t, double l_min, double l_max) {
    check_range(l_min, l_max, t.min_entry(), t.max_entry());
    LossSpec s;
    s.kind_ = Kind::Static;
    s.table_ = t;
    s.l_min_ = l_min;
    s.l_max_ = l_max;
    return s;
  }

  // 0/1 prediction-error loss.
  static LossSpec error_loss() { return table(LossTable::of(0.0, 1.0, 1.0, 0.0)); }

  // Scores `base` on steps where t is a multiple of `period`, zero loss on
  // all other steps (no prediction is being made there).
  static LossSpec periodic_mask(const LossTable& base, int period) {
    if (period < 1) throw ConfigError("periodic mask period must be >= 1");
    LossSpec s;
    s.kind_ = Kind::Periodic;
    s.table_ = base;
    s.period_ = period;
    s.l_min_ = std::min(0.0, base.min_entry());
    s.l_max_ = std::max(0.0, base.max_entry());
    return s;
  }

  static LossSpec custom(Evaluator fn, double l_min, double l_max) {
    if (!(l_min <= l_max)) throw ConfigError("loss range must satisfy l_min <= l_max");
    LossSpec s;
    s.kind_ = Kind::Custom;
    s.custom_ = std::move(fn);
    s.l_min_ = l_min;
    s.l_max_ = l_max;
    return s;
  }

  double operator()(int t, const BitString& history, int outcome, int action) const {
    switch (kind_) {
      case Kind::Static:
        return table_->v[outcome][action];
      case Kind::Periodic:
        return t % period_ == 0 ? table_->v[outcome][action] : 0.0;
      case Kind::Custom:
        return custom_(t, history, outcome, action);
    }
    return 0.0;  // unreachable
  }

  double l_min() const { return l_min_; }
  double l_max() const { return l_max_; }
  double l_delta() const { return l_max_ - l_min_; }

  // Present only when the loss is genuinely time- and history-independent.
  const std::optional<LossTable>& static_table() const {
    static const std::optional<LossTable> none;
    return kind_ == Kind::Static ? table_ : none;
  }

 private:
  enum class Kind { Static, Periodic, Custom };

  static void check_range(double l_min, double l_max, double entry_min, double entry_max) {
    if (!(l_min <= l_max)) throw ConfigError("loss range must satisfy l_min <= l_max");
    if (entry_min < l_min - 1e-15 || entry_max > l_max + 1e-15) {
      throw ConfigError("declared loss range [" + std::to_string(l_min) + ", " + std::to_string(l_max) +
                        "] does not contain all table entries");
    }
  }

  LossSpec() = default;

  Kind kind_ = Kind::Static;
  std::optional<LossTable> table_ = LossTable{};
  int period_ = 1;
  Evaluator custom_;
  double l_min_ = 0.0;
  double l_max_ = 0.0;
};

// Expected-loss-minimizing action for P(next = 1) = p1. Ties resolve to
// action 0, everywhere, so adversarial constructions are reproducible.
//
// Decided through the penalty gaps d0 = l(0,1) - l(0,0) and
// d1 = l(1,0) - l(1,1): action 1 is strictly better iff p1 d1 > (1-p1) d0.
// This form keeps decisions invariant under an exact rescaling of the
// gaps, whereas comparing full expected losses can flip at ties.
inline int optimal_action(double p1, const LossSpec& loss, int t = 1, const BitString& history = BitString{}) {
  const double d0 = loss(t, history, 0, 1) - loss(t, history, 0, 0);
  const double d1 = loss(t, history, 1, 0) - loss(t, history, 1, 1);
  return p1 * d1 > (1.0 - p1) * d0 ? 1 : 0;
}

// Classification of a static table's decision rule.
struct ThresholdVerdict {
  enum class Kind {
    Threshold,          // action 1 iff p1 > gamma (tie -> 0)
    AlwaysAction,       // one action is optimal for every p1
    InvertedThreshold,  // action 1 iff p1 < gamma (tie -> 0)
  };
  Kind kind;
  double gamma = 0.0;  // meaningful for the threshold kinds
  int action = 0;      // meaningful for AlwaysAction
};

// gamma = (l01 - l00) / (l01 - l00 + l10 - l11) when both penalty gaps are
// positive; otherwise reports which action dominates. A table whose gaps
// are both negative flips the comparison direction instead of admitting a
// dominant action.
inline ThresholdVerdict threshold_gamma(const LossTable& t) {
  const double d0 = t.v[0][1] - t.v[0][0];  // penalty for acting 1 on outcome 0
  const double d1 = t.v[1][0] - t.v[1][1];  // penalty for acting 0 on outcome 1
  if (d0 > 0.0 && d1 > 0.0) {
    return {ThresholdVerdict::Kind::Threshold, d0 / (d0 + d1), 0};
  }
  if (d0 >= 0.0 && d1 <= 0.0) {
    return {ThresholdVerdict::Kind::AlwaysAction, 0.0, 0};
  }
  if (d0 <= 0.0 && d1 >= 0.0) {
    return {ThresholdVerdict::Kind::AlwaysAction, 0.0, 1};
  }
  return {ThresholdVerdict::Kind::InvertedThreshold, d0 / (d0 + d1), 0};
}

struct RescaledLoss {
  LossSpec loss;
  bool degenerate = false;  // l_delta was 0; all actions equivalent
};

// Affine map to [0, 1]: l' = (l - l_min) / l_delta. Argmin decisions are
// unaffected. A zero-width range yields a constant-zero loss plus a flag.
inline RescaledLoss rescale_loss(const LossSpec& loss) {
  const double l_min = loss.l_min();
  const double l_delta = loss.l_delta();
  if (l_delta == 0.0) {
    return {LossSpec::custom([](int, const BitString&, int, int) { return 0.0; }, 0.0, 0.0), true};
  }
  if (loss.static_table()) {
    const LossTable& t = *loss.static_table();
    LossTable scaled = LossTable::of((t.v[0][0] - l_min) / l_delta, (t.v[0][1] - l_min) / l_delta,
                                     (t.v[1][0] - l_min) / l_delta, (t.v[1][1] - l_min) / l_delta);
    return {LossSpec::table(scaled, 0.0, 1.0), false};
  }
  return {LossSpec::custom(
              [inner = loss, l_min, l_delta](int t, const BitString& h, int x, int y) {
                return (inner(t, h, x, y) - l_min) / l_delta;
              },
              0.0, 1.0),
          false};
}

}  // namespace seqpred
