#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <variant>

#include "seqpred/loss.hpp"
#include "seqpred/measure.hpp"
#include "seqpred/model_class.hpp"

namespace seqpred {

class PredictorCursor;

// An action scheme: either the expected-loss minimizer driven by a
// predictive source (a single measure, or a model-class mixture), or a
// fixed-action baseline. Immutable; cursors do the sequential work.
class Predictor {
 public:
  static Predictor informed(Measure rho, LossSpec loss) {
    return Predictor(Source(std::in_place_type<Measure>, std::move(rho)), std::move(loss), 0);
  }

  static Predictor mixture(ModelClass rho, LossSpec loss) {
    return Predictor(Source(std::in_place_type<ModelClass>, std::move(rho)), std::move(loss), 0);
  }

  static Predictor constant_action(int action, LossSpec loss) {
    return Predictor(Source(std::monostate{}), std::move(loss), action);
  }

  const LossSpec& loss() const { return impl_->loss; }

  PredictorCursor cursor() const;

 private:
  using Source = std::variant<std::monostate, Measure, ModelClass>;

  struct Impl {
    Source source;
    LossSpec loss;
    int const_action;
  };

  Predictor(Source src, LossSpec loss, int action)
      : impl_(std::make_shared<const Impl>(Impl{std::move(src), std::move(loss), action})) {}

  std::shared_ptr<const Impl> impl_;

  friend class PredictorCursor;
};

// Sequential decision state. Copyable, so tree enumeration can branch.
// If the predictive source assigns probability zero to the history (only
// possible when the true environment leaves its support), the argmin is
// undefined and the cursor falls back to the tie-break action 0.
class PredictorCursor {
 public:
  int action(int t, const BitString& history) const {
    if (std::holds_alternative<std::monostate>(src_)) return impl_->const_action;
    const std::optional<double> p1 = prob_one();
    if (!p1) return 0;
    return optimal_action(*p1, impl_->loss, t, history);
  }

  // Source probability that the next bit is 1; nullopt for the constant
  // scheme or once the source has died on the observed history.
  std::optional<double> prob_one() const {
    if (const auto* m = std::get_if<MeasureCursor>(&src_)) {
      if (!m->alive()) return std::nullopt;
      return m->cond(1);
    }
    if (const auto* x = std::get_if<MixtureCursor>(&src_)) {
      if (!x->alive()) return std::nullopt;
      return x->cond(1);
    }
    return std::nullopt;
  }

  bool source_alive() const {
    if (const auto* m = std::get_if<MeasureCursor>(&src_)) return m->alive();
    if (const auto* x = std::get_if<MixtureCursor>(&src_)) return x->alive();
    return true;
  }

  void advance(int observed_bit) {
    if (auto* m = std::get_if<MeasureCursor>(&src_)) {
      if (m->alive()) m->advance(observed_bit);
    } else if (auto* x = std::get_if<MixtureCursor>(&src_)) {
      if (x->alive()) x->advance(observed_bit);
    }
  }

 private:
  explicit PredictorCursor(std::shared_ptr<const Predictor::Impl> impl) : impl_(std::move(impl)) {
    if (const auto* m = std::get_if<Measure>(&impl_->source)) {
      src_.emplace<MeasureCursor>(*m);
    } else if (const auto* mc = std::get_if<ModelClass>(&impl_->source)) {
      src_.emplace<MixtureCursor>(*mc);
    }
  }

  std::shared_ptr<const Predictor::Impl> impl_;
  std::variant<std::monostate, MeasureCursor, MixtureCursor> src_;

  friend class Predictor;
};

inline PredictorCursor Predictor::cursor() const { return PredictorCursor(impl_); }

}  // namespace seqpred
