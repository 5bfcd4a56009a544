#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "seqpred/bitstring.hpp"
#include "seqpred/errors.hpp"
#include "seqpred/logprob.hpp"
#include "seqpred/measure.hpp"

namespace seqpred {

// Weighted finite list of candidate measures. Weights are strictly positive
// and sum to 1, so the mixture is itself a probability measure.
class ModelClass {
 public:
  static ModelClass uniform(std::vector<Measure> models) {
    require_nonempty(models);
    const std::size_t n = models.size();
    const double w = 1.0 / static_cast<double>(n);
    return ModelClass(std::move(models), std::vector<double>(n, w));
  }

  static ModelClass explicit_weights(std::vector<Measure> models, std::vector<double> weights) {
    require_nonempty(models);
    if (weights.size() != models.size()) {
      throw ConfigError("weights count (" + std::to_string(weights.size()) +
                        ") does not match models count (" + std::to_string(models.size()) + ")");
    }
    double sum = 0.0;
    for (double w : weights) {
      if (!(w > 0.0)) throw ConfigError("model weights must be strictly positive");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw ConfigError("model weights must sum to 1 (got " + std::to_string(sum) + ")");
    }
    return ModelClass(std::move(models), std::move(weights));
  }

  // Description-length weighting: w_i proportional to 2^-c_i, normalized.
  static ModelClass from_complexities(std::vector<Measure> models, const std::vector<int>& complexities) {
    require_nonempty(models);
    if (complexities.size() != models.size()) {
      throw ConfigError("complexities count does not match models count");
    }
    std::vector<double> w(models.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (complexities[i] < 0 || complexities[i] > 1000) {
        throw ConfigError("complexities must lie in [0, 1000]");
      }
      w[i] = std::ldexp(1.0, -complexities[i]);
      sum += w[i];
    }
    for (double& x : w) x /= sum;
    return ModelClass(std::move(models), std::move(w));
  }

  std::size_t size() const { return models_.size(); }
  const Measure& model(std::size_t i) const { return models_[i]; }
  const std::vector<Measure>& models() const { return models_; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }
  double log_weight(std::size_t i) const { return log_weights_[i]; }

  // d = ln(1/w_i), the description length of entry i under the prior.
  double description_length(std::size_t i) const { return -log_weights_[i]; }

  // Index of a structurally identical entry, if any.
  std::optional<std::size_t> find(const Measure& m) const {
    for (std::size_t i = 0; i < models_.size(); ++i) {
      if (models_[i] == m) return i;
    }
    return std::nullopt;
  }

  bool operator==(const ModelClass&) const = default;

 private:
  ModelClass(std::vector<Measure> models, std::vector<double> weights)
      : models_(std::move(models)), weights_(std::move(weights)) {
    log_weights_.reserve(weights_.size());
    for (double w : weights_) log_weights_.push_back(std::log(w));
  }

  static void require_nonempty(const std::vector<Measure>& models) {
    if (models.empty()) throw ConfigError("model class must contain at least one entry");
  }

  std::vector<Measure> models_;
  std::vector<double> weights_;
  std::vector<double> log_weights_;
};

// Incremental Bayes bookkeeping for the mixture: per-model log joints
// ln(w_i) + ln(mu_i(prefix)) and the normalized posterior. Models that have
// assigned probability zero to the prefix stay in place, marked dead, so
// indexing is stable. Advancing one bit is O(|M|).
class MixtureCursor {
 public:
  explicit MixtureCursor(const ModelClass& mc)
      : mc_(&mc), posterior_(mc.weights()), alive_count_(mc.size()) {
    log_joint_.reserve(mc.size());
    cursors_.reserve(mc.size());
    for (std::size_t i = 0; i < mc.size(); ++i) {
      log_joint_.push_back(mc.log_weight(i));
      cursors_.emplace_back(mc.model(i));
    }
  }

  const ModelClass& model_class() const { return *mc_; }
  bool alive() const { return alive_count_ > 0; }
  std::size_t alive_count() const { return alive_count_; }

  // xi(bit | prefix) = sum_i posterior_i * mu_i(bit | prefix); requires alive().
  double cond(int bit) const {
    double s = 0.0;
    for (std::size_t i = 0; i < posterior_.size(); ++i) {
      if (posterior_[i] == 0.0) continue;
      s += posterior_[i] * cursors_[i].cond(bit);
    }
    return s;
  }

  void advance(int bit) {
    const double ninf = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < log_joint_.size(); ++i) {
      if (log_joint_[i] == ninf) continue;
      const double c = cursors_[i].cond(bit);
      if (c == 0.0) {
        log_joint_[i] = ninf;
        --alive_count_;
      } else {
        log_joint_[i] += std::log(c);
      }
      cursors_[i].advance(bit);
    }
    renormalize();
  }

  // Posterior over model indices; entry i is 0 exactly when mu_i(prefix) = 0.
  const std::vector<double>& posterior() const { return posterior_; }

  // ln(w_i) + ln(mu_i(prefix)); -infinity for dead entries.
  const std::vector<double>& log_joint() const { return log_joint_; }

  // ln xi(prefix) via log-sum-exp of the joints.
  double log_mass() const { return log_sum_exp(log_joint_); }

 private:
  void renormalize() {
    const double ninf = -std::numeric_limits<double>::infinity();
    if (alive_count_ == 0) {
      posterior_.assign(posterior_.size(), 0.0);
      return;
    }
    double m = ninf;
    for (double lj : log_joint_) {
      if (lj > m) m = lj;
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < log_joint_.size(); ++i) {
      posterior_[i] = log_joint_[i] == ninf ? 0.0 : std::exp(log_joint_[i] - m);
      sum += posterior_[i];
    }
    for (double& p : posterior_) p /= sum;
  }

  const ModelClass* mc_;
  std::vector<double> log_joint_;
  std::vector<MeasureCursor> cursors_;
  std::vector<double> posterior_;
  std::size_t alive_count_ = 0;
};

// xi(x) = sum_i w_i mu_i(x), computed batch-style by log-sum-exp over the
// per-model log joints. Independent of the incremental cursor path.
inline LogProb mixture_prob(const ModelClass& mc, const BitString& x) {
  std::vector<double> lj(mc.size());
  for (std::size_t i = 0; i < mc.size(); ++i) {
    const LogProb p = measure_prob(mc.model(i), x);
    lj[i] = p.is_zero() ? -std::numeric_limits<double>::infinity() : mc.log_weight(i) + p.log();
  }
  const double l = log_sum_exp(lj);
  if (l == -std::numeric_limits<double>::infinity()) return LogProb::zero();
  return LogProb::from_log(l);
}

namespace detail {

inline MixtureCursor cursor_at(const ModelClass& mc, const BitString& prefix) {
  MixtureCursor cur(mc);
  for (int b : prefix) {
    if (!cur.alive()) break;
    cur.advance(b);
  }
  if (!cur.alive()) {
    throw UndefinedConditional("conditional on a mixture-null prefix \"" + prefix.str() + "\"");
  }
  return cur;
}

}  // namespace detail

// xi(bit | prefix); throws UndefinedConditional when xi(prefix) = 0.
inline double mixture_conditional(const ModelClass& mc, const BitString& prefix, int bit) {
  return detail::cursor_at(mc, prefix).cond(bit);
}

// Posterior state over a prefix: value type, updated functionally.
class PosteriorState {
 public:
  explicit PosteriorState(const ModelClass& mc) : core_(mc) {}

  PosteriorState extended(int bit) const {
    PosteriorState next(*this);
    next.core_.advance(bit);
    next.prefix_.push_back(bit);
    return next;
  }

  const BitString& prefix() const { return prefix_; }
  const std::vector<double>& posterior() const { return core_.posterior(); }
  const std::vector<double>& log_joint() const { return core_.log_joint(); }
  bool xi_alive() const { return core_.alive(); }

  double conditional(int bit) const {
    if (!core_.alive()) {
      throw UndefinedConditional("conditional on a mixture-null prefix \"" + prefix_.str() + "\"");
    }
    return core_.cond(bit);
  }

 private:
  BitString prefix_;
  MixtureCursor core_;
};

// Posterior weights w_i mu_i(prefix) / xi(prefix) as a distribution over
// model indices; throws UndefinedConditional on a mixture-null prefix.
inline PosteriorState posterior_weights(const ModelClass& mc, const BitString& prefix) {
  PosteriorState st(mc);
  for (int b : prefix) {
    if (!st.xi_alive()) {
      throw UndefinedConditional("posterior on a mixture-null prefix \"" + prefix.str() + "\"");
    }
    st = st.extended(b);
  }
  if (!st.xi_alive()) {
    throw UndefinedConditional("posterior on a mixture-null prefix \"" + prefix.str() + "\"");
  }
  return st;
}

}  // namespace seqpred
