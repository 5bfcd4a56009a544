#pragma once

#include <cassert>
#include <cmath>
#include <compare>
#include <limits>
#include <span>

#include "seqpred/errors.hpp"

namespace seqpred {

// Probability held in natural-log space. Exact zero is the -infinity
// sentinel, distinct from every finite log magnitude, so "is exactly zero"
// survives arbitrarily long products while nonzero values never underflow.
class LogProb {
 public:
  constexpr LogProb() : log_(-std::numeric_limits<double>::infinity()) {}

  static constexpr LogProb zero() { return LogProb(); }
  static constexpr LogProb one() { return from_log(0.0); }

  static constexpr LogProb from_log(double lg) {
    LogProb p;
    p.log_ = lg;
    return p;
  }

  static LogProb from_linear(double p) {
    assert(p >= 0.0);
    if (p == 0.0) return zero();
    return from_log(std::log(p));
  }

  bool is_zero() const { return log_ == -std::numeric_limits<double>::infinity(); }

  // Natural log; -infinity when the value is exactly zero.
  double log() const { return log_; }

  // Linear-space value. May underflow to 0 for very long strings; use
  // is_zero() to distinguish exact zeros from underflow.
  double linear() const { return is_zero() ? 0.0 : std::exp(log_); }

  LogProb& operator*=(LogProb rhs) {
    log_ += rhs.log_;
    return *this;
  }
  friend LogProb operator*(LogProb a, LogProb b) { return a *= b; }

  friend LogProb operator/(LogProb a, LogProb b) {
    if (b.is_zero()) throw UndefinedConditional("division by an exactly-zero probability");
    if (a.is_zero()) return zero();
    return from_log(a.log_ - b.log_);
  }

  auto operator<=>(const LogProb&) const = default;

 private:
  double log_;
};

// Max-shifted log-sum-exp. Entries of -infinity stand for exact zeros and
// are skipped; returns -infinity when all entries are zero.
inline double log_sum_exp(std::span<const double> logs) {
  const double ninf = -std::numeric_limits<double>::infinity();
  double m = ninf;
  for (double l : logs) {
    if (l > m) m = l;
  }
  if (m == ninf) return ninf;
  double s = 0.0;
  for (double l : logs) {
    if (l != ninf) s += std::exp(l - m);
  }
  return m + std::log(s);
}

}  // namespace seqpred
