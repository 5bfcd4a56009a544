#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "seqpred/errors.hpp"
#include "seqpred/evaluate.hpp"
#include "seqpred/loss.hpp"
#include "seqpred/measure.hpp"
#include "seqpred/model_class.hpp"

namespace seqpred {

// Closed-form excess-loss bound for unit-range losses:
// L_xi - L_mu <= H + sqrt(4 L_mu H + H^2).
inline double unit_loss_bound(double loss_mu, double entropy) {
  if (loss_mu < 0.0 || entropy < 0.0) {
    throw InvalidRange("unit_loss_bound expects nonnegative inputs");
  }
  return entropy + std::sqrt(4.0 * loss_mu * entropy + entropy * entropy);
}

// Bound for losses in [l_min, l_min + l_delta]:
// L_xi - L_mu <= l_delta H + sqrt(4 (L_mu - n l_min) l_delta H + l_delta^2 H^2).
// Reduces to the unit bound for l_min = 0, l_delta = 1.
inline double general_loss_bound(double loss_mu, double entropy, int n, double l_min, double l_delta) {
  if (l_delta < 0.0 || entropy < 0.0) {
    throw InvalidRange("general_loss_bound expects l_delta >= 0 and H >= 0");
  }
  const double excess = loss_mu - static_cast<double>(n) * l_min;
  if (excess < 0.0) {
    throw InvalidRange("general_loss_bound requires L_mu >= n * l_min");
  }
  const double s = l_delta * entropy;
  return s + std::sqrt(4.0 * excess * s + s * s);
}

struct BoundReport {
  double bound = 0.0;
  double measured = 0.0;  // L_xi - L_mu, in the report's units
  double slack = 0.0;     // bound - measured
  bool pass = false;      // slack >= -1e-9
};

inline constexpr double kSlackTolerance = 1e-9;

struct BoundCheck {
  int n = 0;
  double loss_xi = 0.0;
  double loss_mu = 0.0;
  double entropy = 0.0;
  double d_mu = 0.0;
  bool diff_nonneg = false;  // 0 <= L_xi - L_mu
  BoundReport unit;          // after rescaling the loss to [0, 1]
  BoundReport general;       // in the original loss units

  bool pass() const { return diff_nonneg && unit.pass && general.pass; }
};

// Exact losses of the universal and informed schemes plus both theorem
// bounds and their slacks. The unit report rescales internally; a
// degenerate (constant) loss yields zero difference and zero bounds.
inline BoundCheck check_bounds(const Measure& mu, const ModelClass& mc, const LossSpec& loss, int n,
                               int exact_cap = kDefaultExactCap) {
  BoundCheck out;
  out.n = n;

  const StepLoss xi = exact_expected_loss(mu, Predictor::mixture(mc, loss), n, exact_cap);
  const StepLoss inf = exact_expected_loss(mu, Predictor::informed(mu, loss), n, exact_cap);
  const EntropyResult ent = exact_entropy(mu, mc, n, exact_cap);

  out.loss_xi = xi.cumulative.back();
  out.loss_mu = inf.cumulative.back();
  out.entropy = ent.total;
  out.d_mu = ent.d_mu;

  const double diff = out.loss_xi - out.loss_mu;
  out.diff_nonneg = diff >= -kSlackTolerance;

  const double l_delta = loss.l_delta();
  const double entropy = std::max(0.0, out.entropy);  // guard fp-negative zero-entropy cases
  if (l_delta == 0.0) {
    out.unit = {0.0, 0.0, 0.0, true};
    out.general = {0.0, diff, -diff, std::abs(diff) <= kSlackTolerance};
    return out;
  }

  // Clamp the excess over n*l_min at zero; exact enumeration can land a
  // hair below it in floating point.
  const double n_lmin = static_cast<double>(n) * loss.l_min();
  const double excess = std::max(0.0, out.loss_mu - n_lmin);

  out.unit.measured = diff / l_delta;
  out.unit.bound = unit_loss_bound(excess / l_delta, entropy);
  out.unit.slack = out.unit.bound - out.unit.measured;
  out.unit.pass = out.unit.slack >= -kSlackTolerance;

  out.general.measured = diff;
  out.general.bound = general_loss_bound(std::max(out.loss_mu, n_lmin), entropy, n, loss.l_min(), l_delta);
  out.general.slack = out.general.bound - out.general.measured;
  out.general.pass = out.general.slack >= -kSlackTolerance;
  return out;
}

// Numerical verifier for the two proof-core inequalities. With
// A' = A + 1, B' = A/4 + 1/A + 1 and the binary relative entropy
// KL(y, z) = y ln(y/z) + (1-y) ln((1-y)/(1-z)), the quantities
//   f_low(y, z)  = B' KL + A'(1-y) z/(1-z) - y        for z in (0, 1/2]
//   f_high(y, z) = B' KL + A'(1-y) - y (1-z)/z        for z in [1/2, 1)
// must both be nonnegative. The verifier reports grid minima.
struct InequalityGridSpec {
  std::vector<double> a_values{0.05, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
  int resolution = 2000;     // grid points per axis
  double tolerance = 1e-9;   // minima must be >= -tolerance
  double z_margin = 1e-6;    // z is sampled in [margin, 1/2] and [1/2, 1 - margin]
};

struct InequalityGridRow {
  double a = 0.0;
  double b = 0.0;       // A/4 + 1/A
  double min_low = 0.0;   // grid minimum of f_low
  double min_high = 0.0;  // grid minimum of f_high
};

struct InequalityGridResult {
  std::vector<InequalityGridRow> rows;
  double overall_min = 0.0;

  bool pass(double tolerance) const { return overall_min >= -tolerance; }
};

namespace detail {

// Binary KL with the 0 ln 0 := 0 convention at the y endpoints.
inline double binary_kl(double y, double z) {
  if (y == 0.0) return -std::log1p(-z);
  if (y == 1.0) return -std::log(z);
  return y * std::log(y / z) + (1.0 - y) * std::log((1.0 - y) / (1.0 - z));
}

}  // namespace detail

inline InequalityGridResult verify_proof_inequalities(const InequalityGridSpec& spec) {
  if (spec.resolution < 2) throw ConfigError("inequality grid resolution must be >= 2");
  if (!(spec.z_margin > 0.0 && spec.z_margin < 0.5)) {
    throw ConfigError("inequality grid z margin must lie in (0, 1/2)");
  }
  for (double a : spec.a_values) {
    if (!(a > 0.0)) throw ConfigError("inequality grid A values must be positive");
  }

  const std::size_t n_a = spec.a_values.size();
  std::vector<double> a1(n_a), b1(n_a);
  for (std::size_t k = 0; k < n_a; ++k) {
    const double a = spec.a_values[k];
    a1[k] = a + 1.0;
    b1[k] = a / 4.0 + 1.0 / a + 1.0;
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> min_low(n_a, inf), min_high(n_a, inf);

  const int res = spec.resolution;
  const double y_step = 1.0 / static_cast<double>(res - 1);
  const double z_lo = spec.z_margin;
  const double z_low_step = (0.5 - z_lo) / static_cast<double>(res - 1);
  const double z_high_step = (0.5 - z_lo) / static_cast<double>(res - 1);

  for (int yi = 0; yi < res; ++yi) {
    const double y = yi == res - 1 ? 1.0 : static_cast<double>(yi) * y_step;
    for (int zi = 0; zi < res; ++zi) {
      // Lower branch: z in [margin, 1/2].
      {
        const double z = zi == res - 1 ? 0.5 : z_lo + static_cast<double>(zi) * z_low_step;
        const double kl = detail::binary_kl(y, z);
        const double lin = (1.0 - y) * z / (1.0 - z);
        for (std::size_t k = 0; k < n_a; ++k) {
          const double f = b1[k] * kl + a1[k] * lin - y;
          if (f < min_low[k]) min_low[k] = f;
        }
      }
      // Upper branch: z in [1/2, 1 - margin].
      {
        const double z = zi == res - 1 ? 1.0 - z_lo : 0.5 + static_cast<double>(zi) * z_high_step;
        const double kl = detail::binary_kl(y, z);
        const double lin1 = 1.0 - y;
        const double lin2 = y * (1.0 - z) / z;
        for (std::size_t k = 0; k < n_a; ++k) {
          const double f = b1[k] * kl + a1[k] * lin1 - lin2;
          if (f < min_high[k]) min_high[k] = f;
        }
      }
    }
  }

  InequalityGridResult out;
  out.rows.reserve(n_a);
  out.overall_min = inf;
  for (std::size_t k = 0; k < n_a; ++k) {
    out.rows.push_back({spec.a_values[k], spec.a_values[k] / 4.0 + 1.0 / spec.a_values[k],
                        min_low[k], min_high[k]});
    out.overall_min = std::min(out.overall_min, std::min(min_low[k], min_high[k]));
  }
  return out;
}

}  // namespace seqpred
