// moments.hpp
//
// Unnormalized sums over the stationary weights of the chain. Every measure
// of interest is a ratio of two of these sums, and so is social welfare (up to
// a second-order term in the matching time). Keeping the sums, instead of the
// normalized measures, lets welfare differences be formed without the
// cancellation that subtracting two nearly equal welfare values would cause.

#pragma once

#include "taxiq/model.hpp"

namespace taxiq::detail {

struct ChainMoments {
  double z = 0.0;            // total weight
  double admit = 0.0;        // sum of w(n) * admission rate in n
  double admit_queue = 0.0;  // same, restricted to n >= 0
  double dispatch = 0.0;     // sum of w(n) * taxi arrival rate in n
  double renege = 0.0;       // sum over n > 0 of w(n) * alpha
  double queue_p = 0.0;      // sum of max(n, 0) * w(n)
  double queue_t = 0.0;      // sum of max(-n, 0) * w(n)
  double match = 0.0;        // sum of E(M | n) * w(n)
  double positive = 0.0;     // weight of n > 0
  double nonnegative = 0.0;  // weight of n >= 0
  double nonpositive = 0.0;  // weight of n <= 0

  ChainMoments& operator+=(const ChainMoments& o) noexcept;
  ChainMoments& operator*=(double factor) noexcept;
};

ChainMoments operator+(ChainMoments a, const ChainMoments& b) noexcept;

/// Taxi side (-N..0) with a scale that keeps the largest weight at 1.
/// State 0 carries no admission term; the caller adds it for its policy.
struct TaxiSide {
  ChainMoments moments;
  double weight_at_zero;  // w(0) on the same scale
};

TaxiSide taxi_side(const ModelParams& params);

/// S = [(R-P) admit + P dispatch - C_P queue_p - C_T queue_t] / z
///     - match (C_MP admit + C_MT dispatch) / z^2
double welfare(const ModelParams& params, const ChainMoments& m) noexcept;

/// welfare(base + delta) - welfare(base), evaluated without forming the
/// difference of the two totals.
double welfare_shift(const ModelParams& params, const ChainMoments& base, const ChainMoments& delta) noexcept;

}  // namespace taxiq::detail
