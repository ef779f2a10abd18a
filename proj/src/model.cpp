#include "taxiq/model.hpp"

#include <cmath>
#include <limits>

namespace taxiq {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::nonfinite_value: return "nonfinite_value";
    case ErrorCode::nonpositive_rate: return "nonpositive_rate";
    case ErrorCode::nonpositive_cost: return "nonpositive_cost";
    case ErrorCode::nonpositive_money: return "nonpositive_money";
    case ErrorCode::invalid_capacity: return "invalid_capacity";
    case ErrorCode::mu1_not_less_than_mu2: return "mu1_not_less_than_mu2";
    case ErrorCode::matching_times_not_increasing: return "matching_times_not_increasing";
    case ErrorCode::matching_time_not_integer: return "matching_time_not_integer";
    case ErrorCode::reward_not_above_price: return "reward_not_above_price";
    case ErrorCode::invalid_probability: return "invalid_probability";
    case ErrorCode::invalid_threshold: return "invalid_threshold";
    case ErrorCode::state_out_of_range: return "state_out_of_range";
    case ErrorCode::invalid_config: return "invalid_config";
    case ErrorCode::degenerate_intensity: return "degenerate_intensity";
    case ErrorCode::unstable: return "unstable";
    case ErrorCode::no_convergence: return "no_convergence";
    case ErrorCode::usage: return "usage";
  }
  return "unknown";
}

ErrorCategory category_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::degenerate_intensity:
    case ErrorCode::unstable:
    case ErrorCode::no_convergence:
      return ErrorCategory::numerical;
    case ErrorCode::usage:
    case ErrorCode::invalid_config:
      return ErrorCategory::usage;
    default:
      return ErrorCategory::validation;
  }
}

std::string_view to_string(Regime regime) noexcept {
  return regime == Regime::partial ? "partial" : "observable";
}

Policy Policy::partial(double q) {
  if (!(q >= 0.0 && q <= 1.0)) {
    throw Error(ErrorCode::invalid_probability, "joining probability must lie in [0, 1]");
  }
  return Policy(Regime::partial, q, 0);
}

Policy Policy::observable(int threshold) {
  if (threshold < 0) throw Error(ErrorCode::invalid_threshold, "threshold must be nonnegative");
  return Policy(Regime::observable, 1.0, threshold);
}

TrafficIntensities intensities(const ModelParams& p) noexcept {
  return {p.lambda / p.mu1, p.lambda / (p.alpha + p.mu2)};
}

namespace {

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw Error(ErrorCode::nonfinite_value, std::string(name) + " is not finite");
}

void require_positive(double v, const char* name, ErrorCode code) {
  require_finite(v, name);
  if (!(v > 0.0)) throw Error(code, std::string(name) + " must be strictly positive");
}

bool is_positive_integer(double v) { return v >= 1.0 && std::floor(v) == v; }

}  // namespace

Validation validate(const ModelParams& p, Regime regime) {
  require_positive(p.lambda, "lambda", ErrorCode::nonpositive_rate);
  require_positive(p.mu1, "mu1", ErrorCode::nonpositive_rate);
  require_positive(p.mu2, "mu2", ErrorCode::nonpositive_rate);
  require_positive(p.alpha, "alpha", ErrorCode::nonpositive_rate);
  require_positive(p.cost_cp, "cost_cp", ErrorCode::nonpositive_cost);
  require_positive(p.cost_ct, "cost_ct", ErrorCode::nonpositive_cost);
  require_positive(p.cost_cmp, "cost_cmp", ErrorCode::nonpositive_cost);
  require_positive(p.cost_cmt, "cost_cmt", ErrorCode::nonpositive_cost);
  require_positive(p.reward_r, "reward_r", ErrorCode::nonpositive_money);
  require_positive(p.price_p, "price_p", ErrorCode::nonpositive_money);
  require_positive(p.k1, "k1", ErrorCode::nonpositive_rate);
  require_positive(p.k2, "k2", ErrorCode::nonpositive_rate);
  if (p.capacity_n < 1) throw Error(ErrorCode::invalid_capacity, "capacity_n must be at least 1");
  if (!(p.mu1 < p.mu2)) throw Error(ErrorCode::mu1_not_less_than_mu2, "mu1 must be smaller than mu2");
  if (!is_positive_integer(p.k1) || !is_positive_integer(p.k2)) {
    throw Error(ErrorCode::matching_time_not_integer, "k1 and k2 must be positive integers");
  }
  if (!(p.k1 < p.k2)) throw Error(ErrorCode::matching_times_not_increasing, "k1 must be smaller than k2");
  if (!(p.reward_r > p.price_p)) {
    throw Error(ErrorCode::reward_not_above_price, "reward_r must exceed price_p");
  }

  const auto rho = intensities(p);
  if (std::abs(rho.rho0 - 1.0) <= degenerate_tolerance) {
    throw Error(ErrorCode::degenerate_intensity, "rho0 = lambda/mu1 equals 1");
  }
  if (std::abs(rho.rho2 - 1.0) <= degenerate_tolerance) {
    throw Error(ErrorCode::degenerate_intensity, "rho2 = lambda/(alpha+mu2) equals 1");
  }
  if (regime == Regime::partial && !(rho.rho2 < 1.0)) {
    throw Error(ErrorCode::unstable, "partially observable regime needs rho2 = lambda/(alpha+mu2) < 1");
  }

  Validation out{p, {}};
  if (rho.rho0 >= 1.0) out.warnings.emplace_back("rho0 >= 1");
  return out;
}

int upper_state(const Policy& policy) noexcept {
  return policy.regime() == Regime::observable ? policy.threshold() : -1;
}

std::vector<Transition> transition_rates(const ModelParams& p, int state, const Policy& policy) {
  const int lower = -p.capacity_n;
  const bool observable = policy.regime() == Regime::observable;
  if (state < lower || (observable && state > policy.threshold())) {
    throw Error(ErrorCode::state_out_of_range, "state " + std::to_string(state) + " outside the state space");
  }

  double up = 0.0;
  if (state < 0) {
    up = p.lambda;
  } else if (observable) {
    up = state < policy.threshold() ? p.lambda : 0.0;
  } else {
    up = p.lambda * policy.joining_probability();
  }
  double down = 0.0;
  if (state > 0) {
    down = p.alpha + p.mu2;
  } else if (state > lower) {
    down = p.mu1;
  }

  std::vector<Transition> out;
  if (up > 0.0) out.push_back({state + 1, up});
  if (down > 0.0) out.push_back({state - 1, down});
  return out;
}

}  // namespace taxiq
