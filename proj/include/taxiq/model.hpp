// model.hpp
//
// Exogenous parameters of the passenger-taxi double-ended queue and the
// transition structure of its birth-death chain.
//
// State n of the chain: n > 0 passengers wait, n < 0 taxis wait (at most
// capacity_n of them), n = 0 both queues are empty. Passengers arrive at rate
// lambda; those arriving when no taxi waits (n >= 0) join with probability q
// (partially observable) or iff n < threshold (observable). Taxis arrive at
// rate mu1 while n <= 0 and mu2 while n > 0; a nonempty passenger queue also
// loses passengers at the aggregate impatience rate alpha.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "taxiq/error.hpp"

namespace taxiq {

struct ModelParams {
  double lambda = 0.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double alpha = 0.0;
  int capacity_n = 0;
  double k1 = 0.0;
  double k2 = 0.0;
  double reward_r = 0.0;
  double price_p = 0.0;
  double cost_cp = 0.0;
  double cost_ct = 0.0;
  double cost_cmp = 0.0;
  double cost_cmt = 0.0;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Information available to an arriving passenger.
enum class Regime { partial, observable };

std::string_view to_string(Regime regime) noexcept;

/// Joining rule in force: a probability q for the partially observable case,
/// a threshold n_s (join iff n < n_s) for the observable case.
class Policy {
 public:
  static Policy partial(double q);
  static Policy observable(int threshold);

  Regime regime() const noexcept { return regime_; }
  double joining_probability() const noexcept { return q_; }
  int threshold() const noexcept { return threshold_; }

 private:
  Policy(Regime regime, double q, int threshold) : regime_(regime), q_(q), threshold_(threshold) {}

  Regime regime_;
  double q_;
  int threshold_;
};

struct TrafficIntensities {
  double rho0;  // lambda / mu1
  double rho2;  // lambda / (alpha + mu2)

  double rho1(double q) const noexcept { return q * rho2; }
};

TrafficIntensities intensities(const ModelParams& params) noexcept;

/// Two-point matching time: k1 while no passenger waits, k2 otherwise.
struct MatchingTimeDistribution {
  double k1;
  double k2;

  double conditional_mean(int state) const noexcept { return state <= 0 ? k1 : k2; }
};

inline MatchingTimeDistribution matching_time(const ModelParams& p) noexcept { return {p.k1, p.k2}; }

struct Validation {
  ModelParams params;
  std::vector<std::string> warnings;
};

/// Checks every parameter invariant and throws Error with the code of the
/// first violation. The partially observable regime also needs rho2 < 1.
/// rho0 >= 1 is allowed (the taxi side is finite) and reported as a warning.
Validation validate(const ModelParams& params, Regime regime);

/// Tolerance used to declare rho0 or rho2 equal to one.
inline constexpr double degenerate_tolerance = 1e-12;

struct Transition {
  int target;
  double rate;

  friend bool operator==(const Transition&, const Transition&) = default;
};

/// Outgoing transitions with positive rate from `state` under `policy`.
std::vector<Transition> transition_rates(const ModelParams& params, int state, const Policy& policy);

/// Largest reachable state (inclusive) under the policy, or -1 for "unbounded".
int upper_state(const Policy& policy) noexcept;

// Flat "name = value" parameter files.

/// Parses `name = value` lines; '#' starts a comment, blank lines are ignored.
std::map<std::string, std::string> parse_key_values(const std::string& text);

/// Reads and parses a parameter file.
std::map<std::string, std::string> load_key_values(const std::string& path);

/// Field names accepted in parameter files and as CLI flags.
const std::vector<std::string>& param_names();

/// Assigns one field by name; throws Error(invalid_config) on unknown names or
/// unparsable values.
void set_param(ModelParams& params, const std::string& name, const std::string& value);
void set_param(ModelParams& params, const std::string& name, double value);

/// Reads one field by name.
double param_value(const ModelParams& params, const std::string& name);

/// Applies every entry that names a model field; returns the entries it did
/// not recognise.
std::map<std::string, std::string> apply_params(ModelParams& params,
                                                const std::map<std::string, std::string>& values);

}  // namespace taxiq
