// sim.hpp
//
// Discrete-event simulation of the chain, used as an independent check on the
// closed forms. Rates come from model::transition_rates; a departure from a
// state with waiting passengers is split into service (mu2) and reneging
// (alpha) by a separate Bernoulli draw.
//
// Welfare per replication is accumulated the same way the analytic S counts
// it: R - P for every admitted passenger, P for every taxi that takes a
// passenger, time-average queue costs, and the time-average matching time
// applied to both flows.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "taxiq/model.hpp"

namespace taxiq::sim {

struct SimConfig {
  std::uint64_t horizon_events = 1'000'000;  // including warmup
  std::uint64_t warmup_events = 100'000;
  std::uint64_t seed = 1;
  int replications = 5;
};

void check(const SimConfig& config);

struct SimEstimate {
  double mean = 0.0;
  double half_width_95 = 0.0;  // Student t on replication means; 0 with one replication
  int replications = 0;
};

SimEstimate summarize(const std::vector<double>& replication_values);

/// Fraction of simulated time in each state, pooled over replications.
struct StateFrequencies {
  int lower_bound = 0;
  std::vector<double> fraction;  // states lower_bound .. lower_bound + size - 1

  double at(int n) const noexcept;
};

/// Exits and holding time per state, pooled over replications.
struct StateJumps {
  int state = 0;
  double time = 0.0;
  std::uint64_t up = 0;
  std::uint64_t down = 0;
};

struct SimResult {
  // lambda_p_eff, lambda_t_eff, el_p, el_t, ew_p, ew_t, em, welfare,
  // conditional_wait, matching_time_at_admission, renege_rate
  std::map<std::string, SimEstimate> measures;
  StateFrequencies frequencies;
  std::vector<StateJumps> jumps;
};

/// Measure names in output order.
const std::vector<std::string>& measure_names();

SimResult simulate(const ModelParams& params, const Policy& policy, const SimConfig& config);

/// Little's law on the passenger side: mean passenger queue over the rate of
/// admissions into states n >= 0.
SimEstimate estimate_conditional_wait(const ModelParams& params, double q, const SimConfig& config);

/// Total variation distance between the empirical frequencies and pi; mass of
/// pi outside the simulated range counts fully.
double total_variation(const StateFrequencies& freq, const std::function<double(int)>& pi);

}  // namespace taxiq::sim
