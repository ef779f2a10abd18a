// measures.hpp

#pragma once

namespace taxiq {

/// Long-run performance of the queue under a fixed joining policy.
/// Waiting times follow from the queue lengths by Little's law.
struct PerformanceMeasures {
  double lambda_p_eff = 0.0;  // admitted passengers per unit time
  double lambda_t_eff = 0.0;  // taxi arrivals per unit time
  double el_p = 0.0;          // mean passenger queue length
  double el_t = 0.0;          // mean taxi queue length
  double ew_p = 0.0;          // el_p / lambda_p_eff
  double ew_t = 0.0;          // el_t / lambda_t_eff
  double em = 0.0;            // time-average conditional matching time
  // No passenger ever joins a state without waiting taxis; the conditional
  // passenger wait is then reported as 0 rather than 0/0.
  bool no_passenger_flow = false;
};

}  // namespace taxiq
