// partial_obs.hpp
//
// Stationary analysis of the partially observable case: an arriving passenger
// sees the taxi queue but not the passenger queue, and joins an empty taxi
// stand with probability q. With rho0 = lambda/mu1 and rho1 = q lambda/(alpha+mu2)
// the stationary law is geometric on both sides of 0:
//   pi(n) = pi(-N) rho0^(n+N)        for -N <= n <= 0
//   pi(n) = pi(-N) rho0^N rho1^n     for n > 0.

#pragma once

#include <vector>

#include "taxiq/measures.hpp"
#include "taxiq/model.hpp"

namespace taxiq::partial_obs {

struct StationaryDistribution {
  int lower_bound = 0;               // -N
  std::vector<double> probabilities;  // pi(lower_bound), pi(lower_bound + 1), ...
  double tail_ratio = 0.0;           // rho1; pi(n + 1) = tail_ratio * pi(n) for n >= 0
  double pi_minus_n = 0.0;

  /// Last state held explicitly in `probabilities`.
  int upper_stored() const noexcept { return lower_bound + static_cast<int>(probabilities.size()) - 1; }
  /// pi(n) for any n (zero below the lower bound).
  double probability(int n) const noexcept;
  /// Mass of the states strictly above n, for n >= 0.
  double tail_mass_after(int n) const noexcept;
  /// Stored mass plus the geometric remainder beyond the last stored state.
  double total_mass() const noexcept;
};

/// Normalizes the geometric weights directly (finite taxi side plus closed-form
/// passenger tail). Throws unstable when rho1(q) >= 1.
StationaryDistribution stationary(const ModelParams& params, double q);

PerformanceMeasures performance(const ModelParams& params, double q);

/// Mean wait of a passenger who joins while no taxi waits: 1/((alpha+mu2) - lambda q).
double expected_wait_conditional(const ModelParams& params, double q);

/// Expected utility of joining: R - P - C_P E(W) - C_MP E(M).
double utility(const ModelParams& params, double q);

struct WelfareDecomposition {
  double s1 = 0.0;  // lambda_P (R - P - C_P W_P) + lambda_P (P - C_T W_T)
  double s2 = 0.0;  // -(lambda_P - lambda_T) (P - C_T W_T)
  double sm = 0.0;  // -E(M) (lambda_P C_MP + lambda_T C_MT)
  double total = 0.0;
  double cbar = 0.0;  // C_T (rho0^(N+1) - rho0 + N - N rho0) / (1 - rho0)^2
};

WelfareDecomposition welfare(const ModelParams& params, double q);

/// Social welfare assembled from per-passenger and per-taxi net benefits and
/// the waiting times; equal to welfare().total.
double welfare_direct(const ModelParams& params, double q);

/// S(q) - S(0), evaluated without cancellation. Keeps full relative precision
/// even when the passenger side carries a tiny share of the stationary mass.
double welfare_gain(const ModelParams& params, double q);

struct DerivativeTerms {
  double s1_prime = 0.0;
  double s2_prime = 0.0;
  double sm_prime = 0.0;

  // Positive constants of the S2' closed form.
  double d1 = 0.0, d2 = 0.0, d3 = 0.0, d4 = 0.0;
  // Constants of the S_M' closed form.
  double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0, b1 = 0.0;
  // S1' changes sign at the roots of quad_a x^2 + quad_b x + c in x = rho1;
  // qbar is the larger root.
  double quad_a = 0.0, quad_b = 0.0, discriminant = 0.0, qbar = 0.0;
  // discriminant - 4 C_P^2 (1 - rho0^N)^2 / (1 - rho0)^2 and qbar - 1, in
  // forms that keep their precision when rho0^N is tiny.
  double discriminant_margin = 0.0, qbar_margin = 0.0;

  double total() const noexcept { return s1_prime + s2_prime + sm_prime; }
};

/// Exact derivatives of the three welfare parts together with the constants
/// used by the closed-form sign argument. q must lie in (0, 1).
DerivativeTerms welfare_derivative(const ModelParams& params, double q);

/// Closed-form expressions, used to cross-check the normalized sums.
/// They divide by (1 - rho0) and are ill-conditioned near rho0 = 1.
namespace closed_form {

double pi_minus_n(const ModelParams& params, double q);
double lambda_p_eff(const ModelParams& params, double q);
double lambda_t_eff(const ModelParams& params, double q);
double el_p(const ModelParams& params, double q);
double el_t(const ModelParams& params, double q);
double em(const ModelParams& params, double q);
/// alpha rho0^N rho1 / (1 - rho1) pi(-N): the reneging flow lambda_P - lambda_T.
double reneging_flow(const ModelParams& params, double q);
/// U(0) = R - P - l_po.
double l_po(const ModelParams& params);
/// U(1) = R - P - v_po.
double v_po(const ModelParams& params);

}  // namespace closed_form

}  // namespace taxiq::partial_obs
