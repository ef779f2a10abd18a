// observable.hpp
//
// Observable case: an arriving passenger sees both queues and joins iff fewer
// than n_s passengers wait. The chain lives on -N..n_s and its stationary law
// is geometric with ratio rho0 on the taxi side and rho2 on the passenger side.

#pragma once

#include <optional>
#include <vector>

#include "taxiq/measures.hpp"
#include "taxiq/model.hpp"

namespace taxiq::observable {

/// Net benefit of joining behind n waiting passengers:
/// R - P - C_P (n + 1)/mu2 - C_MP k2.
double utility(const ModelParams& params, int n);

/// floor((R - P - C_MP k2) mu2 / C_P), or 0 when that is negative.
/// Satisfies U(n_e - 1) >= 0 > U(n_e).
int equilibrium_threshold(const ModelParams& params);

struct ObservableStationary {
  int lower_bound = 0;  // -N
  int threshold = 0;    // n_s
  std::vector<double> probabilities;  // pi(-N) .. pi(n_s)
  double pi_minus_n = 0.0;

  double probability(int n) const noexcept;
  double total_mass() const noexcept;
};

ObservableStationary stationary(const ModelParams& params, int threshold);

PerformanceMeasures performance(const ModelParams& params, int threshold);

/// S(n_s) = lambda_P (R - P) + lambda_T P - C_P E(L_P) - C_T E(L_T)
///          - E(M) (C_MP lambda_P + C_MT lambda_T).
double welfare(const ModelParams& params, int threshold);

/// Same quantity from per-passenger and per-taxi net benefits with waits.
double welfare_by_waits(const ModelParams& params, int threshold);

/// S(n_s + 1) - S(n_s), free of cancellation.
double welfare_step(const ModelParams& params, int threshold);

/// S(1..n_max) and the steps S(n+1) - S(n) for n = 1..n_max, computed
/// incrementally.
struct WelfareProfile {
  std::vector<double> welfare;  // welfare[i] = S(i + 1)
  std::vector<double> step;     // step[i] = S(i + 2) - S(i + 1)
};

WelfareProfile welfare_profile(const ModelParams& params, int n_max);

/// Constants of the closed-form inequality system for the optimal threshold.
struct ThresholdInequalityTerms {
  double rho0 = 0.0;
  double rho2 = 0.0;
  double cost_cp = 0.0;
  double capacity = 0.0;
  double a5 = 0.0;  // 1 - rho2 - rho0^(N+1) + rho0^N rho2
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
  double d2 = 0.0;  // alpha rho0^N (rho0^(N+1) - rho0 + N - N rho0)
  double m1 = 0.0;

  /// C_P rho2 A5 (1 - rho2) x - C_P rho2^2 rho0^N (1 - rho0)(1 - rho2^x) + E2 rho2^(2x)
  double g(double x) const noexcept;
};

ThresholdInequalityTerms threshold_terms(const ModelParams& params);

enum class GMonotonicity { decreasing, increasing, decreasing_high };

std::string_view to_string(GMonotonicity m) noexcept;

/// Monotonicity of g claimed for the (rho0, rho2) region:
/// rho2 < rho0 < 1 decreasing; rho0 > 1 > rho2 increasing; rho0 > rho2 > 1
/// decreasing_high.
GMonotonicity g_monotonicity_class(const ModelParams& params);

enum class ThresholdRoot { none, unique_above_one, unique_at_one };

std::string_view to_string(ThresholdRoot r) noexcept;

/// Existence of a solution of g(n) = M1 by region and the sign of g(1) - M1.
ThresholdRoot threshold_root_existence(const ModelParams& params);

/// Integer solution of g(n) = M1 by bisection: the smallest n in [1, n_max]
/// with M1 between g(n) and g(n + 1). Empty when existence reports none or no
/// bracket is found.
std::optional<int> solve_threshold_equation(const ModelParams& params, int n_max = 500);

}  // namespace taxiq::observable
