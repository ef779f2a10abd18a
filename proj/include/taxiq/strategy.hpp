// strategy.hpp
//
// Equilibrium and socially optimal strategies for both information levels.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "taxiq/model.hpp"
#include "taxiq/observable.hpp"

namespace taxiq::strategy {

enum class EquilibriumRegime { balk, mixed, join };

std::string_view to_string(EquilibriumRegime r) noexcept;

struct EquilibriumOutcome {
  EquilibriumRegime regime = EquilibriumRegime::balk;
  double q_e = 0.0;
  double l_po = 0.0;  // R - P - U(0)
  double v_po = 0.0;  // R - P - U(1)
};

/// Classifies R - P against [l_po, v_po]; in the mixed regime q_e solves
/// U(q) = 0 by bisection.
EquilibriumOutcome equilibrium_q(const ModelParams& params);

struct SocialQOutcome {
  double q_star = 0.0;
  double welfare_at_opt = 0.0;
  double gain_at_opt = 0.0;  // S(q*) - S(0)
  bool boundary = false;     // q* at 0 or 1
  std::optional<double> derivative_root;
  // Set when a derivative root exists and sits more than 1e-4 from q*.
  std::optional<std::string> diagnostic;
};

inline constexpr int social_q_grid_points = 2001;

/// argmax of S over [0, 1]: grid scan, then Brent refinement in the cells
/// around the best grid point.
SocialQOutcome social_q(const ModelParams& params);

struct SocialNOutcome {
  int n_star = 1;
  double welfare_at_opt = 0.0;
  bool boundary = false;  // still improving at the largest cap tried
  int n_cap = 0;
  int n_e = 0;
  // g(n) = M1 route
  observable::ThresholdRoot root_kind = observable::ThresholdRoot::none;
  std::optional<int> n_inequality;
  bool routes_agree = true;  // vacuous when no unique root is claimed
};

inline constexpr int default_n_cap = 500;

/// Brute-force argmax of S(n) over [1, n_cap]. The cap doubles while S is
/// not decreasing over the last 20 thresholds below it.
SocialNOutcome social_n(const ModelParams& params, int n_cap = default_n_cap);

/// Observable equilibrium threshold; same as observable::equilibrium_threshold.
int equilibrium_n(const ModelParams& params);

enum class SweepAxis { lambda, alpha };

std::string_view to_string(SweepAxis axis) noexcept;
SweepAxis parse_axis(const std::string& name);

struct WelfareComparisonRow {
  double x = 0.0;
  std::optional<double> welfare_partial;
  std::optional<double> q_star;
  std::optional<double> welfare_observable;
  std::optional<int> n_star;
  std::string error;  // empty when both regimes were computed
};

/// Optimal welfare under both information levels along one axis. Points are
/// evaluated concurrently; rows come back in grid order.
std::vector<WelfareComparisonRow> compare_welfare(const ModelParams& params, SweepAxis axis,
                                                  const std::vector<double>& grid);

}  // namespace taxiq::strategy
