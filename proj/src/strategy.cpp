#include "taxiq/strategy.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

#include "taxiq/detail/parallel.hpp"
#include "taxiq/partial_obs.hpp"

namespace taxiq::strategy {

namespace {

constexpr double bisection_width = 1e-12;
constexpr int flat_run_at_cap = 20;
constexpr int largest_cap = 1 << 16;

// Bisection on a function that is positive at lo and negative at hi.
template <class F>
double bisect_decreasing(F f, double lo, double hi) {
  auto tol = [](double a, double b) { return std::abs(b - a) < bisection_width; };
  const auto [a, b] = boost::math::tools::bisect(f, lo, hi, tol);
  return std::abs(f(a)) <= std::abs(f(b)) ? a : b;
}

}  // namespace

std::string_view to_string(EquilibriumRegime r) noexcept {
  switch (r) {
    case EquilibriumRegime::balk: return "balk";
    case EquilibriumRegime::mixed: return "mixed";
    case EquilibriumRegime::join: return "join";
  }
  return "unknown";
}

EquilibriumOutcome equilibrium_q(const ModelParams& p) {
  validate(p, Regime::partial);
  EquilibriumOutcome out;
  out.l_po = partial_obs::closed_form::l_po(p);
  out.v_po = partial_obs::closed_form::v_po(p);
  const double net = p.reward_r - p.price_p;
  if (net < out.l_po) {
    out.regime = EquilibriumRegime::balk;
    out.q_e = 0.0;
  } else if (net > out.v_po) {
    out.regime = EquilibriumRegime::join;
    out.q_e = 1.0;
  } else {
    out.regime = EquilibriumRegime::mixed;
    auto u = [&p](double q) { return partial_obs::utility(p, q); };
    const double u0 = u(0.0), u1 = u(1.0);
    // On the regime edges the closed-form bound and the sum can disagree in the last bits.
    if (u0 <= 0.0) {
      out.q_e = 0.0;
    } else if (u1 >= 0.0) {
      out.q_e = 1.0;
    } else {
      out.q_e = bisect_decreasing(u, 0.0, 1.0);
    }
  }
  return out;
}

SocialQOutcome social_q(const ModelParams& p) {
  validate(p, Regime::partial);
  constexpr int points = social_q_grid_points;
  constexpr double h = 1.0 / (points - 1);
  auto grid_q = [](int i) { return i == points - 1 ? 1.0 : i * h; };

  std::vector<double> gain(points);
  for (int i = 0; i < points; ++i) gain[i] = partial_obs::welfare_gain(p, grid_q(i));
  int best = 0;
  for (int i = 1; i < points; ++i) {
    if (gain[i] > gain[best]) best = i;
  }

  double q_star = grid_q(best);
  double g_star = gain[best];
  const double lo = grid_q(std::max(best - 1, 0));
  const double hi = grid_q(std::min(best + 1, points - 1));
  auto neg = [&p](double q) { return -partial_obs::welfare_gain(p, q); };
  const auto [q_ref, neg_ref] = boost::math::tools::brent_find_minima(neg, lo, hi, 27);
  if (-neg_ref > g_star) {
    q_star = q_ref;
    g_star = -neg_ref;
  }
  // Brent stops short of an endpoint optimum.
  for (double edge : {0.0, 1.0}) {
    if (std::abs(q_star - edge) < 1e-7 && partial_obs::welfare_gain(p, edge) >= g_star) {
      q_star = edge;
      g_star = partial_obs::welfare_gain(p, edge);
    }
  }

  SocialQOutcome out;
  out.q_star = q_star;
  out.gain_at_opt = g_star;
  out.welfare_at_opt = partial_obs::welfare(p, q_star).total;
  out.boundary = q_star == 0.0 || q_star == 1.0;

  // Sign changes of S' on the interior grid; keep the root nearest q*.
  auto dS = [&p](double q) { return partial_obs::welfare_derivative(p, q).total(); };
  double prev = dS(grid_q(1));
  for (int i = 2; i < points - 1; ++i) {
    const double cur = dS(grid_q(i));
    if ((prev > 0.0) != (cur > 0.0)) {
      const double a = grid_q(i - 1), b = grid_q(i);
      const double root = prev > 0.0 ? bisect_decreasing(dS, a, b)
                                     : bisect_decreasing([&](double q) { return -dS(q); }, a, b);
      if (!out.derivative_root || std::abs(root - q_star) < std::abs(*out.derivative_root - q_star)) {
        out.derivative_root = root;
      }
    }
    prev = cur;
  }
  if (out.derivative_root && std::abs(*out.derivative_root - q_star) > 1e-4) {
    out.diagnostic = "derivative root " + std::to_string(*out.derivative_root) + " differs from argmax " +
                     std::to_string(q_star);
  }
  return out;
}

SocialNOutcome social_n(const ModelParams& p, int n_cap) {
  validate(p, Regime::observable);
  if (n_cap < 2) throw Error(ErrorCode::invalid_threshold, "n_cap must be at least 2");

  SocialNOutcome out;
  for (int cap = n_cap;; cap *= 2) {
    const auto profile = observable::welfare_profile(p, cap);
    // S(n + 1) - S(best), accumulated from the stable steps.
    int best = 1;
    double diff = 0.0;
    for (int n = 1; n < cap; ++n) {
      diff += profile.step[static_cast<std::size_t>(n - 1)];
      if (diff > 0.0) {
        best = n + 1;
        diff = 0.0;
      }
    }
    bool settled = true;
    for (int n = cap - flat_run_at_cap; n < cap; ++n) {
      if (n >= 1 && profile.step[static_cast<std::size_t>(n - 1)] > 0.0) settled = false;
    }
    out.n_star = best;
    out.welfare_at_opt = profile.welfare[static_cast<std::size_t>(best - 1)];
    out.n_cap = cap;
    out.boundary = !settled || best == cap;
    if (settled || cap >= largest_cap) break;
  }

  out.n_e = observable::equilibrium_threshold(p);
  out.root_kind = observable::threshold_root_existence(p);
  if (out.root_kind != observable::ThresholdRoot::none) {
    out.n_inequality = observable::solve_threshold_equation(p, out.n_cap);
    out.routes_agree = out.n_inequality == out.n_star;
  }
  return out;
}

int equilibrium_n(const ModelParams& p) {
  validate(p, Regime::observable);
  return observable::equilibrium_threshold(p);
}

std::string_view to_string(SweepAxis axis) noexcept { return axis == SweepAxis::lambda ? "lambda" : "alpha"; }

SweepAxis parse_axis(const std::string& name) {
  if (name == "lambda") return SweepAxis::lambda;
  if (name == "alpha") return SweepAxis::alpha;
  throw Error(ErrorCode::usage, "axis must be lambda or alpha");
}

std::vector<WelfareComparisonRow> compare_welfare(const ModelParams& params, SweepAxis axis,
                                                  const std::vector<double>& grid) {
  std::vector<WelfareComparisonRow> rows(grid.size());
  detail::parallel_for(grid.size(), [&](std::size_t i) {
    ModelParams p = params;
    (axis == SweepAxis::lambda ? p.lambda : p.alpha) = grid[i];
    auto& row = rows[i];
    row.x = grid[i];
    std::string errors;
    try {
      const auto s = social_q(p);
      row.welfare_partial = s.welfare_at_opt;
      row.q_star = s.q_star;
    } catch (const Error& e) {
      errors = std::string("partial: ") + e.what();
    }
    try {
      const auto s = social_n(p);
      row.welfare_observable = s.welfare_at_opt;
      row.n_star = s.n_star;
    } catch (const Error& e) {
      if (!errors.empty()) errors += "; ";
      errors += std::string("observable: ") + e.what();
    }
    row.error = errors;
  });
  return rows;
}

}  // namespace taxiq::strategy
