#include "taxiq/observable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "taxiq/detail/moments.hpp"

namespace taxiq::observable {

namespace {

using detail::ChainMoments;

constexpr double rescale_above = 1e150;

void check(const ModelParams& p, int threshold) {
  validate(p, Regime::observable);
  if (threshold < 1) throw Error(ErrorCode::invalid_threshold, "threshold n_s must be at least 1");
}

// Walks the passenger side one threshold at a time. `base` always holds the
// moments for the current threshold on a scale where w(current) is known.
class ThresholdWalk {
 public:
  explicit ThresholdWalk(const ModelParams& p) : p_(p), rho2_(p.lambda / (p.alpha + p.mu2)) {
    const auto taxi = detail::taxi_side(p);
    base_ = taxi.moments;
    w_ = taxi.weight_at_zero;
    // Threshold 1: state 0 admits, state 1 is the top state.
    base_ += delta();
    w_ *= rho2_;
    ++threshold_;
  }

  int threshold() const noexcept { return threshold_; }
  const ChainMoments& moments() const noexcept { return base_; }

  /// S(threshold + 1) - S(threshold)
  double step() const noexcept { return detail::welfare_shift(p_, base_, delta()); }

  void advance() {
    base_ += delta();
    w_ *= rho2_;
    ++threshold_;
    if (w_ > rescale_above) {
      const double f = 1.0 / rescale_above;
      base_ *= f;
      w_ *= f;
    }
  }

 private:
  // Moving the threshold from t to t + 1: state t starts admitting and state
  // t + 1 becomes reachable.
  ChainMoments delta() const noexcept {
    const double next = w_ * rho2_;
    const int top = threshold_ + 1;
    ChainMoments d;
    d.z = next;
    d.admit = p_.lambda * w_;
    d.admit_queue = d.admit;
    d.dispatch = p_.mu2 * next;
    d.renege = p_.alpha * next;
    d.queue_p = top * next;
    d.match = p_.k2 * next;
    d.positive = next;
    d.nonnegative = next;
    return d;
  }

  const ModelParams& p_;
  double rho2_;
  ChainMoments base_;
  double w_ = 0.0;  // weight of state `threshold_`
  int threshold_ = 0;
};

ChainMoments moments_at(const ModelParams& p, int threshold) {
  ThresholdWalk walk(p);
  while (walk.threshold() < threshold) walk.advance();
  return walk.moments();
}

PerformanceMeasures measures_from(const ModelParams& p, const ChainMoments& m) {
  PerformanceMeasures out;
  out.lambda_p_eff = m.admit / m.z;
  out.lambda_t_eff = m.dispatch / m.z;
  out.el_p = m.queue_p / m.z;
  out.el_t = m.queue_t / m.z;
  out.ew_p = out.el_p / out.lambda_p_eff;
  out.ew_t = out.el_t / out.lambda_t_eff;
  out.em = p.k1 + (p.k2 - p.k1) * (m.positive / m.z);
  return out;
}

}  // namespace

double utility(const ModelParams& p, int n) {
  if (n < 0) throw Error(ErrorCode::state_out_of_range, "observed queue length must be nonnegative");
  return p.reward_r - p.price_p - p.cost_cp * (n + 1) / p.mu2 - p.cost_cmp * p.k2;
}

int equilibrium_threshold(const ModelParams& p) {
  if (!(p.cost_cp > 0.0) || !(p.mu2 > 0.0)) {
    throw Error(ErrorCode::nonpositive_cost, "cost_cp and mu2 must be positive");
  }
  const double net = p.reward_r - p.price_p - p.cost_cmp * p.k2;
  if (!(net > 0.0)) return 0;
  double x = net * p.mu2 / p.cost_cp;
  // An exact integer quotient can come out one ulp low.
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, x)) x = nearest;
  if (x >= static_cast<double>(std::numeric_limits<int>::max())) {
    throw Error(ErrorCode::invalid_threshold, "equilibrium threshold exceeds the integer range");
  }
  return static_cast<int>(std::floor(x));
}

double ObservableStationary::probability(int n) const noexcept {
  if (n < lower_bound || n > threshold) return 0.0;
  return probabilities[static_cast<std::size_t>(n - lower_bound)];
}

double ObservableStationary::total_mass() const noexcept {
  double sum = 0.0;
  for (double v : probabilities) sum += v;
  return sum;
}

ObservableStationary stationary(const ModelParams& p, int threshold) {
  check(p, threshold);
  const auto rho = intensities(p);
  const int cap = p.capacity_n;
  const double l0 = std::log(rho.rho0);
  const double l2 = std::log(rho.rho2);

  // Log-weights relative to pi(-N), shifted so the largest weight is 1.
  std::vector<double> logw;
  logw.reserve(static_cast<std::size_t>(cap + threshold + 1));
  for (int n = -cap; n <= threshold; ++n) {
    logw.push_back(n <= 0 ? (n + cap) * l0 : cap * l0 + n * l2);
  }
  const double top = *std::max_element(logw.begin(), logw.end());
  double z = 0.0;
  for (double& v : logw) {
    v = std::exp(v - top);
    z += v;
  }

  ObservableStationary out;
  out.lower_bound = -cap;
  out.threshold = threshold;
  out.probabilities = std::move(logw);
  for (double& v : out.probabilities) v /= z;
  out.pi_minus_n = out.probabilities.front();
  return out;
}

PerformanceMeasures performance(const ModelParams& p, int threshold) {
  check(p, threshold);
  return measures_from(p, moments_at(p, threshold));
}

double welfare(const ModelParams& p, int threshold) {
  check(p, threshold);
  const auto m = performance(p, threshold);
  return m.lambda_p_eff * (p.reward_r - p.price_p) + m.lambda_t_eff * p.price_p - p.cost_cp * m.el_p -
         p.cost_ct * m.el_t - m.em * (p.cost_cmp * m.lambda_p_eff + p.cost_cmt * m.lambda_t_eff);
}

double welfare_by_waits(const ModelParams& p, int threshold) {
  const auto m = performance(p, threshold);
  return m.lambda_p_eff * (p.reward_r - p.price_p - p.cost_cp * m.ew_p - p.cost_cmp * m.em) +
         m.lambda_t_eff * (p.price_p - p.cost_ct * m.ew_t - p.cost_cmt * m.em);
}

double welfare_step(const ModelParams& p, int threshold) {
  check(p, threshold);
  ThresholdWalk walk(p);
  while (walk.threshold() < threshold) walk.advance();
  return walk.step();
}

WelfareProfile welfare_profile(const ModelParams& p, int n_max) {
  check(p, n_max);
  WelfareProfile out;
  out.welfare.reserve(static_cast<std::size_t>(n_max));
  out.step.reserve(static_cast<std::size_t>(n_max));
  ThresholdWalk walk(p);
  for (;;) {
    out.welfare.push_back(detail::welfare(p, walk.moments()));
    out.step.push_back(walk.step());
    if (walk.threshold() == n_max) break;
    walk.advance();
  }
  return out;
}

double ThresholdInequalityTerms::g(double x) const noexcept {
  const double r0n = std::pow(rho0, capacity);
  return cost_cp * rho2 * a5 * (1.0 - rho2) * x -
         cost_cp * rho2 * r0n * rho2 * (1.0 - rho0) * (1.0 - std::pow(rho2, x)) + e2 * std::pow(rho2, 2.0 * x);
}

ThresholdInequalityTerms threshold_terms(const ModelParams& p) {
  validate(p, Regime::observable);
  const auto rho = intensities(p);
  const double r0 = rho.rho0;
  const double r2 = rho.rho2;
  const double n = p.capacity_n;
  const double r0n = std::pow(r0, n);
  const double r0n1 = r0n * r0;
  const double r02n = r0n * r0n;
  const double lam = p.lambda, mu2 = p.mu2;
  const double k1 = p.k1, k2 = p.k2;
  const double cmp = p.cost_cmp, cmt = p.cost_cmt;

  ThresholdInequalityTerms t;
  t.rho0 = r0;
  t.rho2 = r2;
  t.cost_cp = p.cost_cp;
  t.capacity = n;
  t.a5 = 1.0 - r2 - r0n1 + r0n * r2;
  t.e1 = mu2 * r0n * (1.0 - r0) * r2 * p.price_p -
         cmp * (k2 * lam * r0n * (1.0 - r0n) * r2 + k1 * lam * r0n * (1.0 - r0) + k1 * lam * r0n1 * (1.0 - r0n)) -
         cmt * (k2 * lam * r0n * (1.0 - r0n) * r2 + k1 * mu2 * r0n * r2 * (1.0 - r0) +
                k1 * mu2 * r0n1 * r2 * (1.0 - r0n));
  t.e2 = cmp * k2 * lam * r02n * r2 * (1.0 - r0) + cmt * k2 * mu2 * r02n * r2 * r2 * (1.0 - r0);
  const double k1_block = k1 * lam * (1.0 - r0n) * (1.0 - r2) +
                          k1 * lam * r0 * (1.0 - r0n) * (1.0 - r0n) * (1.0 - r2) / (1.0 - r0);
  t.e3 = lam * (1.0 - r0n) * (1.0 - r2) * p.price_p - p.cost_ct * (1.0 - r2) * (n - r0 * (1.0 - r0n) / (1.0 - r0)) -
         cmp * k1_block - cmt * k1_block;
  t.d2 = p.alpha * r0n * (r0n1 - r0 + n - n * r0);
  const double inv = 1.0 / (r0n * (r0 - 1.0));
  t.m1 = (p.reward_r - p.price_p) * lam * t.a5 * (1.0 - r2) * (1.0 - r2) + t.e3 * r2 * (r2 - 1.0) -
         t.e1 * ((1.0 - r2) * r2 + t.a5 * (1.0 - r2) * inv) + t.e2 * r2 + 2.0 * t.a5 * t.d2 * inv -
         t.a5 * t.d2 * (1.0 + r2) * inv;
  return t;
}

std::string_view to_string(GMonotonicity m) noexcept {
  switch (m) {
    case GMonotonicity::decreasing: return "decreasing";
    case GMonotonicity::increasing: return "increasing";
    case GMonotonicity::decreasing_high: return "decreasing_high";
  }
  return "unknown";
}

std::string_view to_string(ThresholdRoot r) noexcept {
  switch (r) {
    case ThresholdRoot::none: return "none";
    case ThresholdRoot::unique_above_one: return "unique_above_one";
    case ThresholdRoot::unique_at_one: return "unique_at_one";
  }
  return "unknown";
}

GMonotonicity g_monotonicity_class(const ModelParams& p) {
  validate(p, Regime::observable);
  const auto rho = intensities(p);
  // mu1 < mu2 < alpha + mu2 forces rho2 < rho0, so three regions remain.
  if (rho.rho0 < 1.0) return GMonotonicity::decreasing;
  if (rho.rho2 < 1.0) return GMonotonicity::increasing;
  return GMonotonicity::decreasing_high;
}

ThresholdRoot threshold_root_existence(const ModelParams& p) {
  const auto t = threshold_terms(p);
  const double g1 = t.g(1.0);
  const double scale = std::max({1.0, std::abs(g1), std::abs(t.m1)});
  if (std::abs(g1 - t.m1) <= 1e-12 * scale) return ThresholdRoot::unique_at_one;
  const bool below = g1 < t.m1;
  switch (g_monotonicity_class(p)) {
    case GMonotonicity::decreasing:
    case GMonotonicity::decreasing_high:
      return below ? ThresholdRoot::none : ThresholdRoot::unique_above_one;
    case GMonotonicity::increasing:
      return below ? ThresholdRoot::unique_above_one : ThresholdRoot::none;
  }
  return ThresholdRoot::none;
}

std::optional<int> solve_threshold_equation(const ModelParams& p, int n_max) {
  const auto existence = threshold_root_existence(p);
  if (existence == ThresholdRoot::none) return std::nullopt;
  if (existence == ThresholdRoot::unique_at_one) return 1;
  const auto t = threshold_terms(p);
  auto h = [&t](int n) { return t.g(static_cast<double>(n)) - t.m1; };

  int lo = 1;
  int hi = n_max;
  const double hlo = h(lo);
  if (hlo == 0.0) return lo;
  if (std::signbit(hlo) == std::signbit(h(hi)) && h(hi) != 0.0) return std::nullopt;
  // Invariant: sign(h(lo)) == sign(hlo) and h(hi) has the other sign (or is 0).
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    const double hm = h(mid);
    if (hm != 0.0 && std::signbit(hm) == std::signbit(hlo)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace taxiq::observable
