#include "taxiq/partial_obs.hpp"

#include <cmath>

#include "taxiq/detail/moments.hpp"

namespace taxiq::partial_obs {

namespace {

using detail::ChainMoments;

constexpr int max_stored_passenger_states = 2'000'000;
constexpr double stored_tail_cutoff = 1e-18;

struct Rhos {
  double rho0;
  double rho1;
  double rho2;
};

Rhos checked(const ModelParams& p, double q) {
  validate(p, Regime::observable);
  if (!(q >= 0.0 && q <= 1.0)) {
    throw Error(ErrorCode::invalid_probability, "joining probability must lie in [0, 1]");
  }
  const auto rho = intensities(p);
  const double rho1 = rho.rho1(q);
  if (!(rho1 < 1.0)) throw Error(ErrorCode::unstable, "rho1 = q lambda/(alpha+mu2) must be below 1");
  return {rho.rho0, rho1, rho.rho2};
}

// Passenger-side contribution (admissions in state 0 and states n > 0),
// expressed on the taxi-side scale through w(0).
ChainMoments passenger_side(const ModelParams& p, double q, double rho1, double w0) {
  const double s = rho1 / (1.0 - rho1);
  const double t = rho1 / ((1.0 - rho1) * (1.0 - rho1));
  ChainMoments d;
  d.z = w0 * s;
  d.admit = p.lambda * q * w0 * (1.0 + s);
  d.admit_queue = d.admit;
  d.dispatch = p.mu2 * w0 * s;
  d.renege = p.alpha * w0 * s;
  d.queue_p = w0 * t;
  d.match = p.k2 * w0 * s;
  d.positive = w0 * s;
  d.nonnegative = w0 * s;
  return d;
}

struct Split {
  ChainMoments base;   // q = 0
  ChainMoments delta;  // passenger side at q
  double w0;
};

Split split(const ModelParams& p, double q, double rho1) {
  const auto taxi = detail::taxi_side(p);
  return {taxi.moments, passenger_side(p, q, rho1, taxi.weight_at_zero), taxi.weight_at_zero};
}

PerformanceMeasures measures_from(const ModelParams& p, const ChainMoments& m, double q) {
  PerformanceMeasures out;
  out.lambda_p_eff = m.admit / m.z;
  out.lambda_t_eff = m.dispatch / m.z;
  out.el_p = m.queue_p / m.z;
  out.el_t = m.queue_t / m.z;
  out.ew_p = out.el_p / out.lambda_p_eff;
  out.ew_t = out.el_t / out.lambda_t_eff;
  out.em = p.k1 + (p.k2 - p.k1) * (m.positive / m.z);
  out.no_passenger_flow = q == 0.0;
  if (out.no_passenger_flow) out.ew_p = 0.0;
  return out;
}

double cbar(const ModelParams& p, double rho0) {
  const double n = p.capacity_n;
  return p.cost_ct * (std::pow(rho0, n + 1) - rho0 + n - n * rho0) / ((1.0 - rho0) * (1.0 - rho0));
}

}  // namespace

double StationaryDistribution::probability(int n) const noexcept {
  if (n < lower_bound) return 0.0;
  if (n <= upper_stored()) return probabilities[static_cast<std::size_t>(n - lower_bound)];
  const double at_zero = probabilities[static_cast<std::size_t>(-lower_bound)];
  return at_zero * std::pow(tail_ratio, n);
}

double StationaryDistribution::tail_mass_after(int n) const noexcept {
  if (tail_ratio == 0.0) return 0.0;
  const double at_zero = probabilities[static_cast<std::size_t>(-lower_bound)];
  return at_zero * std::pow(tail_ratio, n + 1) / (1.0 - tail_ratio);
}

double StationaryDistribution::total_mass() const noexcept {
  double sum = 0.0;
  for (double v : probabilities) sum += v;
  return sum + tail_mass_after(upper_stored());
}

StationaryDistribution stationary(const ModelParams& p, double q) {
  const auto r = checked(p, q);
  const auto s = split(p, q, r.rho1);
  const double z = s.base.z + s.delta.z;

  StationaryDistribution out;
  out.lower_bound = -p.capacity_n;
  out.tail_ratio = r.rho1;
  const double rho0 = r.rho0;
  const int cap = p.capacity_n;
  out.probabilities.reserve(static_cast<std::size_t>(cap) + 1);
  for (int j = cap; j >= 0; --j) {
    const double w = rho0 <= 1.0 ? std::pow(rho0, cap - j) : std::pow(rho0, -j);
    out.probabilities.push_back(w / z);
  }
  const double at_zero = out.probabilities.back();
  double pn = at_zero;
  for (int n = 1; n <= max_stored_passenger_states && r.rho1 > 0.0; ++n) {
    pn *= r.rho1;
    out.probabilities.push_back(pn);
    if (pn * r.rho1 / (1.0 - r.rho1) < stored_tail_cutoff) break;
  }
  out.pi_minus_n = out.probabilities.front();
  return out;
}

PerformanceMeasures performance(const ModelParams& p, double q) {
  const auto r = checked(p, q);
  const auto s = split(p, q, r.rho1);
  return measures_from(p, s.base + s.delta, q);
}

double expected_wait_conditional(const ModelParams& p, double q) {
  checked(p, q);
  return 1.0 / ((p.alpha + p.mu2) - p.lambda * q);
}

double utility(const ModelParams& p, double q) {
  const double wait = expected_wait_conditional(p, q);
  const double em = performance(p, q).em;
  return p.reward_r - p.price_p - p.cost_cp * wait - p.cost_cmp * em;
}

WelfareDecomposition welfare(const ModelParams& p, double q) {
  const auto r = checked(p, q);
  const auto s = split(p, q, r.rho1);
  const auto m = s.base + s.delta;
  const auto pm = measures_from(p, m, q);
  const double reneging = p.alpha * m.positive / m.z;
  const double taxi_net = p.price_p - p.cost_ct * pm.ew_t;

  WelfareDecomposition out;
  out.s1 = pm.lambda_p_eff * p.reward_r - p.cost_cp * pm.el_p - p.cost_ct * pm.ew_t * pm.lambda_p_eff;
  out.s2 = -reneging * taxi_net;
  out.sm = -pm.em * (pm.lambda_p_eff * p.cost_cmp + pm.lambda_t_eff * p.cost_cmt);
  out.total = out.s1 + out.s2 + out.sm;
  out.cbar = cbar(p, r.rho0);
  return out;
}

double welfare_direct(const ModelParams& p, double q) {
  const auto m = performance(p, q);
  return m.lambda_p_eff * (p.reward_r - p.price_p - p.cost_cp * m.ew_p - p.cost_cmp * m.em) +
         m.lambda_t_eff * (p.price_p - p.cost_ct * m.ew_t - p.cost_cmt * m.em);
}

double welfare_gain(const ModelParams& p, double q) {
  const auto r = checked(p, q);
  if (q == 0.0) return 0.0;
  const auto s = split(p, q, r.rho1);
  return detail::welfare_shift(p, s.base, s.delta);
}

DerivativeTerms welfare_derivative(const ModelParams& p, double q) {
  const auto r = checked(p, q);
  if (!(q > 0.0 && q < 1.0)) {
    throw Error(ErrorCode::invalid_probability, "welfare derivative needs q in (0, 1)");
  }
  const auto s = split(p, q, r.rho1);
  const auto m = s.base + s.delta;
  const double a = s.w0;
  const double rho1 = r.rho1;
  const double rho2 = r.rho2;
  const double rho0 = r.rho0;

  // d/dq of the passenger-side sums, through rho1 = q rho2.
  const double sum1 = rho1 / (1.0 - rho1);
  const double dsum1 = rho2 / ((1.0 - rho1) * (1.0 - rho1));
  const double dsum2 = rho2 * (1.0 + rho1) / std::pow(1.0 - rho1, 3);
  const double dz = a * dsum1;
  const double dadmit = p.lambda * a * (1.0 + sum1) + p.lambda * q * a * dsum1;
  const double ddispatch = p.mu2 * a * dsum1;
  const double dqueue_p = a * dsum2;
  const double dmatch = p.k2 * a * dsum1;
  const double dpositive = a * dsum1;

  const double z = m.z;
  auto ratio = [z](double num) { return num / z; };
  auto dratio = [z, dz](double num, double dnum) { return (dnum - num / z * dz) / z; };

  const double lp = ratio(m.admit), dlp = dratio(m.admit, dadmit);
  const double lt = ratio(m.dispatch), dlt = dratio(m.dispatch, ddispatch);
  const double dqp = dratio(m.queue_p, dqueue_p);
  const double qt = ratio(m.queue_t), dqt = dratio(m.queue_t, 0.0);
  const double em = ratio(m.match), dem = dratio(m.match, dmatch);
  const double pos = ratio(m.positive), dpos = dratio(m.positive, dpositive);
  const double wt = qt / lt;
  const double dwt = (dqt * lt - qt * dlt) / (lt * lt);

  DerivativeTerms out;
  out.s1_prime = p.reward_r * dlp - p.cost_cp * dqp - p.cost_ct * (dwt * lp + wt * dlp);
  out.s2_prime = -p.alpha * dpos * (p.price_p - p.cost_ct * wt) + p.alpha * pos * p.cost_ct * dwt;
  out.sm_prime = -dem * (lp * p.cost_cmp + lt * p.cost_cmt) - em * (dlp * p.cost_cmp + dlt * p.cost_cmt);

  // Constants of the closed-form sign argument.
  const double n = p.capacity_n;
  const double r0n = std::pow(rho0, n);
  const double r0n1 = rho0 * r0n;
  const double den = 1.0 - rho1 - r0n1 + r0n * rho1;
  const double lam = p.lambda, mu1 = p.mu1, mu2 = p.mu2;
  out.d1 = p.alpha * r0n * (1.0 - rho0) * rho2 * (den + (1.0 - rho0) * (1.0 - r0n));
  out.d2 = p.alpha * r0n * (r0n1 - rho0 + n - n * rho0);
  out.d3 = lam * (1.0 - r0n) * rho2 * (1.0 - rho1) * (1.0 - rho1) * (1.0 - r0n1) +
           mu2 * r0n * r0n * (1.0 - rho0) * (1.0 - rho0) * rho2 * rho1 * rho1;
  out.d4 = lam * (1.0 - r0n) * (1.0 - rho1) + mu2 * r0n * (1.0 - rho0) * rho1;
  out.a1 = 2.0 * p.k1 * mu1 * lam * rho2 * (1.0 - rho0) * (1.0 - r0n) * (1.0 - r0n1) * (r0n1 + r0n) * (1.0 - rho1);
  out.a2 = p.k1 * mu1 * r0n * rho2 * (1.0 - rho0) * (1.0 - rho0) * (1.0 - r0n1);
  out.a3 = p.k2 * mu1 * rho2 * (1.0 - rho0) * r0n * (1.0 - r0n);
  out.a4 = 2.0 * p.k2 * rho1 * rho2 * (1.0 - rho0) * (1.0 - rho0) * std::pow(rho0, 2.0 * n - 1.0) * (1.0 - r0n1);
  out.b1 = rho1 * (r0n1 + r0n) + (1.0 - r0n1) * (1.0 - rho1);

  const double x = p.reward_r * (mu2 * (1.0 - r0n1) - lam * (1.0 - r0n)) / (1.0 - rho0) + cbar(p, rho0);
  const double cp = p.cost_cp;
  out.quad_a = x + cp * (1.0 - r0n) / (1.0 - rho0);
  out.quad_b = -2.0 * x;
  out.discriminant = 4.0 * cp * r0n * x + 4.0 * cp * cp * (1.0 - r0n) * (1.0 - r0n1) / ((1.0 - rho0) * (1.0 - rho0));
  out.qbar = (-out.quad_b + std::sqrt(out.discriminant)) / (2.0 * out.quad_a);
  const double bound_root = 2.0 * cp * (1.0 - r0n) / (1.0 - rho0);
  out.discriminant_margin = 4.0 * cp * r0n * out.quad_a;
  out.qbar_margin = 2.0 * cp * r0n / (std::sqrt(out.discriminant) + bound_root);
  return out;
}

namespace closed_form {

double pi_minus_n(const ModelParams& p, double q) {
  const auto r = checked(p, q);
  const double n = p.capacity_n;
  return (1.0 - r.rho0) * (1.0 - r.rho1) /
         (1.0 - r.rho1 - std::pow(r.rho0, n + 1) + std::pow(r.rho0, n) * r.rho1);
}

double lambda_p_eff(const ModelParams& p, double q) {
  const auto r = checked(p, q);
  const double r0n = std::pow(r.rho0, p.capacity_n);
  return p.lambda * pi_minus_n(p, q) * ((1.0 - r0n) / (1.0 - r.rho0) + q * r0n / (1.0 - r.rho1));
}

double lambda_t_eff(const ModelParams& p, double q) {
  const auto r = checked(p, q);
  const double r0n = std::pow(r.rho0, p.capacity_n);
  return pi_minus_n(p, q) * (p.lambda * (1.0 - r0n) / (1.0 - r.rho0) + p.mu2 * r.rho1 * r0n / (1.0 - r.rho1));
}

double el_p(const ModelParams& p, double q) {
  const auto r = checked(p, q);
  return pi_minus_n(p, q) * std::pow(r.rho0, p.capacity_n) * r.rho1 / ((1.0 - r.rho1) * (1.0 - r.rho1));
}

double el_t(const ModelParams& p, double q) {
  const auto r = checked(p, q);
  const double n = p.capacity_n;
  return pi_minus_n(p, q) * (std::pow(r.rho0, n + 1) - r.rho0 + n - n * r.rho0) /
         ((1.0 - r.rho0) * (1.0 - r.rho0));
}

double em(const ModelParams& p, double q) {
  const auto r = checked(p, q);
  const double n = p.capacity_n;
  const double taxi_part = p.k1 * p.lambda * (1.0 - std::pow(r.rho0, -n - 1)) / (p.lambda - p.mu1);
  const double passenger_part = p.k2 * p.lambda * q / ((p.alpha + p.mu2) - p.lambda * q);
  return pi_minus_n(p, q) * std::pow(r.rho0, n) * (taxi_part + passenger_part);
}

double reneging_flow(const ModelParams& p, double q) {
  const auto r = checked(p, q);
  return p.alpha * std::pow(r.rho0, p.capacity_n) * r.rho1 / (1.0 - r.rho1) * pi_minus_n(p, q);
}

double l_po(const ModelParams& p) {
  const auto r = checked(p, 0.0);
  return p.cost_cp / (p.alpha + p.mu2) + p.cost_cmp * p.k1 * p.mu1 * (1.0 - r.rho0) / (p.mu1 - p.lambda);
}

double v_po(const ModelParams& p) {
  const auto r = checked(p, 1.0);
  const double n = p.capacity_n;
  const double r0n = std::pow(r.rho0, n);
  const double r0n1 = r0n * r.rho0;
  const double am = p.alpha + p.mu2;
  const double den = am * (1.0 - r0n1) - p.lambda * (1.0 - r0n);
  return p.cost_cp / (am - p.lambda) +
         p.cost_cmp * p.k1 * p.mu1 * (1.0 - r0n1) * (1.0 - r.rho0) * (am - p.lambda) / ((p.mu1 - p.lambda) * den) +
         p.cost_cmp * p.k2 * p.lambda * r0n * (1.0 - r.rho0) / den;
}

}  // namespace closed_form

}  // namespace taxiq::partial_obs
