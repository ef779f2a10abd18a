#include "taxiq/sim.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <random>

#include "taxiq/detail/parallel.hpp"

namespace taxiq::sim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}

  // [0, 1) with 53 random bits
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

 private:
  std::mt19937_64 engine_;
};

struct StateRates {
  double up = 0.0;
  double down = 0.0;
};

// Rates per state, filled lazily from the generator.
class RateTable {
 public:
  RateTable(const ModelParams& p, const Policy& policy) : p_(p), policy_(policy), lower_(-p.capacity_n) {}

  const StateRates& at(int n) {
    const auto idx = static_cast<std::size_t>(n - lower_);
    while (table_.size() <= idx) {
      const int s = lower_ + static_cast<int>(table_.size());
      StateRates r;
      for (const auto& t : transition_rates(p_, s, policy_)) (t.target > s ? r.up : r.down) += t.rate;
      table_.push_back(r);
    }
    return table_[idx];
  }

 private:
  const ModelParams& p_;
  const Policy& policy_;
  int lower_;
  std::vector<StateRates> table_;
};

struct Replication {
  double time = 0.0;
  double admissions = 0.0;
  double admissions_queue = 0.0;  // admissions into n >= 0
  double dispatches = 0.0;
  double reneges = 0.0;
  double area_p = 0.0;
  double area_t = 0.0;
  double area_k = 0.0;
  double admission_k = 0.0;
  std::vector<double> state_time;  // by n - lower
  std::vector<std::uint64_t> up;
  std::vector<std::uint64_t> down;
};

Replication run_one(const ModelParams& p, const Policy& policy, const SimConfig& c, std::uint64_t seed) {
  Stream rng(seed);
  RateTable rates(p, policy);
  const int lower = -p.capacity_n;
  const double serve_share = p.mu2 / (p.alpha + p.mu2);
  Replication r;
  int n = 0;
  for (std::uint64_t e = 0; e < c.horizon_events; ++e) {
    const auto& sr = rates.at(n);
    const double total = sr.up + sr.down;
    const double dt = rng.exponential(total);
    const bool up = rng.uniform() * total < sr.up;
    const bool served = !up && (n <= 0 || rng.uniform() < serve_share);
    const bool record = e >= c.warmup_events;
    if (record) {
      const auto idx = static_cast<std::size_t>(n - lower);
      if (r.state_time.size() <= idx) {
        r.state_time.resize(idx + 1, 0.0);
        r.up.resize(idx + 1, 0);
        r.down.resize(idx + 1, 0);
      }
      r.time += dt;
      r.state_time[idx] += dt;
      r.area_p += dt * std::max(n, 0);
      r.area_t += dt * std::max(-n, 0);
      r.area_k += dt * (n <= 0 ? p.k1 : p.k2);
      if (up) {
        ++r.up[idx];
        r.admissions += 1.0;
        if (n >= 0) r.admissions_queue += 1.0;
        r.admission_k += n + 1 <= 0 ? p.k1 : p.k2;
      } else {
        ++r.down[idx];
        (served ? r.dispatches : r.reneges) += 1.0;
      }
    }
    n += up ? 1 : -1;
  }
  return r;
}

std::map<std::string, double> measures_of(const ModelParams& p, const Replication& r) {
  std::map<std::string, double> m;
  const double t = r.time;
  const double lp = r.admissions / t;
  const double lt = r.dispatches / t;
  const double el_p = r.area_p / t;
  const double el_t = r.area_t / t;
  const double em = r.area_k / t;
  m["lambda_p_eff"] = lp;
  m["lambda_t_eff"] = lt;
  m["el_p"] = el_p;
  m["el_t"] = el_t;
  m["ew_p"] = lp > 0.0 ? el_p / lp : 0.0;
  m["ew_t"] = lt > 0.0 ? el_t / lt : 0.0;
  m["em"] = em;
  m["welfare"] = (p.reward_r - p.price_p) * lp + p.price_p * lt - p.cost_cp * el_p - p.cost_ct * el_t -
                 em * (p.cost_cmp * lp + p.cost_cmt * lt);
  m["conditional_wait"] = r.admissions_queue > 0.0 ? el_p / (r.admissions_queue / t) : 0.0;
  m["matching_time_at_admission"] = r.admissions > 0.0 ? r.admission_k / r.admissions : 0.0;
  m["renege_rate"] = r.reneges / t;
  return m;
}

}  // namespace

void check(const SimConfig& c) {
  if (c.replications < 1) throw Error(ErrorCode::invalid_config, "replications must be at least 1");
  if (!(c.horizon_events > c.warmup_events)) {
    throw Error(ErrorCode::invalid_config, "horizon_events must exceed warmup_events");
  }
}

SimEstimate summarize(const std::vector<double>& v) {
  SimEstimate out;
  out.replications = static_cast<int>(v.size());
  if (v.empty()) return out;
  double sum = 0.0;
  for (double x : v) sum += x;
  out.mean = sum / v.size();
  if (v.size() < 2) return out;
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  const double sd = std::sqrt(ss / (v.size() - 1));
  const boost::math::students_t dist(static_cast<double>(v.size() - 1));
  out.half_width_95 = boost::math::quantile(dist, 0.975) * sd / std::sqrt(static_cast<double>(v.size()));
  return out;
}

double StateFrequencies::at(int n) const noexcept {
  if (n < lower_bound || n >= lower_bound + static_cast<int>(fraction.size())) return 0.0;
  return fraction[static_cast<std::size_t>(n - lower_bound)];
}

const std::vector<std::string>& measure_names() {
  static const std::vector<std::string> names = {
      "lambda_p_eff", "lambda_t_eff", "el_p",    "el_t", "ew_p", "ew_t", "em", "welfare", "conditional_wait",
      "matching_time_at_admission", "renege_rate"};
  return names;
}

SimResult simulate(const ModelParams& p, const Policy& policy, const SimConfig& c) {
  check(c);
  if (policy.regime() == Regime::partial) {
    validate(p, Regime::partial);
    const double q = policy.joining_probability();
    if (!(q >= 0.0 && q <= 1.0)) throw Error(ErrorCode::invalid_probability, "q must lie in [0, 1]");
  } else {
    validate(p, Regime::observable);
    if (policy.threshold() < 1) throw Error(ErrorCode::invalid_threshold, "threshold must be at least 1");
  }

  const auto reps = static_cast<std::size_t>(c.replications);
  std::vector<Replication> runs(reps);
  detail::parallel_for(reps, [&](std::size_t i) {
    runs[i] = run_one(p, policy, c, splitmix64(c.seed ^ splitmix64(i + 1)));
  });

  SimResult out;
  std::map<std::string, std::vector<double>> per_rep;
  std::size_t width = 0;
  double total_time = 0.0;
  for (const auto& r : runs) {
    for (const auto& [k, v] : measures_of(p, r)) per_rep[k].push_back(v);
    width = std::max(width, r.state_time.size());
    total_time += r.time;
  }
  for (const auto& name : measure_names()) out.measures[name] = summarize(per_rep[name]);

  const int lower = -p.capacity_n;
  out.frequencies.lower_bound = lower;
  out.frequencies.fraction.assign(width, 0.0);
  out.jumps.resize(width);
  for (std::size_t i = 0; i < width; ++i) out.jumps[i].state = lower + static_cast<int>(i);
  for (const auto& r : runs) {
    for (std::size_t i = 0; i < r.state_time.size(); ++i) {
      out.frequencies.fraction[i] += r.state_time[i];
      out.jumps[i].time += r.state_time[i];
      out.jumps[i].up += r.up[i];
      out.jumps[i].down += r.down[i];
    }
  }
  for (double& f : out.frequencies.fraction) f /= total_time;
  return out;
}

SimEstimate estimate_conditional_wait(const ModelParams& p, double q, const SimConfig& c) {
  return simulate(p, Policy::partial(q), c).measures.at("conditional_wait");
}

double total_variation(const StateFrequencies& freq, const std::function<double(int)>& pi) {
  double diff = 0.0;
  double covered = 0.0;
  for (std::size_t i = 0; i < freq.fraction.size(); ++i) {
    const double a = pi(freq.lower_bound + static_cast<int>(i));
    diff += std::abs(freq.fraction[i] - a);
    covered += a;
  }
  return 0.5 * (diff + std::max(0.0, 1.0 - covered));
}

}  // namespace taxiq::sim
