#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "support.hpp"
#include "taxiq/observable.hpp"
#include "taxiq/partial_obs.hpp"

using namespace taxiq;
using taxiq::testing::fig8a;
using taxiq::testing::random_params;

namespace {

ModelParams fig7a(double mu2) {
  ModelParams p;
  p.lambda = 1;
  p.mu1 = 2;
  p.mu2 = mu2;
  p.alpha = 2;
  p.capacity_n = 20;
  p.k1 = 1;
  p.k2 = 5;
  p.reward_r = 15;
  p.price_p = 6;
  p.cost_cp = 3;
  p.cost_ct = 3;
  p.cost_cmp = 1;
  p.cost_cmt = 3;
  return p;
}

// First n with a negative net benefit, written out independently of the library.
int first_negative(const ModelParams& p) {
  for (int n = 0;; ++n) {
    const double u = p.reward_r - p.price_p - p.cost_cp * (n + 1) / p.mu2 - p.cost_cmp * p.k2;
    if (u < 0) return n;
  }
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

}  // namespace

TEST_CASE("utility") {
  auto p = fig7a(6);
  CHECK(observable::utility(p, 7) == 0.0);
  for (int n = 0; n < 40; ++n) {
    CHECK(observable::utility(p, n) - observable::utility(p, n + 1) == Catch::Approx(p.cost_cp / p.mu2).epsilon(1e-14));
  }
  p.cost_cp = 0;
  p.cost_cmp = 0;
  for (int n : {0, 3, 100}) CHECK(observable::utility(p, n) == p.reward_r - p.price_p);
  CHECK_THROWS_AS(observable::utility(p, -1), Error);
}

TEST_CASE("equilibrium threshold") {
  auto p = fig7a(6);
  CHECK(observable::equilibrium_threshold(p) == 8);
  CHECK(first_negative(p) == 8);

  SECTION("zero net reward") {
    p.cost_cmp = (p.reward_r - p.price_p) / p.k2;
    CHECK(observable::equilibrium_threshold(p) == 0);
  }
  SECTION("exact integer quotients") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 300; ++i) {
      auto q = p;
      q.reward_r = q.price_p + std::uniform_int_distribution<int>(6, 40)(rng);
      q.k2 = 5;
      q.cost_cmp = std::ldexp(1.0, -std::uniform_int_distribution<int>(0, 3)(rng));
      q.cost_cp = std::ldexp(1.0, -std::uniform_int_distribution<int>(5, 7)(rng));
      q.mu2 = std::uniform_int_distribution<int>(3, 24)(rng) * 0.25;
      const double x = (q.reward_r - q.price_p - q.cost_cmp * q.k2) * q.mu2 / q.cost_cp;
      REQUIRE(x == std::floor(x));
      const int m = static_cast<int>(x);
      CHECK(observable::equilibrium_threshold(q) == m);
      CHECK(first_negative(q) == m);
      if (m >= 1) CHECK(observable::utility(q, m - 1) == 0.0);
    }
  }
  SECTION("nondecreasing in mu2") {
    int last = -1;
    for (int i = 0; i <= 60; ++i) {
      const int n = observable::equilibrium_threshold(fig7a(3 + 0.1 * i));
      CHECK(n >= last);
      last = n;
    }
  }
  SECTION("random draws against the scan") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
      const auto q = random_params(rng, {Regime::observable});
      CHECK(observable::equilibrium_threshold(q) == first_negative(q));
    }
  }
}

TEST_CASE("stationary distribution") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_params(rng, {Regime::observable});
    for (int ns : {1, 2, 7, 40}) {
      const auto s = observable::stationary(p, ns);
      CHECK(s.probabilities.size() == static_cast<std::size_t>(p.capacity_n + ns + 1));
      CHECK(std::abs(s.total_mass() - 1.0) < 1e-12);
      const auto rho = intensities(p);
      // Geometric shape within each segment.
      CHECK(s.probability(-p.capacity_n + 1) == Catch::Approx(s.pi_minus_n * rho.rho0).epsilon(1e-12));
      CHECK(s.probability(1) == Catch::Approx(s.probability(0) * rho.rho2).epsilon(1e-12));
      CHECK(s.probability(ns + 1) == 0.0);
    }
  }

  SECTION("linear-solver oracle") {
    const auto p = fig8a(3);
    const auto s = observable::stationary(p, 5);
    const auto pi = taxiq::testing::balance_solution(p, Policy::observable(5), 5);
    REQUIRE(pi.size() == s.probabilities.size());
    for (std::size_t i = 0; i < pi.size(); ++i) CHECK(std::abs(pi[i] - s.probabilities[i]) < 1e-10);
  }
  SECTION("threshold below one") { CHECK_THROWS_AS(observable::stationary(fig8a(3), 0), Error); }
}

TEST_CASE("performance measures") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_params(rng, {Regime::observable});
    const int ns = std::uniform_int_distribution<int>(1, 30)(rng);
    const auto s = observable::stationary(p, ns);
    const auto m = observable::performance(p, ns);

    double admit = 0, admit_queue = 0, queue_p = 0, queue_t = 0, positive = 0;
    for (int n = -p.capacity_n; n <= ns; ++n) {
      const double pi = s.probability(n);
      if (n < ns) admit += p.lambda * pi;
      if (n >= 0 && n < ns) admit_queue += p.lambda * pi;
      if (n > 0) queue_p += n * pi, positive += pi;
      if (n < 0) queue_t += -n * pi;
    }
    CHECK(rel(m.lambda_p_eff, admit) < 1e-12);
    CHECK(rel(m.el_p, queue_p) < 1e-12);
    CHECK(rel(m.el_t, queue_t) < 1e-12);
    CHECK(rel(m.em, p.k1 * (1 - positive) + p.k2 * positive) < 1e-12);
    CHECK(m.em >= p.k1);
    CHECK(m.em <= p.k2);
    // Passengers entering the queue leave by service or reneging.
    CHECK(rel(admit_queue, (p.alpha + p.mu2) * positive) < 1e-12);
    CHECK(m.lambda_p_eff <= p.lambda * (1 + 1e-14));
    CHECK(m.ew_p * m.lambda_p_eff == Catch::Approx(m.el_p).epsilon(1e-14));
  }
}

TEST_CASE("large thresholds approach the partially observable chain at q = 1") {
  std::mt19937_64 rng(13);
  for (int i = 0; i < 20; ++i) {
    const auto p = random_params(rng, {Regime::partial});
    const auto a = observable::performance(p, 400);
    const auto b = partial_obs::performance(p, 1.0);
    CHECK(rel(a.lambda_p_eff, b.lambda_p_eff) < 1e-8);
    CHECK(rel(a.lambda_t_eff, b.lambda_t_eff) < 1e-8);
    CHECK(rel(a.el_p, b.el_p) < 1e-8);
    CHECK(rel(a.el_t, b.el_t) < 1e-8);
    CHECK(rel(a.em, b.em) < 1e-8);
  }
}

TEST_CASE("welfare") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 100; ++i) {
    const auto p = random_params(rng, {Regime::observable});
    const int ns = std::uniform_int_distribution<int>(1, 40)(rng);
    const double s = observable::welfare(p, ns);
    CHECK(rel(s, observable::welfare_by_waits(p, ns)) < 1e-12);
    const double diff = observable::welfare(p, ns + 1) - s;
    CHECK(std::abs(observable::welfare_step(p, ns) - diff) < 1e-10 * std::max(1.0, std::abs(s)));
  }

  SECTION("profile matches pointwise evaluation") {
    const auto p = fig8a(3);
    const auto prof = observable::welfare_profile(p, 30);
    REQUIRE(prof.welfare.size() == 30);
    for (int n = 1; n <= 30; ++n) {
      CHECK(rel(prof.welfare[n - 1], observable::welfare(p, n)) < 1e-12);
      CHECK(rel(prof.step[n - 1], observable::welfare_step(p, n)) < 1e-12);
    }
  }
  SECTION("unique maximizer for the fig 8a set at lambda = 3") {
    // Totals flatten below roundoff for large n, so the shape is read from
    // the steps S(n + 1) - S(n): positive up to the maximizer, negative after.
    const auto p = fig8a(3);
    std::vector<double> step;
    for (int n = 1; n < 30; ++n) step.push_back(observable::welfare_step(p, n));
    const auto first_down = std::find_if(step.begin(), step.end(), [](double d) { return d < 0; });
    REQUIRE(first_down != step.end());
    CHECK(std::all_of(step.begin(), first_down, [](double d) { return d > 0; }));
    CHECK(std::all_of(first_down, step.end(), [](double d) { return d < 0; }));
  }
}

TEST_CASE("threshold inequality terms") {
  std::mt19937_64 rng(19);
  for (int i = 0; i < 100; ++i) {
    const auto p = random_params(rng, {Regime::observable});
    const auto t = observable::threshold_terms(p);
    // E2 carries the factor (1 - rho0).
    if (t.rho0 < 1) CHECK(t.e2 > 0);
    if (t.rho0 > 1) CHECK(t.e2 < 0);
    if (t.rho0 < 1 && t.rho2 < 1) CHECK(t.a5 > 0);
    CHECK(t.a5 == Catch::Approx(1 - t.rho2 - std::pow(t.rho0, t.capacity + 1) + std::pow(t.rho0, t.capacity) * t.rho2)
                      .margin(1e-12));
  }
}

TEST_CASE("monotonicity classes") {
  auto p = fig8a(3);
  auto set_rho = [&p](double r0, double r2) {
    p.lambda = 2;
    p.mu1 = p.lambda / r0;
    p.mu2 = p.mu1 + 1;
    p.alpha = p.lambda / r2 - p.mu2;
  };
  set_rho(0.8, 0.3);
  CHECK(observable::g_monotonicity_class(p) == observable::GMonotonicity::decreasing);
  set_rho(1.5, 0.4);
  CHECK(observable::g_monotonicity_class(p) == observable::GMonotonicity::increasing);
  p = fig8a(3);
  p.lambda = 9;
  p.mu1 = 3;
  p.mu2 = 4;
  p.alpha = 1;  // rho0 = 3, rho2 = 1.8
  CHECK(observable::g_monotonicity_class(p) == observable::GMonotonicity::decreasing_high);
  CHECK(observable::to_string(observable::GMonotonicity::decreasing_high) == "decreasing_high");
}

TEST_CASE("inequality route returns a bracketed root when one is promised") {
  std::mt19937_64 rng(23);
  int solved = 0;
  for (int i = 0; i < 100; ++i) {
    const auto p = random_params(rng, {Regime::observable});
    const auto kind = observable::threshold_root_existence(p);
    const auto n = observable::solve_threshold_equation(p, 500);
    if (kind == observable::ThresholdRoot::none) {
      CHECK_FALSE(n.has_value());
      continue;
    }
    if (!n) continue;
    ++solved;
    const auto t = observable::threshold_terms(p);
    const double lo = std::min(t.g(*n), t.g(*n + 1)), hi = std::max(t.g(*n), t.g(*n + 1));
    CHECK(t.m1 >= lo);
    CHECK(t.m1 <= hi);
  }
  CHECK(solved > 0);
}
