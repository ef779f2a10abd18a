#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "support.hpp"
#include "taxiq/observable.hpp"
#include "taxiq/partial_obs.hpp"
#include "taxiq/strategy.hpp"

using namespace taxiq;
using strategy::EquilibriumRegime;
using taxiq::testing::fig5a;
using taxiq::testing::fig6a;
using taxiq::testing::fig8a;
using taxiq::testing::random_params;

TEST_CASE("equilibrium regimes") {
  SECTION("balk") {
    auto p = fig5a(3, 5.5);
    p.cost_cp *= 1000;
    const auto e = strategy::equilibrium_q(p);
    CHECK(e.regime == EquilibriumRegime::balk);
    CHECK(e.q_e == 0.0);
    CHECK(p.reward_r - p.price_p < e.l_po);
  }
  SECTION("join") {
    auto p = fig5a(3, 5.5);
    p.reward_r = 1e4;
    const auto e = strategy::equilibrium_q(p);
    CHECK(e.regime == EquilibriumRegime::join);
    CHECK(e.q_e == 1.0);
  }
  SECTION("mixed, fig 5a at lambda = 6") {
    const auto p = fig5a(6, 5.5);
    const auto e = strategy::equilibrium_q(p);
    REQUIRE(e.regime == EquilibriumRegime::mixed);
    CHECK(std::abs(partial_obs::utility(p, e.q_e)) < 1e-10);
    CHECK(partial_obs::utility(p, e.q_e - 1e-6) > 0);
    CHECK(partial_obs::utility(p, e.q_e + 1e-6) < 0);

    // Sign change on a 1e-6 grid.
    const int steps = 1000000;
    double crossing = -1;
    double prev = partial_obs::utility(p, 0.0);
    for (int i = 1; i <= steps; ++i) {
      const double q = static_cast<double>(i) / steps;
      const double u = partial_obs::utility(p, q);
      if (prev >= 0 && u < 0) {
        crossing = q;
        break;
      }
      prev = u;
    }
    REQUIRE(crossing > 0);
    CHECK(std::abs(crossing - e.q_e) <= 1e-6);
  }
  SECTION("regime boundaries") {
    auto p = fig5a(6, 5.5);
    const auto base = strategy::equilibrium_q(p);
    p.reward_r = p.price_p + base.l_po;
    auto e = strategy::equilibrium_q(p);
    CHECK(e.regime == EquilibriumRegime::mixed);
    CHECK(e.q_e <= 1e-6);
    p.reward_r = p.price_p + base.v_po;
    e = strategy::equilibrium_q(p);
    CHECK(e.regime == EquilibriumRegime::mixed);
    CHECK(e.q_e >= 1 - 1e-6);
  }
  SECTION("bounds are ordered") {
    std::mt19937_64 rng(29);
    for (int i = 0; i < 200; ++i) {
      const auto p = random_params(rng);
      const auto e = strategy::equilibrium_q(p);
      CHECK(e.l_po <= e.v_po);
      const double rp = p.reward_r - p.price_p;
      if (rp < e.l_po) CHECK(e.regime == EquilibriumRegime::balk);
      if (rp > e.v_po) CHECK(e.regime == EquilibriumRegime::join);
      if (e.regime == EquilibriumRegime::mixed) CHECK(std::abs(partial_obs::utility(p, e.q_e)) < 1e-10);
    }
  }
}

TEST_CASE("social optimum over q") {
  SECTION("fig 6a at lambda = 5.3 against a dense grid") {
    const auto p = fig6a(5.3, 4.5);
    const auto s = strategy::social_q(p);
    const int steps = 100000;
    double best = -INFINITY, arg = 0;
    for (int i = 0; i <= steps; ++i) {
      const double q = static_cast<double>(i) / steps;
      const double w = partial_obs::welfare_gain(p, q);
      if (w > best) best = w, arg = q;
    }
    CHECK(std::abs(s.q_star - arg) <= 1e-5);
    CHECK(s.gain_at_opt >= best - 1e-12 * std::max(1.0, std::abs(best)));
    CHECK(s.welfare_at_opt == Catch::Approx(partial_obs::welfare_direct(p, s.q_star)).epsilon(1e-10));
  }
  SECTION("no neighbour improves") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 40; ++i) {
      const auto p = random_params(rng);
      const auto s = strategy::social_q(p);
      const double at = partial_obs::welfare_gain(p, s.q_star);
      for (double d : {-1e-4, 1e-4}) {
        const double q = s.q_star + d;
        if (q < 0 || q > 1) continue;
        CHECK(partial_obs::welfare_gain(p, q) <= at + 1e-10 * std::max(1.0, std::abs(at)));
      }
      CHECK(s.boundary == (s.q_star == 0.0 || s.q_star == 1.0));
    }
  }
  SECTION("decreasing welfare puts the optimum at zero") {
    auto p = fig6a(5.3, 4.5);
    p.cost_cp *= 1000;
    const auto s = strategy::social_q(p);
    CHECK(s.q_star == 0.0);
    CHECK(s.boundary);
  }
}

TEST_CASE("social optimum over thresholds") {
  SECTION("defining inequalities on random draws") {
    std::mt19937_64 rng(37);
    for (int i = 0; i < 40; ++i) {
      const auto p = random_params(rng, {Regime::observable});
      const auto s = strategy::social_n(p);
      REQUIRE_FALSE(s.boundary);
      CHECK(observable::welfare_step(p, s.n_star) <= 0);
      if (s.n_star > 1) CHECK(observable::welfare_step(p, s.n_star - 1) > 0);
      CHECK(s.n_e == observable::equilibrium_threshold(p));
    }
  }
  SECTION("welfare falling from the first threshold") {
    auto p = fig8a(3);
    p.cost_cp *= 1000;
    const auto s = strategy::social_n(p);
    CHECK(s.n_star == 1);
    CHECK_FALSE(s.boundary);
  }
  SECTION("fig 8a at lambda = 3 agrees with the scan") {
    const auto p = fig8a(3);
    const auto s = strategy::social_n(p);
    int arg = 1;
    for (int n = 1; n < 60; ++n) {
      if (observable::welfare_step(p, n) > 0) arg = n + 1;
      else break;
    }
    CHECK(s.n_star == arg);
    CHECK(s.welfare_at_opt == Catch::Approx(observable::welfare(p, arg)).epsilon(1e-12));
  }
}

TEST_CASE("welfare comparison") {
  const auto p = fig6a(3, 4.5);
  const std::vector<double> grid{3.0, p.mu1, 2.0, 5.3};
  const auto rows = strategy::compare_welfare(p, strategy::SweepAxis::lambda, grid);
  REQUIRE(rows.size() == grid.size());
  for (std::size_t i = 0; i < rows.size(); ++i) CHECK(rows[i].x == grid[i]);

  CHECK(rows[1].error.find("rho0") != std::string::npos);
  CHECK_FALSE(rows[1].welfare_partial.has_value());

  for (std::size_t i : {0u, 2u, 3u}) {
    auto q = p;
    q.lambda = grid[i];
    REQUIRE(rows[i].error.empty());
    CHECK(*rows[i].welfare_partial == strategy::social_q(q).welfare_at_opt);
    CHECK(*rows[i].welfare_observable == strategy::social_n(q).welfare_at_opt);
    CHECK(*rows[i].n_star == strategy::social_n(q).n_star);
  }

  CHECK(strategy::parse_axis("alpha") == strategy::SweepAxis::alpha);
  CHECK_THROWS_AS(strategy::parse_axis("beta"), Error);
}
