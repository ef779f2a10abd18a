#include "support.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>

namespace taxiq::testing {

std::vector<double> balance_solution(const ModelParams& p, const Policy& policy, int upper) {
  const int lower = -p.capacity_n;
  const int size = upper - lower + 1;
  std::vector<Eigen::Triplet<double>> entries;
  // Row i of A is the balance equation of state i: sum_j pi_j Q(j, i) = 0.
  for (int s = lower; s <= upper; ++s) {
    const int j = s - lower;
    double out = 0.0;
    for (const auto& t : transition_rates(p, s, policy)) {
      if (t.target > upper) continue;
      out += t.rate;
      if (t.target - lower != size - 1) entries.emplace_back(t.target - lower, j, t.rate);
    }
    if (j != size - 1) entries.emplace_back(j, j, -out);
  }
  // The last balance equation is redundant; use normalization instead.
  for (int j = 0; j < size; ++j) entries.emplace_back(size - 1, j, 1.0);

  Eigen::SparseMatrix<double> a(size, size);
  a.setFromTriplets(entries.begin(), entries.end());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(size);
  b(size - 1) = 1.0;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  const Eigen::VectorXd x = lu.solve(b);
  return {x.data(), x.data() + size};
}

int truncation_point(double rho1, double mass) {
  if (rho1 <= 0.0) return 0;
  // rho1^(n+1) / (1 - rho1) < mass
  const double n = std::log(mass * (1.0 - rho1)) / std::log(rho1);
  return std::max(1, static_cast<int>(std::ceil(n)));
}

ModelParams random_params(std::mt19937_64& rng, const DrawOptions& o) {
  auto u = [&rng](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto i = [&rng](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };
  for (;;) {
    ModelParams p;
    p.lambda = u(0.5, 8.0);
    p.mu1 = u(1.0, 8.0);
    p.mu2 = p.mu1 + u(0.1, 5.0);
    p.alpha = u(0.2, 5.0);
    p.capacity_n = i(1, 40);
    p.k1 = i(1, 5);
    p.k2 = p.k1 + i(1, 5);
    p.price_p = u(1.0, 10.0);
    p.reward_r = p.price_p + u(0.5, 20.0);
    p.cost_cp = u(0.2, 6.0);
    p.cost_ct = u(0.2, 6.0);
    p.cost_cmp = u(0.2, 6.0);
    p.cost_cmt = u(0.2, 6.0);
    const auto rho = intensities(p);
    if (std::abs(rho.rho0 - 1.0) < 0.05 || std::abs(rho.rho2 - 1.0) < 0.05) continue;
    if (o.rho0_below_one && rho.rho0 >= 1.0) continue;
    if (o.rho0_above_one && rho.rho0 <= 1.0) continue;
    try {
      validate(p, o.regime);
    } catch (const Error&) {
      continue;
    }
    return p;
  }
}

namespace {

ModelParams fig6_base() {
  ModelParams p;
  p.reward_r = 20;
  p.price_p = 6;
  p.cost_cp = 4;
  p.cost_ct = 3;
  p.alpha = 4;
  p.cost_cmp = 3;
  p.cost_cmt = 3;
  p.mu1 = 4;
  p.capacity_n = 30;
  p.k1 = 3;
  p.k2 = 5;
  return p;
}

}  // namespace

ModelParams fig5a(double lambda, double mu2) {
  ModelParams p;
  p.lambda = lambda;
  p.mu1 = 4;
  p.mu2 = mu2;
  p.alpha = 2;
  p.capacity_n = 20;
  p.k1 = 3;
  p.k2 = 5;
  p.reward_r = 16;
  p.price_p = 6;
  p.cost_cp = 4;
  p.cost_ct = 3;
  p.cost_cmp = 3;
  p.cost_cmt = 3;
  return p;
}

ModelParams fig6a(double lambda, double mu2) {
  auto p = fig6_base();
  p.lambda = lambda;
  p.mu2 = mu2;
  return p;
}

ModelParams fig8a(double lambda) {
  auto p = fig6_base();
  p.lambda = lambda;
  p.mu2 = 4.5;
  return p;
}

}  // namespace taxiq::testing
