// support.hpp
//
// Shared test helpers: an independent stationary solver built from the
// generator, and random parameter draws.

#pragma once

#include <random>
#include <vector>

#include "taxiq/model.hpp"

namespace taxiq::testing {

/// Solves pi Q = 0, sum pi = 1 for the chain restricted to [-N, upper], with
/// the generator taken from transition_rates (jumps above `upper` dropped).
/// Index i holds state -N + i.
std::vector<double> balance_solution(const ModelParams& params, const Policy& policy, int upper);

/// Smallest upper state such that the geometric passenger tail beyond it
/// holds less than `mass` relative to pi(0).
int truncation_point(double rho1, double mass);

struct DrawOptions {
  Regime regime = Regime::partial;
  bool rho0_below_one = false;
  bool rho0_above_one = false;
};

/// Random valid parameter set. Draws that fail validation, or sit within 0.05
/// of rho0 = 1 or rho2 = 1, are rejected and redrawn.
ModelParams random_params(std::mt19937_64& rng, const DrawOptions& options = {});

/// Parameter sets printed with the figures.
ModelParams fig5a(double lambda, double mu2);
ModelParams fig6a(double lambda, double mu2);
ModelParams fig8a(double lambda);

}  // namespace taxiq::testing
