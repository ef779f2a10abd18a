// experiments.hpp
//
// Parameter sweeps behind the numerical figures, with the qualitative trend
// checks that go with them.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taxiq/model.hpp"

namespace taxiq::experiments {

enum class Quantity { q_e, q_star, n_e, n_star, compare };

struct FigureSpec {
  std::string id;
  std::string title;
  ModelParams params;
  // "caption" for values printed with the figure, "assumed" otherwise
  std::map<std::string, std::string> provenance;
  std::vector<std::string> required;  // fields the caller must supply
  std::string x_name;
  double x_min = 0.0;
  double x_max = 0.0;
  int points = 25;
  double x_step = 0.0;  // > 0 for integer-valued axes (fixed step, no point count)
  std::string series_name;  // empty when there is a single series
  std::vector<double> series_values;
  Quantity quantity = Quantity::q_e;
};

const std::vector<FigureSpec>& figures();
const FigureSpec& figure(const std::string& id);

/// Manifest of every figure's parameter set as JSON text.
std::string manifest_json();

struct FigureOptions {
  std::map<std::string, std::string> overrides;  // model fields by name
  std::optional<int> points;
  std::optional<double> x_min;
  std::optional<double> x_max;
};

std::vector<double> grid(const FigureSpec& spec);

struct FigureRow {
  std::optional<double> series_value;
  double x = 0.0;
  std::map<std::string, double> values;
  std::string error;
};

struct TrendCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct FigureResult {
  FigureSpec spec;  // after overrides
  std::vector<std::string> columns;
  std::vector<FigureRow> rows;  // series-major, then grid order
  std::vector<TrendCheck> trends;
};

/// Overrides are applied before the sweep; missing required fields raise a
/// usage error.
FigureResult run_figure(const std::string& id, const FigureOptions& options = {});

/// figure,series_name,series_value,x_name,x,<columns>,error
std::string to_csv(const FigureResult& result);

inline constexpr double trend_tolerance = 1e-6;
inline constexpr double crossing_margin = 1e-9;

}  // namespace taxiq::experiments
