#include "taxiq/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <sstream>

#include "taxiq/detail/parallel.hpp"
#include "taxiq/format.hpp"
#include "taxiq/observable.hpp"
#include "taxiq/strategy.hpp"

namespace taxiq::experiments {

namespace {

struct Caption {
  std::vector<std::pair<std::string, double>> given;
  std::vector<std::pair<std::string, double>> assumed;
};

FigureSpec make(std::string id, std::string title, const Caption& caption, std::string x_name, double x_min,
                double x_max, double x_step, std::string series_name, std::vector<double> series,
                Quantity quantity, std::vector<std::string> required = {}) {
  FigureSpec f;
  f.id = std::move(id);
  f.title = std::move(title);
  for (const auto& [k, v] : caption.given) {
    set_param(f.params, k, v);
    f.provenance[k] = "caption";
  }
  for (const auto& [k, v] : caption.assumed) {
    set_param(f.params, k, v);
    f.provenance[k] = "assumed";
  }
  for (const auto& r : required) f.provenance[r] = "required";
  f.required = std::move(required);
  f.x_name = std::move(x_name);
  f.provenance[f.x_name] = "axis";
  f.x_min = x_min;
  f.x_max = x_max;
  f.x_step = x_step;
  f.series_name = std::move(series_name);
  if (!f.series_name.empty()) f.provenance[f.series_name] = "series";
  f.series_values = std::move(series);
  f.quantity = quantity;
  // Axis and series fields start at the first grid/series value so the
  // parameter set is complete on its own.
  set_param(f.params, f.x_name, x_min);
  if (!f.series_name.empty()) set_param(f.params, f.series_name, f.series_values.front());
  return f;
}

std::vector<FigureSpec> build() {
  const Caption fig5a{{{"reward_r", 16}, {"price_p", 6}, {"cost_cp", 4}, {"alpha", 2}, {"cost_cmp", 3},
                       {"mu1", 4}, {"capacity_n", 20}, {"k1", 3}, {"k2", 5}},
                      {{"cost_ct", 3}, {"cost_cmt", 3}}};
  const Caption fig5b{{{"reward_r", 16}, {"price_p", 6}, {"cost_cp", 4}, {"lambda", 6}, {"mu2", 5.5},
                       {"cost_cmp", 3}, {"mu1", 4}, {"k1", 3}, {"k2", 5}},
                      {{"cost_ct", 3}, {"cost_cmt", 3}}};
  const Caption fig6a{{{"reward_r", 20}, {"price_p", 6}, {"cost_cp", 4}, {"cost_ct", 3}, {"alpha", 4},
                       {"cost_cmp", 3}, {"cost_cmt", 3}, {"mu1", 4}, {"capacity_n", 30}, {"k1", 3}, {"k2", 5}},
                      {}};
  const Caption fig6b{{{"reward_r", 20}, {"price_p", 6}, {"cost_cp", 4}, {"cost_ct", 3}, {"mu2", 4.5},
                       {"lambda", 5.3}, {"cost_cmp", 3}, {"cost_cmt", 3}, {"mu1", 4}, {"k1", 3}, {"k2", 5}},
                      {}};
  // The equilibrium threshold only involves R, P, C_P, C_MP, k2 and mu2; the
  // rest is filler that keeps the parameter set valid.
  const Caption fig7a{{{"reward_r", 15}, {"price_p", 6}, {"cost_cp", 3}, {"k2", 5}},
                      {{"lambda", 1}, {"mu1", 2}, {"alpha", 2}, {"capacity_n", 20}, {"k1", 1}, {"cost_ct", 3},
                       {"cost_cmt", 3}}};
  const Caption fig7b{{{"reward_r", 15}, {"price_p", 6}, {"cost_cp", 3}, {"mu2", 6}},
                      {{"lambda", 1}, {"mu1", 2}, {"alpha", 2}, {"capacity_n", 20}, {"k1", 1}, {"cost_ct", 3},
                       {"cost_cmt", 3}}};
  const Caption fig8a{{{"reward_r", 20}, {"price_p", 6}, {"cost_cp", 4}, {"cost_ct", 3}, {"alpha", 4},
                       {"mu2", 4.5}, {"cost_cmp", 3}, {"cost_cmt", 3}, {"mu1", 4}, {"capacity_n", 30}, {"k1", 3},
                       {"k2", 5}},
                      {}};
  Caption fig8b = fig8a;
  fig8b.given.erase(std::find_if(fig8b.given.begin(), fig8b.given.end(),
                                 [](const auto& kv) { return kv.first == "capacity_n"; }));
  fig8b.given.emplace_back("lambda", 5.3);
  const Caption fig9 = fig8a;
  // Printed with both N = 30 and N = 20; the later value is used.
  const Caption fig10{{{"reward_r", 20}, {"price_p", 6}, {"cost_cp", 4}, {"cost_ct", 3}, {"mu2", 4.5},
                       {"lambda", 5.3}, {"cost_cmp", 3}, {"cost_cmt", 3}, {"mu1", 4}, {"k1", 3}, {"k2", 5},
                       {"capacity_n", 20}},
                      {}};

  return {
      make("5a", "equilibrium joining probability vs lambda and mu2", fig5a, "lambda", 1.0, 6.4, 0.0, "mu2",
           {4.5, 5.5, 6.5}, Quantity::q_e),
      make("5b", "equilibrium joining probability vs alpha and N", fig5b, "alpha", 1.0, 8.0, 0.0, "capacity_n",
           {10, 20, 40}, Quantity::q_e),
      make("6a", "socially optimal joining probability vs lambda and mu2", fig6a, "lambda", 1.0, 7.6, 0.0, "mu2",
           {4.5, 5.5, 6.5}, Quantity::q_star),
      make("6b", "socially optimal joining probability vs alpha and N", fig6b, "alpha", 1.0, 8.0, 0.0,
           "capacity_n", {10, 20, 30, 40}, Quantity::q_star),
      make("7a", "equilibrium threshold vs mu2", fig7a, "mu2", 3.0, 9.0, 0.0, "", {}, Quantity::n_e, {"cost_cmp"}),
      make("7b", "equilibrium threshold vs k2", fig7b, "k2", 2.0, 10.0, 1.0, "", {}, Quantity::n_e, {"cost_cmp"}),
      make("8a", "socially optimal threshold vs lambda", fig8a, "lambda", 2.5, 3.9, 0.0, "", {}, Quantity::n_star),
      make("8b", "socially optimal threshold vs N", fig8b, "capacity_n", 2.0, 50.0, 2.0, "", {}, Quantity::n_star),
      make("9", "optimal welfare under both information levels vs lambda", fig9, "lambda", 0.5, 8.3, 0.0, "", {},
           Quantity::compare),
      make("10", "optimal welfare under both information levels vs alpha", fig10, "alpha", 1.0, 10.0, 0.0, "", {},
           Quantity::compare),
  };
}

std::vector<std::string> columns_for(Quantity q) {
  switch (q) {
    case Quantity::q_e: return {"q_e", "l_po", "v_po"};
    case Quantity::q_star: return {"q_star", "welfare"};
    case Quantity::n_e: return {"n_e"};
    case Quantity::n_star: return {"n_star", "welfare"};
    case Quantity::compare: return {"q_star", "welfare_partial", "n_star", "welfare_observable"};
  }
  return {};
}

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::q_e: return "q_e";
    case Quantity::q_star: return "q_star";
    case Quantity::n_e: return "n_e";
    case Quantity::n_star: return "n_star";
    case Quantity::compare: return "compare";
  }
  return "unknown";
}

void evaluate(const ModelParams& p, Quantity q, FigureRow& row) {
  auto guarded = [&row](const char* what, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      if (!row.error.empty()) row.error += "; ";
      row.error += std::string(what) + ": " + e.what();
    }
  };
  switch (q) {
    case Quantity::q_e:
      guarded("q_e", [&] {
        const auto e = strategy::equilibrium_q(p);
        row.values["q_e"] = e.q_e;
        row.values["l_po"] = e.l_po;
        row.values["v_po"] = e.v_po;
      });
      break;
    case Quantity::q_star:
      guarded("q_star", [&] {
        const auto s = strategy::social_q(p);
        row.values["q_star"] = s.q_star;
        row.values["welfare"] = s.welfare_at_opt;
      });
      break;
    case Quantity::n_e:
      guarded("n_e", [&] { row.values["n_e"] = strategy::equilibrium_n(p); });
      break;
    case Quantity::n_star:
      guarded("n_star", [&] {
        const auto s = strategy::social_n(p);
        row.values["n_star"] = s.n_star;
        row.values["welfare"] = s.welfare_at_opt;
      });
      break;
    case Quantity::compare:
      guarded("partial", [&] {
        const auto s = strategy::social_q(p);
        row.values["q_star"] = s.q_star;
        row.values["welfare_partial"] = s.welfare_at_opt;
      });
      guarded("observable", [&] {
        const auto s = strategy::social_n(p);
        row.values["n_star"] = s.n_star;
        row.values["welfare_observable"] = s.welfare_at_opt;
      });
      break;
  }
}

// Rows of one series in grid order.
std::vector<const FigureRow*> series_rows(const FigureResult& r, std::optional<double> series) {
  std::vector<const FigureRow*> out;
  for (const auto& row : r.rows) {
    if (row.series_value == series) out.push_back(&row);
  }
  return out;
}

std::string fmt(double x) { return format_number(x); }

// Along the grid within each series: sign = +1 nondecreasing, -1 nonincreasing.
TrendCheck along_axis(const FigureResult& r, const std::string& column, int sign, double tol) {
  TrendCheck t;
  t.name = column + (sign > 0 ? " nondecreasing in " : " nonincreasing in ") + r.spec.x_name;
  t.passed = true;
  std::vector<std::optional<double>> series;
  if (r.spec.series_values.empty()) series.push_back(std::nullopt);
  for (double s : r.spec.series_values) series.push_back(s);
  int violations = 0;
  for (const auto& s : series) {
    const auto rows = series_rows(r, s);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i]->values.count(column)) {
        t.passed = false;
        ++violations;
        continue;
      }
      if (i == 0 || !rows[i - 1]->values.count(column)) continue;
      const double a = rows[i - 1]->values.at(column);
      const double b = rows[i]->values.at(column);
      if (sign * (b - a) < -tol) {
        if (violations == 0) {
          t.detail = "first violation" + (s ? " at " + r.spec.series_name + "=" + fmt(*s) : std::string()) + ": " +
                     column + "(" + fmt(rows[i - 1]->x) + ")=" + fmt(a) + ", " + column + "(" + fmt(rows[i]->x) +
                     ")=" + fmt(b);
        }
        t.passed = false;
        ++violations;
      }
    }
  }
  if (violations > 0) t.detail = std::to_string(violations) + " violations; " + t.detail;
  return t;
}

// Across series at each grid point.
TrendCheck across_series(const FigureResult& r, const std::string& column, int sign, double tol) {
  TrendCheck t;
  t.name = column + (sign > 0 ? " nondecreasing in " : " nonincreasing in ") + r.spec.series_name;
  t.passed = true;
  int violations = 0;
  std::vector<std::vector<const FigureRow*>> by_series;
  for (double s : r.spec.series_values) by_series.push_back(series_rows(r, s));
  for (std::size_t k = 1; k < by_series.size(); ++k) {
    for (std::size_t i = 0; i < by_series[k].size(); ++i) {
      const auto* lo = by_series[k - 1][i];
      const auto* hi = by_series[k][i];
      if (!lo->values.count(column) || !hi->values.count(column)) {
        t.passed = false;
        ++violations;
        continue;
      }
      if (sign * (hi->values.at(column) - lo->values.at(column)) < -tol) {
        if (violations == 0) {
          t.detail = "first violation at " + r.spec.x_name + "=" + fmt(hi->x) + ": " + fmt(lo->values.at(column)) +
                     " then " + fmt(hi->values.at(column));
        }
        t.passed = false;
        ++violations;
      }
    }
  }
  if (violations > 0) t.detail = std::to_string(violations) + " violations; " + t.detail;
  return t;
}

TrendCheck crossing(const FigureResult& r) {
  TrendCheck t;
  t.name = "observable optimum above partial at low " + r.spec.x_name + ", below at high " + r.spec.x_name;
  std::optional<double> first_above;
  std::optional<double> later_below;
  for (const auto& row : r.rows) {
    if (!row.values.count("welfare_partial") || !row.values.count("welfare_observable")) continue;
    const double d = row.values.at("welfare_observable") - row.values.at("welfare_partial");
    if (!first_above && d > crossing_margin) first_above = row.x;
    if (first_above && -d > crossing_margin && !later_below) later_below = row.x;
  }
  t.passed = first_above && later_below;
  if (first_above) t.detail = "observable ahead at " + r.spec.x_name + "=" + fmt(*first_above);
  if (later_below) t.detail += ", partial ahead at " + r.spec.x_name + "=" + fmt(*later_below);
  if (!first_above) t.detail = "observable optimum never ahead";
  return t;
}

std::vector<TrendCheck> trends(const FigureResult& r) {
  const double tol = trend_tolerance;
  const auto& id = r.spec.id;
  if (id == "5a") return {along_axis(r, "q_e", -1, tol), across_series(r, "q_e", +1, tol)};
  if (id == "6a") return {along_axis(r, "q_star", -1, tol), across_series(r, "q_star", +1, tol)};
  if (id == "6b") return {along_axis(r, "q_star", +1, tol), across_series(r, "q_star", +1, tol)};
  if (id == "7a") return {along_axis(r, "n_e", +1, 0.0)};
  if (id == "7b") return {along_axis(r, "n_e", -1, 0.0)};
  if (id == "8a") return {along_axis(r, "n_star", +1, 0.0)};
  if (id == "8b") return {along_axis(r, "n_star", +1, 0.0)};
  if (id == "9") return {crossing(r)};
  if (id == "10") return {along_axis(r, "welfare_partial", +1, tol), along_axis(r, "welfare_observable", +1, tol)};
  return {};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

const std::vector<FigureSpec>& figures() {
  static const std::vector<FigureSpec> all = build();
  return all;
}

const FigureSpec& figure(const std::string& id) {
  for (const auto& f : figures()) {
    if (f.id == id) return f;
  }
  throw Error(ErrorCode::usage, "unknown figure '" + id + "'");
}

std::vector<double> grid(const FigureSpec& spec) {
  std::vector<double> xs;
  if (spec.x_step > 0.0) {
    const int count = static_cast<int>(std::floor((spec.x_max - spec.x_min) / spec.x_step + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) xs.push_back(spec.x_min + i * spec.x_step);
    return xs;
  }
  if (spec.points < 1) throw Error(ErrorCode::usage, "grid needs at least one point");
  if (spec.points == 1) return {spec.x_min};
  for (int i = 0; i < spec.points; ++i) {
    xs.push_back(i == spec.points - 1 ? spec.x_max
                                      : spec.x_min + (spec.x_max - spec.x_min) * i / (spec.points - 1));
  }
  return xs;
}

std::string manifest_json() {
  nlohmann::ordered_json root;
  root["figures"] = nlohmann::ordered_json::array();
  for (const auto& f : figures()) {
    nlohmann::ordered_json j;
    j["id"] = f.id;
    j["title"] = f.title;
    j["quantity"] = to_string(f.quantity);
    nlohmann::ordered_json params;
    for (const auto& name : param_names()) {
      const auto prov = f.provenance.count(name) ? f.provenance.at(name) : "assumed";
      nlohmann::ordered_json entry;
      if (prov == "required") {
        entry["value"] = nullptr;
      } else {
        entry["value"] = round12(param_value(f.params, name));
      }
      entry["provenance"] = prov;
      params[name] = entry;
    }
    j["parameters"] = params;
    j["required"] = f.required;
    nlohmann::ordered_json axis;
    axis["name"] = f.x_name;
    axis["min"] = round12(f.x_min);
    axis["max"] = round12(f.x_max);
    if (f.x_step > 0.0) {
      axis["step"] = round12(f.x_step);
    } else {
      axis["points"] = f.points;
    }
    j["axis"] = axis;
    if (!f.series_name.empty()) {
      nlohmann::ordered_json series;
      series["name"] = f.series_name;
      series["values"] = f.series_values;
      j["series"] = series;
    } else {
      j["series"] = nullptr;
    }
    root["figures"].push_back(j);
  }
  return root.dump(2) + "\n";
}

FigureResult run_figure(const std::string& id, const FigureOptions& options) {
  FigureResult result;
  result.spec = figure(id);
  auto& spec = result.spec;
  for (const auto& [k, v] : options.overrides) set_param(spec.params, k, v);
  for (const auto& r : spec.required) {
    if (!options.overrides.count(r)) {
      throw Error(ErrorCode::usage, "figure " + spec.id + " needs --" + r + " (not given with the figure)");
    }
  }
  if (options.points) spec.points = *options.points;
  if (options.x_min) spec.x_min = *options.x_min;
  if (options.x_max) spec.x_max = *options.x_max;
  const auto xs = grid(spec);
  result.columns = columns_for(spec.quantity);

  std::vector<std::optional<double>> series;
  if (spec.series_values.empty()) series.push_back(std::nullopt);
  for (double s : spec.series_values) series.push_back(s);
  result.rows.resize(series.size() * xs.size());
  detail::parallel_for(result.rows.size(), [&](std::size_t k) {
    const auto& s = series[k / xs.size()];
    const double x = xs[k % xs.size()];
    ModelParams p = spec.params;
    if (s) set_param(p, spec.series_name, *s);
    set_param(p, spec.x_name, x);
    auto& row = result.rows[k];
    row.series_value = s;
    row.x = x;
    evaluate(p, spec.quantity, row);
  });
  result.trends = trends(result);
  return result;
}

std::string to_csv(const FigureResult& r) {
  std::ostringstream out;
  out << "figure,series_name,series_value,x_name,x";
  for (const auto& c : r.columns) out << ',' << c;
  out << ",error\n";
  for (const auto& row : r.rows) {
    out << r.spec.id << ',' << r.spec.series_name << ',';
    if (row.series_value) out << format_number(*row.series_value);
    out << ',' << r.spec.x_name << ',' << format_number(row.x);
    for (const auto& c : r.columns) {
      out << ',';
      if (const auto it = row.values.find(c); it != row.values.end()) out << format_number(it->second);
    }
    out << ',' << csv_field(row.error) << '\n';
  }
  return out.str();
}

}  // namespace taxiq::experiments
