#include "taxiq/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <cstdlib>
#include <json.hpp>
#include <memory>
#include <sstream>

#include "taxiq/experiments.hpp"
#include "taxiq/format.hpp"
#include "taxiq/observable.hpp"
#include "taxiq/partial_obs.hpp"
#include "taxiq/sim.hpp"
#include "taxiq/strategy.hpp"

namespace taxiq::cli {

namespace {

using json = nlohmann::ordered_json;

json num(double x) { return round12(x); }

// --config plus one flag per model field; flags win over the file.
struct ParamFlags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config;

  void attach(CLI::App* app) {
    for (const auto& name : param_names()) {
      options[name] = app->add_option("--" + name, values[name], "model parameter " + name);
    }
    app->add_option("--config", config, "parameter file with name = value lines");
  }

  std::map<std::string, std::string> collect() const {
    std::map<std::string, std::string> kv;
    if (!config.empty()) kv = load_key_values(config);
    for (const auto& [name, opt] : options) {
      if (opt->count() > 0) kv[name] = values.at(name);
    }
    return kv;
  }

  ModelParams params() const {
    ModelParams p;
    const auto rest = apply_params(p, collect());
    if (!rest.empty()) throw Error(ErrorCode::invalid_config, "unknown parameter '" + rest.begin()->first + "'");
    return p;
  }
};

json params_json(const ModelParams& p) {
  json j;
  for (const auto& name : param_names()) {
    if (name == "capacity_n") {
      j[name] = p.capacity_n;
    } else {
      j[name] = num(param_value(p, name));
    }
  }
  return j;
}

json measures_json(const PerformanceMeasures& m) {
  json j;
  j["lambda_p_eff"] = num(m.lambda_p_eff);
  j["lambda_t_eff"] = num(m.lambda_t_eff);
  j["el_p"] = num(m.el_p);
  j["el_t"] = num(m.el_t);
  j["ew_p"] = num(m.ew_p);
  j["ew_t"] = num(m.ew_t);
  j["em"] = num(m.em);
  return j;
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

// Two-column CSV of a flat object; nested objects are flattened with dots.
void flat_csv(const json& j, const std::string& prefix, std::ostream& out) {
  for (const auto& [k, v] : j.items()) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object()) {
      flat_csv(v, key, out);
    } else if (v.is_array()) {
      std::string joined;
      for (const auto& e : v) joined += (joined.empty() ? "" : ";") + scalar_text(e);
      out << key << ',' << joined << '\n';
    } else {
      out << key << ',' << scalar_text(v) << '\n';
    }
  }
}

void emit(const json& j, const std::string& format, std::ostream& out) {
  if (format == "csv") {
    out << "key,value\n";
    flat_csv(j, "", out);
  } else {
    out << j.dump(2) << '\n';
  }
}

std::uint64_t resolve_seed(const CLI::Option* opt, std::uint64_t flag_value) {
  if (opt->count() > 0) return flag_value;
  if (const char* env = std::getenv("TAXIQ_SEED"); env != nullptr && *env != '\0') {
    std::uint64_t v = 0;
    const std::string s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw Error(ErrorCode::usage, "TAXIQ_SEED must be an unsigned integer");
    }
    return v;
  }
  return 1;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    double v = 0.0;
    const auto b = item.find_first_not_of(' ');
    const auto e = item.find_last_not_of(' ');
    if (b == std::string::npos) throw Error(ErrorCode::usage, "empty grid entry");
    const auto [ptr, ec] = std::from_chars(item.data() + b, item.data() + e + 1, v);
    if (ec != std::errc() || ptr != item.data() + e + 1) {
      throw Error(ErrorCode::usage, "cannot parse grid entry '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw Error(ErrorCode::usage, "grid is empty");
  return out;
}

struct Options {
  ParamFlags params;
  std::string regime = "partial";
  double q = 1.0;
  int threshold = 1;
  std::string format = "json";
  std::uint64_t seed = 1;
  std::uint64_t events = 1'000'000;
  std::uint64_t warmup = 100'000;
  int replications = 5;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* q_opt = nullptr;
  CLI::Option* threshold_opt = nullptr;
  std::string figure_id;
  int points = 25;
  CLI::Option* points_opt = nullptr;
  double x_min = 0.0, x_max = 0.0;
  CLI::Option* x_min_opt = nullptr;
  CLI::Option* x_max_opt = nullptr;
  std::string axis = "lambda";
  std::string grid;
};

void add_format(CLI::App* app, Options& o) {
  app->add_option("--format", o.format, "output format")->check(CLI::IsMember({"json", "csv"}));
}

void add_policy(CLI::App* app, Options& o) {
  app->add_option("--regime", o.regime, "information level")->check(CLI::IsMember({"partial", "observable"}));
  o.q_opt = app->add_option("--q", o.q, "joining probability (partial)");
  o.threshold_opt = app->add_option("--threshold", o.threshold, "joining threshold n_s (observable)");
}

Regime regime_of(const Options& o) { return o.regime == "observable" ? Regime::observable : Regime::partial; }

void require_policy(const Options& o) {
  if (regime_of(o) == Regime::partial && o.threshold_opt->count() > 0) {
    throw Error(ErrorCode::usage, "--threshold applies to --regime observable");
  }
  if (regime_of(o) == Regime::observable && o.q_opt->count() > 0) {
    throw Error(ErrorCode::usage, "--q applies to --regime partial");
  }
}

int cmd_validate(const Options& o, std::ostream& out) {
  const auto p = o.params.params();
  const auto v = validate(p, regime_of(o));
  const auto rho = intensities(p);
  json j;
  j["valid"] = true;
  j["regime"] = o.regime;
  j["rho0"] = num(rho.rho0);
  j["rho2"] = num(rho.rho2);
  j["warnings"] = v.warnings;
  j["params"] = params_json(p);
  emit(j, o.format, out);
  return exit_ok;
}

int cmd_stationary(const Options& o, std::ostream& out) {
  require_policy(o);
  const auto p = o.params.params();
  json j;
  j["regime"] = o.regime;
  std::vector<std::pair<int, double>> rows;
  if (regime_of(o) == Regime::partial) {
    const auto d = partial_obs::stationary(p, o.q);
    j["q"] = num(o.q);
    j["lower_bound"] = d.lower_bound;
    j["upper_stored"] = d.upper_stored();
    j["tail_ratio"] = num(d.tail_ratio);
    j["tail_mass_after_stored"] = num(d.tail_mass_after(d.upper_stored()));
    j["pi_minus_n"] = num(d.pi_minus_n);
    for (int n = d.lower_bound; n <= d.upper_stored(); ++n) rows.emplace_back(n, d.probability(n));
  } else {
    const auto d = observable::stationary(p, o.threshold);
    j["threshold"] = d.threshold;
    j["lower_bound"] = d.lower_bound;
    j["pi_minus_n"] = num(d.pi_minus_n);
    for (int n = d.lower_bound; n <= d.threshold; ++n) rows.emplace_back(n, d.probability(n));
  }
  if (o.format == "csv") {
    out << "state,probability\n";
    for (const auto& [n, v] : rows) out << n << ',' << format_number(v) << '\n';
    return exit_ok;
  }
  json probs = json::array();
  for (const auto& [n, v] : rows) probs.push_back(json{{"state", n}, {"probability", num(v)}});
  j["probabilities"] = probs;
  out << j.dump(2) << '\n';
  return exit_ok;
}

int cmd_measures(const Options& o, std::ostream& out) {
  require_policy(o);
  const auto p = o.params.params();
  json j;
  j["regime"] = o.regime;
  if (regime_of(o) == Regime::partial) {
    const auto m = partial_obs::performance(p, o.q);
    const auto w = partial_obs::welfare(p, o.q);
    j["q"] = num(o.q);
    j["measures"] = measures_json(m);
    j["no_passenger_flow"] = m.no_passenger_flow;
    j["conditional_wait"] = num(partial_obs::expected_wait_conditional(p, o.q));
    j["utility"] = num(partial_obs::utility(p, o.q));
    j["welfare"] = json{{"s1", num(w.s1)}, {"s2", num(w.s2)}, {"sm", num(w.sm)}, {"total", num(w.total)},
                        {"cbar", num(w.cbar)}};
  } else {
    const auto m = observable::performance(p, o.threshold);
    j["threshold"] = o.threshold;
    j["measures"] = measures_json(m);
    j["welfare"] = num(observable::welfare(p, o.threshold));
    j["utility_at_threshold_minus_one"] = num(observable::utility(p, o.threshold - 1));
  }
  emit(j, o.format, out);
  return exit_ok;
}

int cmd_equilibrium(const Options& o, std::ostream& out) {
  const auto p = o.params.params();
  json j;
  j["information"] = o.regime;
  if (regime_of(o) == Regime::partial) {
    const auto e = strategy::equilibrium_q(p);
    j["regime"] = std::string(to_string(e.regime));
    j["q_e"] = num(e.q_e);
    j["l_po"] = num(e.l_po);
    j["v_po"] = num(e.v_po);
  } else {
    j["n_e"] = strategy::equilibrium_n(p);
  }
  emit(j, o.format, out);
  return exit_ok;
}

int cmd_social(const Options& o, std::ostream& out) {
  const auto p = o.params.params();
  json j;
  j["information"] = o.regime;
  if (regime_of(o) == Regime::partial) {
    const auto s = strategy::social_q(p);
    j["q_star"] = num(s.q_star);
    j["welfare_at_opt"] = num(s.welfare_at_opt);
    j["boundary"] = s.boundary;
    j["derivative_root"] = s.derivative_root ? json(num(*s.derivative_root)) : json(nullptr);
    j["diagnostic"] = s.diagnostic ? json(*s.diagnostic) : json(nullptr);
  } else {
    const auto s = strategy::social_n(p);
    j["n_star"] = s.n_star;
    j["welfare_at_opt"] = num(s.welfare_at_opt);
    j["boundary"] = s.boundary;
    j["n_cap"] = s.n_cap;
    j["n_e"] = s.n_e;
    j["inequality_root"] = std::string(observable::to_string(s.root_kind));
    j["n_inequality"] = s.n_inequality ? json(*s.n_inequality) : json(nullptr);
    j["routes_agree"] = s.routes_agree;
  }
  emit(j, o.format, out);
  return exit_ok;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  require_policy(o);
  const auto p = o.params.params();
  sim::SimConfig c;
  c.horizon_events = o.events;
  c.warmup_events = o.warmup;
  c.replications = o.replications;
  c.seed = resolve_seed(o.seed_opt, o.seed);
  const bool partial = regime_of(o) == Regime::partial;
  const auto policy = partial ? Policy::partial(o.q) : Policy::observable(o.threshold);
  const auto r = sim::simulate(p, policy, c);

  if (o.format == "csv") {
    out << "measure,mean,half_width_95,replications\n";
    for (const auto& name : sim::measure_names()) {
      const auto& e = r.measures.at(name);
      out << name << ',' << format_number(e.mean) << ',' << format_number(e.half_width_95) << ',' << e.replications
          << '\n';
    }
    return exit_ok;
  }
  json j;
  j["regime"] = o.regime;
  if (partial) {
    j["q"] = num(o.q);
  } else {
    j["threshold"] = o.threshold;
  }
  j["seed"] = c.seed;
  j["events"] = c.horizon_events;
  j["warmup"] = c.warmup_events;
  j["replications"] = c.replications;
  json m;
  for (const auto& name : sim::measure_names()) {
    const auto& e = r.measures.at(name);
    m[name] = json{{"mean", num(e.mean)}, {"half_width_95", num(e.half_width_95)}, {"replications", e.replications}};
  }
  j["measures"] = m;
  json freq = json::array();
  for (std::size_t i = 0; i < r.frequencies.fraction.size(); ++i) {
    freq.push_back(json{{"state", r.frequencies.lower_bound + static_cast<int>(i)},
                        {"fraction", num(r.frequencies.fraction[i])}});
  }
  j["frequencies"] = freq;
  out << j.dump(2) << '\n';
  return exit_ok;
}

int cmd_figure(const Options& o, std::ostream& out) {
  experiments::FigureOptions fo;
  fo.overrides = o.params.collect();
  if (o.points_opt->count() > 0) fo.points = o.points;
  if (o.x_min_opt->count() > 0) fo.x_min = o.x_min;
  if (o.x_max_opt->count() > 0) fo.x_max = o.x_max;
  const auto r = experiments::run_figure(o.figure_id, fo);
  if (o.format == "csv") {
    out << experiments::to_csv(r);
    return exit_ok;
  }
  json j;
  j["figure"] = r.spec.id;
  j["title"] = r.spec.title;
  j["params"] = params_json(r.spec.params);
  j["x_name"] = r.spec.x_name;
  j["series_name"] = r.spec.series_name.empty() ? json(nullptr) : json(r.spec.series_name);
  json rows = json::array();
  for (const auto& row : r.rows) {
    json jr;
    jr["series_value"] = row.series_value ? json(num(*row.series_value)) : json(nullptr);
    jr["x"] = num(row.x);
    for (const auto& c : r.columns) {
      const auto it = row.values.find(c);
      jr[c] = it == row.values.end() ? json(nullptr) : json(num(it->second));
    }
    jr["error"] = row.error.empty() ? json(nullptr) : json(row.error);
    rows.push_back(jr);
  }
  j["rows"] = rows;
  json trends = json::array();
  for (const auto& t : r.trends) trends.push_back(json{{"name", t.name}, {"passed", t.passed}, {"detail", t.detail}});
  j["trends"] = trends;
  out << j.dump(2) << '\n';
  return exit_ok;
}

int cmd_compare(const Options& o, std::ostream& out) {
  const auto p = o.params.params();
  const auto axis = strategy::parse_axis(o.axis);
  std::vector<double> xs;
  if (!o.grid.empty()) {
    xs = parse_list(o.grid);
  } else {
    if (o.x_min_opt->count() == 0 || o.x_max_opt->count() == 0) {
      throw Error(ErrorCode::usage, "compare needs --grid or both --x-min and --x-max");
    }
    experiments::FigureSpec s;
    s.x_min = o.x_min;
    s.x_max = o.x_max;
    s.points = o.points;
    xs = experiments::grid(s);
  }
  const auto rows = strategy::compare_welfare(p, axis, xs);
  auto opt_num = [](const auto& v) { return v ? json(num(static_cast<double>(*v))) : json(nullptr); };
  if (o.format == "csv") {
    out << o.axis << ",q_star,welfare_partial,n_star,welfare_observable,error\n";
    for (const auto& r : rows) {
      auto cell = [](const auto& v) { return v ? format_number(static_cast<double>(*v)) : std::string(); };
      out << format_number(r.x) << ',' << cell(r.q_star) << ',' << cell(r.welfare_partial) << ','
          << cell(r.n_star) << ',' << cell(r.welfare_observable) << ',';
      if (!r.error.empty()) out << '"' << r.error << '"';
      out << '\n';
    }
    return exit_ok;
  }
  json j;
  j["axis"] = o.axis;
  j["params"] = params_json(p);
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back(json{{"x", num(r.x)},
                       {"q_star", opt_num(r.q_star)},
                       {"welfare_partial", opt_num(r.welfare_partial)},
                       {"n_star", r.n_star ? json(*r.n_star) : json(nullptr)},
                       {"welfare_observable", opt_num(r.welfare_observable)},
                       {"error", r.error.empty() ? json(nullptr) : json(r.error)}});
  }
  j["rows"] = arr;
  out << j.dump(2) << '\n';
  return exit_ok;
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::validation: return exit_validation;
    case ErrorCategory::numerical: return exit_numerical;
    case ErrorCategory::usage: return exit_usage;
  }
  return exit_usage;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equilibrium and socially optimal joining in a passenger-taxi queue", "taxiq"};
  app.require_subcommand(1);

  // One option set per subcommand so flags never leak between them.
  std::vector<std::unique_ptr<Options>> store;
  std::map<std::string, Options*> by_name;
  auto sub = [&](const std::string& name, const std::string& help) {
    store.push_back(std::make_unique<Options>());
    auto& o = *store.back();
    auto* s = app.add_subcommand(name, help);
    by_name[name] = &o;
    add_format(s, o);
    return std::pair<CLI::App*, Options*>{s, &o};
  };

  for (const auto& [name, help] : std::vector<std::pair<std::string, std::string>>{
           {"validate", "check a parameter set"},
           {"stationary", "stationary distribution"},
           {"measures", "performance measures, utility and welfare"},
           {"equilibrium", "equilibrium joining probability or threshold"},
           {"social", "socially optimal joining probability or threshold"},
           {"simulate", "Monte Carlo estimate of the measures"}}) {
    auto [s, o] = sub(name, help);
    o->params.attach(s);
    add_policy(s, *o);
    if (name == "simulate") {
      o->seed_opt = s->add_option("--seed", o->seed, "master seed (falls back to TAXIQ_SEED)");
      s->add_option("--events", o->events, "events per replication, warmup included");
      s->add_option("--warmup", o->warmup, "events discarded at the start of each replication");
      s->add_option("--replications", o->replications, "independent replications");
    }
  }
  {
    auto [s, o] = sub("figure", "parameter sweep behind one figure");
    o->params.attach(s);
    s->add_option("id", o->figure_id, "figure id (5a 5b 6a 6b 7a 7b 8a 8b 9 10)")->required();
    o->points_opt = s->add_option("--points", o->points, "grid points on a continuous axis");
    o->x_min_opt = s->add_option("--x-min", o->x_min, "axis start");
    o->x_max_opt = s->add_option("--x-max", o->x_max, "axis end");
  }
  {
    auto [s, o] = sub("compare", "optimal welfare under both information levels");
    o->params.attach(s);
    s->add_option("--axis", o->axis, "swept parameter")->check(CLI::IsMember({"lambda", "alpha"}));
    s->add_option("--grid", o->grid, "comma-separated axis values");
    o->points_opt = s->add_option("--points", o->points, "grid points between --x-min and --x-max");
    o->x_min_opt = s->add_option("--x-min", o->x_min, "axis start");
    o->x_max_opt = s->add_option("--x-max", o->x_max, "axis end");
  }
  auto* manifest = app.add_subcommand("manifest", "figure parameter sets as JSON");

  std::vector<const char*> argv{"taxiq"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }

  try {
    if (manifest->parsed()) {
      out << experiments::manifest_json();
      return exit_ok;
    }
    for (const auto& [name, o] : by_name) {
      if (!app.get_subcommand(name)->parsed()) continue;
      if (name == "validate") return cmd_validate(*o, out);
      if (name == "stationary") return cmd_stationary(*o, out);
      if (name == "measures") return cmd_measures(*o, out);
      if (name == "equilibrium") return cmd_equilibrium(*o, out);
      if (name == "social") return cmd_social(*o, out);
      if (name == "simulate") return cmd_simulate(*o, out);
      if (name == "figure") return cmd_figure(*o, out);
      if (name == "compare") return cmd_compare(*o, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_numerical;
  }
  return exit_usage;
}

}  // namespace taxiq::cli
