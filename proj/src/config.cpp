#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "taxiq/model.hpp"

namespace taxiq {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& name, const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto* begin = t.data();
  const auto* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (t.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw Error(ErrorCode::invalid_config, "cannot parse value '" + text + "' for " + name);
  }
  return value;
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::invalid_config, "line " + std::to_string(lineno) + ": expected 'name = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw Error(ErrorCode::invalid_config, "line " + std::to_string(lineno) + ": empty name or value");
    }
    out[key] = value;
  }
  return out;
}

std::map<std::string, std::string> load_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::invalid_config, "cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

const std::vector<std::string>& param_names() {
  static const std::vector<std::string> names = {
      "lambda", "mu1",      "mu2",     "alpha",   "capacity_n", "k1",      "k2",
      "reward_r", "price_p", "cost_cp", "cost_ct", "cost_cmp",   "cost_cmt"};
  return names;
}

namespace {

double* real_field(ModelParams& p, const std::string& name) {
  if (name == "lambda") return &p.lambda;
  if (name == "mu1") return &p.mu1;
  if (name == "mu2") return &p.mu2;
  if (name == "alpha") return &p.alpha;
  if (name == "k1") return &p.k1;
  if (name == "k2") return &p.k2;
  if (name == "reward_r") return &p.reward_r;
  if (name == "price_p") return &p.price_p;
  if (name == "cost_cp") return &p.cost_cp;
  if (name == "cost_ct") return &p.cost_ct;
  if (name == "cost_cmp") return &p.cost_cmp;
  if (name == "cost_cmt") return &p.cost_cmt;
  return nullptr;
}

}  // namespace

void set_param(ModelParams& p, const std::string& name, double value) {
  if (name == "capacity_n") {
    if (std::floor(value) != value || value < 0 || value > 1e7) {
      throw Error(ErrorCode::invalid_config, "capacity_n must be a nonnegative integer");
    }
    p.capacity_n = static_cast<int>(value);
    return;
  }
  double* field = real_field(p, name);
  if (field == nullptr) throw Error(ErrorCode::invalid_config, "unknown parameter '" + name + "'");
  *field = value;
}

void set_param(ModelParams& p, const std::string& name, const std::string& value) {
  if (name != "capacity_n" && real_field(p, name) == nullptr) {
    throw Error(ErrorCode::invalid_config, "unknown parameter '" + name + "'");
  }
  set_param(p, name, parse_double(name, value));
}

double param_value(const ModelParams& p, const std::string& name) {
  if (name == "capacity_n") return p.capacity_n;
  ModelParams copy = p;
  const double* field = real_field(copy, name);
  if (field == nullptr) throw Error(ErrorCode::invalid_config, "unknown parameter '" + name + "'");
  return *field;
}

std::map<std::string, std::string> apply_params(ModelParams& p, const std::map<std::string, std::string>& values) {
  std::map<std::string, std::string> rest;
  const auto& names = param_names();
  for (const auto& [key, value] : values) {
    if (std::find(names.begin(), names.end(), key) != names.end()) {
      set_param(p, key, value);
    } else {
      rest.emplace(key, value);
    }
  }
  return rest;
}

}  // namespace taxiq
