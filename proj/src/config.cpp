#include "wkbnls/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace wkbnls {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != v.size() || v.empty()) throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
  return x;
}

int to_int(const std::string& key, const std::string& v) {
  double x = to_double(key, v);
  if (x != static_cast<int>(x)) throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + v + "'");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw std::invalid_argument("config: '" + key + "' expects true or false, got '" + v + "'");
}

const std::set<std::string> kSweepKeys{"case", "m", "s", "eps_list", "t_end", "cascade_dt", "cfl_factor", "K", "audit", "threads"};

}  // namespace

std::map<std::string, std::string> parse_key_values(std::istream& in, const std::set<std::string>& allowed) {
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    std::string where = "config line " + std::to_string(lineno);
    if (eq == std::string::npos) throw std::invalid_argument(where + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument(where + ": empty key");
    if (!allowed.count(key)) throw std::invalid_argument(where + ": unknown key '" + key + "'");
    if (out.count(key)) throw std::invalid_argument(where + ": repeated key '" + key + "'");
    out[key] = value;
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double("list", trim(item)));
  return out;
}

SweepConfig sweep_config_from(const std::map<std::string, std::string>& kv, SweepConfig c) {
  for (const auto& [k, v] : kv) {
    if (!kSweepKeys.count(k)) throw std::invalid_argument("config: unknown key '" + k + "'");
    if (k == "case") c.case_name = v;
    else if (k == "m") c.m = to_int(k, v);
    else if (k == "s") c.s = to_int(k, v);
    else if (k == "eps_list") c.eps_list = parse_double_list(v);
    else if (k == "t_end") c.t_end = to_double(k, v);
    else if (k == "cascade_dt") c.cascade_dt = to_double(k, v);
    else if (k == "cfl_factor") c.cfl_factor = to_double(k, v);
    else if (k == "K") c.K = to_double(k, v);
    else if (k == "audit") c.audit = to_bool(k, v);
    else if (k == "threads") c.threads = to_int(k, v);
  }
  return c;
}

SweepConfig load_sweep_config(const std::string& path, SweepConfig base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config '" + path + "'");
  return sweep_config_from(parse_key_values(in, kSweepKeys), base);
}

}  // namespace wkbnls
