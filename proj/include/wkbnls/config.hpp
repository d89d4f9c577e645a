#pragma once

#include "wkbnls/sweep.hpp"

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace wkbnls {

// Flat "key = value" lines; '#' starts a comment. Unknown or repeated keys
// and malformed lines throw std::invalid_argument naming the line.
std::map<std::string, std::string> parse_key_values(std::istream& in, const std::set<std::string>& allowed);

std::vector<double> parse_double_list(const std::string& text);

// Keys: case, m, s, eps_list, t_end, cascade_dt, cfl_factor, K, audit, threads.
SweepConfig sweep_config_from(const std::map<std::string, std::string>& kv, SweepConfig base = {});
SweepConfig load_sweep_config(const std::string& path, SweepConfig base = {});

}  // namespace wkbnls
