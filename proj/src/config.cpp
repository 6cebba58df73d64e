#include "hmmrd/config.hpp"

#include <charconv>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

namespace hmmrd {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end || !std::isfinite(out)) {
    throw ConfigError(key, "expected a real number, got '" + value + "'");
  }
  return out;
}

long long to_integer(const std::string& key, const std::string& value) {
  long long out = 0;
  const char* begin = value.data();
  const char* end = begin + value.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key, "expected an integer, got '" + value + "'");
  }
  return out;
}

std::size_t to_level(const std::string& key, const std::string& value) {
  const long long n = to_integer(key, value);
  if (n < 1) throw ConfigError(key, "mesh level must be >= 1");
  return static_cast<std::size_t>(n);
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw ConfigError(key, "expected a boolean, got '" + value + "'");
}

std::vector<std::string> to_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

void require_positive(const std::string& key, double value) {
  if (!(value > 0.0)) throw ConfigError(key, "must be positive");
}

void assign(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "level") {
    cfg.level = to_level(key, value);
  } else if (key == "mesh_file") {
    if (value.empty()) {
      cfg.mesh_file.reset();
    } else {
      cfg.mesh_file = value;
    }
  } else if (key == "dt") {
    cfg.dt = to_double(key, value);
    require_positive(key, cfg.dt);
  } else if (key == "T") {
    cfg.final_time = to_double(key, value);
    require_positive(key, cfg.final_time);
  } else if (key == "problem") {
    if (value != "brusselator" && value != "affine") {
      throw ConfigError(key, "expected 'brusselator' or 'affine'");
    }
    cfg.problem = value;
  } else if (key == "kinetics") {
    if (value != "brusselator" && value != "none") {
      throw ConfigError(key, "expected 'brusselator' or 'none'");
    }
    cfg.kinetics = value;
  } else if (key == "a") {
    cfg.a = to_double(key, value);
    if (cfg.a < 0.0) throw ConfigError(key, "must be non-negative");
  } else if (key == "b") {
    cfg.b = to_double(key, value);
  } else if (key == "mu1") {
    cfg.mu1 = to_double(key, value);
    require_positive(key, cfg.mu1);
  } else if (key == "mu2") {
    cfg.mu2 = to_double(key, value);
    require_positive(key, cfg.mu2);
  } else if (key == "mu") {
    cfg.mu1 = cfg.mu2 = to_double(key, value);
    require_positive(key, cfg.mu1);
  } else if (key == "newton_tol") {
    cfg.newton_tol = to_double(key, value);
    require_positive(key, cfg.newton_tol);
  } else if (key == "newton_max_iter") {
    const long long n = to_integer(key, value);
    if (n < 1) throw ConfigError(key, "must be >= 1");
    cfg.newton_max_iter = static_cast<int>(n);
  } else if (key == "linear_tol") {
    cfg.linear_tol = to_double(key, value);
    require_positive(key, cfg.linear_tol);
  } else if (key == "out") {
    if (value.empty()) throw ConfigError(key, "must not be empty");
    cfg.out = value;
  } else if (key == "levels") {
    cfg.levels.clear();
    for (const auto& item : to_list(value)) cfg.levels.push_back(to_level(key, item));
    if (cfg.levels.empty()) throw ConfigError(key, "must list at least one level");
    for (std::size_t i = 1; i < cfg.levels.size(); ++i) {
      if (cfg.levels[i] <= cfg.levels[i - 1]) {
        throw ConfigError(key, "levels must be strictly increasing");
      }
    }
  } else if (key == "consistency_samples") {
    cfg.consistency_samples = to_list(value);
  } else if (key == "conformity_samples") {
    cfg.conformity_samples = to_list(value);
  } else if (key == "h_label") {
    if (value != "leg" && value != "diameter") {
      throw ConfigError(key, "expected 'leg' or 'diameter'");
    }
    cfg.h_label = value;
  } else if (key == "parallel") {
    cfg.parallel = to_bool(key, value);
  } else if (key == "full_table") {
    cfg.full_table = to_bool(key, value);
  } else {
    throw ConfigError(key, "unknown key");
  }
}

}  // namespace

Command parse_command(std::string_view name) {
  if (name == "solve") return Command::solve;
  if (name == "convergence") return Command::convergence;
  if (name == "diagnose") return Command::diagnose;
  if (name == "mesh-info") return Command::mesh_info;
  throw ConfigError("", "unknown command '" + std::string(name) + "'");
}

std::string_view command_name(Command command) {
  switch (command) {
    case Command::solve: return "solve";
    case Command::convergence: return "convergence";
    case Command::diagnose: return "diagnose";
    case Command::mesh_info: return "mesh-info";
  }
  return "unknown";
}

std::vector<std::size_t> RunConfig::effective_levels() const {
  if (!levels.empty()) return levels;
  if (command == Command::diagnose) return {4, 8, 16};
  if (full_table) return {8, 16, 32, 64};
  return {8, 16, 32};
}

double RunConfig::effective_dt() const { return full_table ? 1e-4 : dt; }

std::string RunConfig::canonical_text() const {
  std::ostringstream out;
  out << std::setprecision(17);
  auto join = [](const auto& items) {
    std::ostringstream s;
    for (std::size_t i = 0; i < items.size(); ++i) s << (i ? "," : "") << items[i];
    return s.str();
  };
  out << "command = " << command_name(command) << '\n'
      << "level = " << level << '\n'
      << "mesh_file = " << mesh_file.value_or("") << '\n'
      << "dt = " << effective_dt() << '\n'
      << "T = " << final_time << '\n'
      << "problem = " << problem << '\n'
      << "kinetics = " << kinetics << '\n'
      << "a = " << a << '\n'
      << "b = " << b << '\n'
      << "mu1 = " << mu1 << '\n'
      << "mu2 = " << mu2 << '\n'
      << "newton_tol = " << newton_tol << '\n'
      << "newton_max_iter = " << newton_max_iter << '\n'
      << "linear_tol = " << linear_tol << '\n'
      << "levels = " << join(effective_levels()) << '\n'
      << "consistency_samples = " << join(consistency_samples) << '\n'
      << "conformity_samples = " << join(conformity_samples) << '\n'
      << "h_label = " << h_label << '\n'
      << "full_table = " << (full_table ? "true" : "false") << '\n';
  return out.str();
}

std::pair<std::string, std::string> split_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError(trim(assignment), "expected 'key = value'");
  }
  return {trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1))};
}

RunConfig parse_config(Command command, std::string_view text,
                       const std::vector<std::pair<std::string, std::string>>& overrides) {
  RunConfig cfg;
  cfg.command = command;

  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    if (trim(line).empty()) continue;
    try {
      const auto [key, value] = split_assignment(line);
      assign(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(e.key(), "line " + std::to_string(line_no) + ": " + e.detail());
    }
  }
  for (const auto& [key, value] : overrides) assign(cfg, key, value);

  if (cfg.problem == "affine" && cfg.kinetics != "none") {
    throw ConfigError("kinetics", "the affine problem is exact only with kinetics = none");
  }
  return cfg;
}

}  // namespace hmmrd
