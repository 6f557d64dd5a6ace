#include "swe/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "swe/error.hpp"

namespace swe {
namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double toDouble(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
}

long toLong(const std::string& key, const std::string& value) {
  long v = 0;
  const auto* end = value.data() + value.size();
  const auto [ptr, ec] = std::from_chars(value.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ConfigError("'" + key + "' expects an integer, got '" + value + "'");
  return v;
}

bool toBool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw ConfigError("'" + key + "' expects true/false, got '" + value + "'");
}

}  // namespace

std::map<std::string, std::string> parseKeyValues(const std::string& text) {
  std::map<std::string, std::string> out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside of a section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    if (out.count(key)) throw ConfigError("duplicate key '" + key + "'");
    out[key] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig parseRunConfig(const std::string& text) {
  RunConfig cfg;
  ScenarioConfig& sc = cfg.scenario;
  for (const auto& [key, value] : parseKeyValues(text)) {
    if (key == "scenario.kind") sc.kind = parseScenarioKind(value);
    else if (key == "scenario.n_side") sc.n_side = static_cast<int>(toLong(key, value));
    else if (key == "scenario.dx") sc.dx = toDouble(key, value);
    else if (key == "scenario.cfl") sc.cfl = toDouble(key, value);
    else if (key == "scenario.t_end") sc.t_end = toDouble(key, value);
    else if (key == "scenario.g") sc.g = toDouble(key, value);
    else if (key == "scenario.rain_rate") sc.rain_rate = toDouble(key, value);
    else if (key == "scenario.manning_n") sc.manning_n = toDouble(key, value);
    else if (key == "scenario.bump_height") sc.bump_height = toDouble(key, value);
    else if (key == "scenario.h_high") sc.h_high = toDouble(key, value);
    else if (key == "scenario.h_low") sc.h_low = toDouble(key, value);
    else if (key == "scenario.input") sc.input_path = value;
    else if (key == "run.px") cfg.px = static_cast<int>(toLong(key, value));
    else if (key == "run.py") cfg.py = static_cast<int>(toLong(key, value));
    else if (key == "run.max_steps") cfg.max_steps = toLong(key, value);
    else if (key == "run.t_io") cfg.t_io = toDouble(key, value);
    else if (key == "run.audit_every") cfg.audit_every = static_cast<int>(toLong(key, value));
    else if (key == "run.seed") cfg.seed = static_cast<std::uint64_t>(toLong(key, value));
    else if (key == "solver.entropy_fix") cfg.entropy_fix = toBool(key, value);
    else if (key == "solver.max_reductions") cfg.max_reductions = static_cast<int>(toLong(key, value));
    else throw ConfigError("unknown configuration key '" + key + "'");
  }
  sc.validate();
  if (cfg.px < 1 || cfg.py < 1) throw ConfigError("run.px and run.py must be >= 1");
  if (cfg.max_steps < 0) throw ConfigError("run.max_steps must be >= 0");
  if (cfg.t_io < 0.0) throw ConfigError("run.t_io must be >= 0");
  if (cfg.audit_every < 0) throw ConfigError("run.audit_every must be >= 0");
  if (cfg.max_reductions < 0) throw ConfigError("solver.max_reductions must be >= 0");
  return cfg;
}

RunConfig loadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  RunConfig cfg = parseRunConfig(text.str());
  // Relative snapshot inputs resolve against the config's directory.
  auto& input = cfg.scenario.input_path;
  if (!input.empty() && std::filesystem::path(input).is_relative()) {
    input = (path.parent_path() / input).string();
  }
  return cfg;
}

}  // namespace swe
