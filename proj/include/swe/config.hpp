#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "swe/grid.hpp"

namespace swe {

/// Everything a run needs beyond the physical scenario.
struct RunConfig {
  ScenarioConfig scenario;
  int px = 1;
  int py = 1;
  long max_steps = 0;     ///< 0: run until t_end
  double t_io = 0.0;      ///< snapshot cadence; 0 means one snapshot at t_end
  int audit_every = 1;    ///< mass audit cadence in steps; 0 disables
  bool entropy_fix = true;
  int max_reductions = 10;
  std::uint64_t seed = 0;  ///< recorded in outputs; the solver itself draws no random numbers
};

/// Flat "[section]" / "key = value" text. '#' starts a comment. Recognised
/// sections are scenario, run and solver; unknown keys are rejected.
RunConfig parseRunConfig(const std::string& text);
RunConfig loadRunConfig(const std::filesystem::path& path);

/// Lower-level access used by the parser: "section.key" -> raw value.
std::map<std::string, std::string> parseKeyValues(const std::string& text);

}  // namespace swe
