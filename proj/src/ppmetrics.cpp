#include "swe/ppmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "swe/error.hpp"

namespace swe {

RelativePerformance relativePerformance(const PlatformObservation& obs) {
  obs.peaks.validate();
  if (!(obs.p_achieved >= 0.0) || !(obs.a_achieved > 0.0)) {
    throw ConfigError(obs.platform + "/" + obs.kernel + ": achieved performance and intensity must be positive");
  }
  const double roof = std::min(obs.peaks.p_peak, obs.peaks.b_peak * obs.a_achieved);
  RelativePerformance out;
  out.r = obs.p_achieved / roof;
  if (out.r > kRooflineSlack) {
    std::ostringstream msg;
    msg << obs.platform << "/" << obs.kernel << " n_side=" << obs.n_side << ": r = " << out.r
        << " exceeds the roof; peaks and sample are inconsistent";
    throw Error(msg.str());
  }
  if (out.r > 1.0) {
    std::ostringstream msg;
    msg << obs.platform << "/" << obs.kernel << " n_side=" << obs.n_side << ": r = " << out.r
        << " clipped to 1 (measurement noise)";
    out.warning = msg.str();
    out.r = 1.0;
    out.clipped = true;
  }
  return out;
}

namespace {

void checkRange(std::span<const double> rs) {
  for (double r : rs) {
    if (!(r >= 0.0 && r <= 1.0)) {
      std::ostringstream msg;
      msg << "relative performance " << r << " outside [0, 1]";
      throw ConfigError(msg.str());
    }
  }
}

}  // namespace

double pp1(std::span<const double> rs) {
  checkRange(rs);
  if (rs.empty()) throw ConfigError("PP1 over an empty platform set is undefined");
  double inv = 0.0;
  for (double r : rs) {
    if (r == 0.0) return 0.0;
    inv += 1.0 / r;
  }
  return static_cast<double>(rs.size()) / inv;
}

double pp2(std::span<const double> rs) {
  checkRange(rs);
  if (rs.empty()) return 0.0;
  double sum = 0.0;
  for (double r : rs) sum += r;
  return sum / static_cast<double>(rs.size());
}

std::vector<PpPoint> PpReport::table(int n_side) const {
  std::vector<PpPoint> rows;
  for (const auto& p : points) {
    if (p.n_side == n_side) rows.push_back(p);
  }
  return rows;
}

int PpReport::tableSize() const {
  std::map<std::string, std::set<int>> sizes;
  for (const auto& p : points) sizes[p.kernel].insert(p.n_side);
  if (sizes.empty()) return 0;
  int best = 0;
  for (int n : sizes.begin()->second) {
    const bool everywhere =
        std::all_of(sizes.begin(), sizes.end(), [n](const auto& kv) { return kv.second.count(n) > 0; });
    if (everywhere) best = std::max(best, n);
  }
  return best;
}

PpReport ppSweep(std::span<const PlatformObservation> observations, std::span<const std::string> platforms) {
  PpReport rep;
  rep.platforms.assign(platforms.begin(), platforms.end());
  const std::set<std::string> platform_set(platforms.begin(), platforms.end());
  if (platform_set.size() != platforms.size()) throw ConfigError("platform set contains duplicates");

  using Key = std::pair<std::string, int>;
  std::map<Key, std::map<std::string, double>> grouped;
  for (const auto& obs : observations) {
    const Key key{obs.kernel, obs.n_side};
    auto& by_platform = grouped[key];
    if (!platform_set.count(obs.platform)) continue;
    const RelativePerformance rp = relativePerformance(obs);
    if (rp.clipped) rep.warnings.push_back(rp.warning);
    if (!by_platform.emplace(obs.platform, rp.r).second) {
      throw ConfigError("duplicate observation for " + obs.platform + "/" + obs.kernel +
                        " n_side=" + std::to_string(obs.n_side));
    }
  }

  for (const auto& [key, by_platform] : grouped) {
    PpPoint pt;
    pt.kernel = key.first;
    pt.n_side = key.second;
    pt.r = by_platform;
    for (const auto& name : platforms) {
      if (!by_platform.count(name)) pt.missing_platforms.push_back(name);
    }
    if (platforms.empty()) {
      pt.pp1 = 0.0;
      pt.pp2 = 0.0;
    } else if (!pt.missing_platforms.empty()) {
      std::string note = pt.kernel + " n_side=" + std::to_string(pt.n_side) + ": no observation for";
      for (const auto& m : pt.missing_platforms) note += " " + m;
      rep.warnings.push_back(note + "; scored as zero");
    } else {
      std::vector<double> rs;
      for (const auto& name : platforms) rs.push_back(by_platform.at(name));
      pt.pp1 = pp1(rs);
      pt.pp2 = pp2(rs);
    }
    rep.points.push_back(std::move(pt));
  }
  return rep;
}

namespace {

double parseField(const std::string& s, const std::string& what, int lineno) {
  std::size_t used = 0;
  try {
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("observations CSV line " + std::to_string(lineno) + ": bad " + what + " '" + s + "'");
}

}  // namespace

std::vector<PlatformObservation> parseObservationsCsv(const std::string& text, std::span<const PlatformPeaks> peaks) {
  static const std::vector<std::string> kHeader{"platform", "kernel", "n_side", "p_achieved_gflops",
                                                "a_achieved_flops_per_byte"};
  std::istringstream in(text);
  std::string line;
  std::vector<PlatformObservation> out;
  bool header = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const auto cells = splitCsvLine(line);
    if (header) {
      if (cells != kHeader) {
        throw ConfigError("observations CSV header must be platform,kernel,n_side,p_achieved_gflops,"
                          "a_achieved_flops_per_byte");
      }
      header = false;
      continue;
    }
    if (cells.size() != kHeader.size()) {
      throw ConfigError("observations CSV line " + std::to_string(lineno) + ": expected 5 columns");
    }
    PlatformObservation obs;
    obs.platform = cells[0];
    obs.kernel = cells[1];
    const double n = parseField(cells[2], "n_side", lineno);
    if (n < 1 || n != std::floor(n)) throw ConfigError("observations CSV line " + std::to_string(lineno) + ": bad n_side");
    obs.n_side = static_cast<int>(n);
    obs.p_achieved = parseField(cells[3], "p_achieved_gflops", lineno) * 1e9;
    obs.a_achieved = parseField(cells[4], "a_achieved_flops_per_byte", lineno);
    if (!(obs.p_achieved > 0.0) || !(obs.a_achieved > 0.0)) {
      throw ConfigError("observations CSV line " + std::to_string(lineno) + ": values must be positive");
    }
    const auto it = std::find_if(peaks.begin(), peaks.end(), [&](const PlatformPeaks& p) { return p.platform == obs.platform; });
    if (it == peaks.end()) throw ConfigError("no peaks for platform '" + obs.platform + "'");
    obs.peaks = *it;
    out.push_back(std::move(obs));
  }
  if (header) throw ConfigError("observations CSV is empty");
  return out;
}

std::vector<PlatformObservation> readObservationsCsv(const std::filesystem::path& path,
                                                     std::span<const PlatformPeaks> peaks) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parseObservationsCsv(ss.str(), peaks);
}

void writeObservationsCsv(const std::filesystem::path& path, std::span<const PlatformObservation> obs) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17) << "platform,kernel,n_side,p_achieved_gflops,a_achieved_flops_per_byte\n";
  for (const auto& o : obs) {
    out << o.platform << ',' << o.kernel << ',' << o.n_side << ',' << o.p_achieved / 1e9 << ',' << o.a_achieved << '\n';
  }
}

void writePpReportCsv(const std::filesystem::path& path, const PpReport& report) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << std::setprecision(17) << "kernel,n_side,pp1,pp2,missing\n";
  for (const auto& p : report.points) {
    std::string missing;
    for (const auto& m : p.missing_platforms) missing += (missing.empty() ? "" : ";") + m;
    out << p.kernel << ',' << p.n_side << ',' << p.pp1 << ',' << p.pp2 << ',' << missing << '\n';
  }
}

std::string ppReportJson(const PpReport& report) {
  nlohmann::ordered_json j;
  j["platforms"] = report.platforms;
  auto series = nlohmann::ordered_json::object();
  for (const auto& p : report.points) {
    nlohmann::ordered_json row{{"n_side", p.n_side}, {"pp1", p.pp1}, {"pp2", p.pp2}, {"r", p.r}};
    if (!p.missing_platforms.empty()) row["missing"] = p.missing_platforms;
    series[p.kernel].push_back(row);
  }
  j["series"] = series;
  const int n = report.tableSize();
  auto table = nlohmann::ordered_json::array();
  for (const auto& p : report.table(n)) table.push_back({{"kernel", p.kernel}, {"pp1", p.pp1}, {"pp2", p.pp2}});
  j["table"] = {{"n_side", n}, {"rows", table}};
  j["warnings"] = report.warnings;
  return j.dump(2);
}

std::string formatPortabilityTable(const PpReport& report, int n_side) {
  std::ostringstream out;
  out << std::left << std::setw(28) << "kernel" << std::right << std::setw(8) << "PP1" << std::setw(8) << "PP2" << '\n';
  out << std::fixed << std::setprecision(4);
  for (const auto& p : report.table(n_side)) {
    out << std::left << std::setw(28) << p.kernel << std::right << std::setw(8) << p.pp1 << std::setw(8) << p.pp2
        << '\n';
  }
  return out.str();
}

}  // namespace swe
