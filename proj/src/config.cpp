#include "steel/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "steel/manifest.hpp"

namespace steel {
namespace {

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key, "expected a number, got '" + v + "'");
  return out;
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key, "expected true or false, got '" + v + "'");
}

std::string format(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

struct Field {
  std::function<void(InspectConfig&, const std::string&)> set;
  std::function<std::string(const InspectConfig&)> get;
};

template <typename Get>
Field real(Get member) {
  return {[member](InspectConfig& c, const std::string& v) { member(c) = parse_double("", v); },
          [member](const InspectConfig& c) { return format(member(const_cast<InspectConfig&>(c))); }};
}

template <typename Get>
Field integer(Get member) {
  return {[member](InspectConfig& c, const std::string& v) { member(c) = parse_int("", v); },
          [member](const InspectConfig& c) { return std::to_string(member(const_cast<InspectConfig&>(c))); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    t["mu"] = real([](InspectConfig& c) -> double& { return c.segmentation.line.mu; });
    t["sigma1"] = real([](InspectConfig& c) -> double& { return c.segmentation.line.bank.sigma1; });
    t["scale_factor"] = real([](InspectConfig& c) -> double& { return c.segmentation.line.bank.factor; });
    t["num_scales"] = integer([](InspectConfig& c) -> int& { return c.segmentation.line.bank.count; });
    t["scale_normalization"] = {
        [](InspectConfig& c, const std::string& v) {
          if (v == "per_scale") {
            c.segmentation.line.normalization = ScaleNormalization::per_scale;
          } else if (v == "min_scale") {
            c.segmentation.line.normalization = ScaleNormalization::min_scale;
          } else {
            throw ConfigError("scale_normalization", "expected per_scale or min_scale, got '" + v + "'");
          }
        },
        [](const InspectConfig& c) {
          return std::string(c.segmentation.line.normalization == ScaleNormalization::per_scale ? "per_scale"
                                                                                                 : "min_scale");
        }};
    t["gating_quantile"] = real([](InspectConfig& c) -> double& { return c.segmentation.gating_quantile; });
    t["min_area"] = integer([](InspectConfig& c) -> int& { return c.segmentation.min_area; });
    t["tau"] = real([](InspectConfig& c) -> double& { return c.stitch.tau; });
    t["search_radius"] = integer([](InspectConfig& c) -> int& { return c.stitch.search_radius; });
    t["min_overlap"] = real([](InspectConfig& c) -> double& { return c.stitch.min_overlap; });
    t["compensate_exposure"] = {
        [](InspectConfig& c, const std::string& v) { c.stitch.compensate_exposure = parse_bool("compensate_exposure", v); },
        [](const InspectConfig& c) { return std::string(c.stitch.compensate_exposure ? "true" : "false"); }};
    t["mm_per_pixel"] = real([](InspectConfig& c) -> double& { return c.mm_per_pixel; });
    t["icp.subsample_ratio"] = real([](InspectConfig& c) -> double& { return c.icp.subsample_ratio; });
    t["icp.max_correspondence"] = real([](InspectConfig& c) -> double& { return c.icp.max_correspondence; });
    t["icp.max_iterations"] = integer([](InspectConfig& c) -> int& { return c.icp.max_iterations; });
    t["icp.rmse_floor"] = real([](InspectConfig& c) -> double& { return c.icp.rmse_floor; });
    t["icp.rmse_delta_floor"] = real([](InspectConfig& c) -> double& { return c.icp.rmse_delta_floor; });
    t["icp.motion_epsilon"] = real([](InspectConfig& c) -> double& { return c.icp.motion_epsilon; });
    t["icp.max_rotation"] = real([](InspectConfig& c) -> double& { return c.icp.max_rotation; });
    t["icp.max_translation"] = real([](InspectConfig& c) -> double& { return c.icp.max_translation; });
    t["sim.weight"] = real([](InspectConfig& c) -> double& { return c.robot.weight; });
    t["sim.magnetic_force"] = real([](InspectConfig& c) -> double& { return c.robot.magnetic_force; });
    t["sim.friction"] = real([](InspectConfig& c) -> double& { return c.robot.friction; });
    t["sim.com_height"] = real([](InspectConfig& c) -> double& { return c.robot.com_height; });
    t["sim.wheelbase"] = real([](InspectConfig& c) -> double& { return c.robot.wheelbase; });
    t["sim.track"] = real([](InspectConfig& c) -> double& { return c.robot.track; });
    t["sim.dt"] = real([](InspectConfig& c) -> double& { return c.sim.dt; });
    t["sim.speed"] = real([](InspectConfig& c) -> double& { return c.sim.speed; });
    t["sim.retreat"] = real([](InspectConfig& c) -> double& { return c.sim.retreat; });
    t["sim.turn_arc"] = real([](InspectConfig& c) -> double& { return c.sim.turn_arc; });
    t["sim.capture_interval"] = real([](InspectConfig& c) -> double& { return c.sim.capture_interval; });
    t["ir_epsilon"] = real([](InspectConfig& c) -> double& { return c.sim.ir_epsilon; });
    return t;
  }();
  return table;
}

}  // namespace

void set_config_value(InspectConfig& cfg, const std::string& key, const std::string& value) {
  const auto it = fields().find(key);
  if (it == fields().end()) throw ConfigError(key, "unknown key");
  try {
    it->second.set(cfg, value);
  } catch (const ConfigError& e) {
    if (!e.field().empty()) throw;
    throw ConfigError(key, std::string(e.what()).substr(2));
  }
}

std::map<std::string, std::string> config_values(const InspectConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& [key, field] : fields()) out[key] = field.get(cfg);
  return out;
}

void InspectConfig::validate() const {
  segmentation.validate();
  stitch.validate();
  if (!(mm_per_pixel > 0.0)) throw ConfigError("mm_per_pixel", "must be > 0");
  icp.validate();
  robot.validate();
  sim.validate();
}

std::string InspectConfig::canonical() const {
  std::string out;
  for (const auto& [key, value] : config_values(*this)) out += key + " = " + value + "\n";
  return out;
}

std::string InspectConfig::hash() const { return sha256_hex(canonical()); }

InspectConfig parse_config(const std::string& text, const std::string& origin) {
  InspectConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno), "expected 'key = value'");
    }
    set_config_value(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void apply_env_overrides(InspectConfig& cfg) {
  for (const auto& [key, field] : fields()) {
    std::string name = kEnvPrefix;
    for (char c : key) name += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = std::getenv(name.c_str())) set_config_value(cfg, key, trim(v));
  }
}

InspectConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open config");
  std::stringstream ss;
  ss << in.rdbuf();
  InspectConfig cfg = parse_config(ss.str(), path.string());
  apply_env_overrides(cfg);
  cfg.validate();
  return cfg;
}

InspectConfig default_config() {
  InspectConfig cfg;
  apply_env_overrides(cfg);
  cfg.validate();
  return cfg;
}

}  // namespace steel
