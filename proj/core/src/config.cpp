#include "evgate/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include <fmt/core.h>

#include "evgate/errors.hpp"

namespace evgate {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view name, std::string_view v) {
  // std::from_chars for double is not available on every libstdc++ we target.
  std::string s(v);
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) {
    throw DataError(fmt::format("config field '{}': '{}' is not a number", name, v));
  }
  return out;
}

template <typename Int>
Int parse_int(std::string_view name, std::string_view v) {
  Int out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc{} || ptr != v.data() + v.size()) {
    throw DataError(fmt::format("config field '{}': '{}' is not an integer", name, v));
  }
  return out;
}

bool parse_bool(std::string_view name, std::string_view v) {
  if (v == "true" || v == "1" || v == "on") return true;
  if (v == "false" || v == "0" || v == "off") return false;
  throw DataError(fmt::format("config field '{}': '{}' is not a boolean", name, v));
}

struct Field {
  std::string name;
  std::function<double(const Config&)> get;
  std::function<void(Config&, std::string_view)> set;
  std::function<std::string(const Config&)> print;
};

template <double Config::*M>
Field real(std::string name) {
  return {name, [](const Config& c) { return c.*M; },
          [name](Config& c, std::string_view v) { c.*M = parse_double(name, v); },
          [](const Config& c) { return fmt::format("{}", c.*M); }};
}

template <int Config::*M>
Field integer(std::string name) {
  return {name, [](const Config& c) { return static_cast<double>(c.*M); },
          [name](Config& c, std::string_view v) { c.*M = parse_int<int>(name, v); },
          [](const Config& c) { return fmt::format("{}", c.*M); }};
}

template <bool Config::*M>
Field flag(std::string name) {
  return {name, [](const Config& c) { return c.*M ? 1.0 : 0.0; },
          [name](Config& c, std::string_view v) { c.*M = parse_bool(name, v); },
          [](const Config& c) { return std::string(c.*M ? "true" : "false"); }};
}

template <bool Toggles::*M>
Field toggle(std::string name) {
  return {name, [](const Config& c) { return c.toggles.*M ? 1.0 : 0.0; },
          [name](Config& c, std::string_view v) { c.toggles.*M = parse_bool(name, v); },
          [](const Config& c) { return std::string(c.toggles.*M ? "true" : "false"); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      real<&Config::tau_base>("tau_base"),
      real<&Config::tau_tile>("tau_tile"),
      integer<&Config::tile_size>("tile_size"),
      integer<&Config::tile_overlap>("tile_overlap"),
      real<&Config::spatial_eps_multiplier>("spatial_eps_multiplier"),
      integer<&Config::spatial_min_samples>("spatial_min_samples"),
      real<&Config::semantic_eps>("semantic_eps"),
      integer<&Config::semantic_min_samples>("semantic_min_samples"),
      real<&Config::quality_w1>("quality_w1"),
      real<&Config::quality_w2>("quality_w2"),
      real<&Config::quality_threshold>("quality_threshold"),
      real<&Config::beta>("beta"),
      real<&Config::nms_iou>("nms_iou"),
      flag<&Config::complete_coverage>("complete_coverage"),
      flag<&Config::tile_edge_filter>("tile_edge_filter"),
      toggle<&Toggles::tiling>("tiling"),
      toggle<&Toggles::spatial>("spatial"),
      toggle<&Toggles::semantic>("semantic"),
      toggle<&Toggles::reweighting>("reweighting"),
      Field{"seed", [](const Config& c) { return static_cast<double>(c.seed); },
            [](Config& c, std::string_view v) { c.seed = parse_int<std::uint64_t>("seed", v); },
            [](const Config& c) { return fmt::format("{}", c.seed); }},
  };
  return table;
}

const Field& field(std::string_view name) {
  for (const auto& f : fields()) {
    if (f.name == name) return f;
  }
  throw DataError(fmt::format("unknown config field '{}'", name));
}

void require_unit(std::string_view name, double v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DataError(fmt::format("config field '{}' = {} must lie in [0,1]", name, v));
  }
}

}  // namespace

void Config::validate() const {
  require_unit("tau_base", tau_base);
  require_unit("tau_tile", tau_tile);
  require_unit("quality_threshold", quality_threshold);
  if (!(nms_iou > 0.0 && nms_iou < 1.0)) {
    throw DataError(fmt::format("config field 'nms_iou' = {} must lie in (0,1)", nms_iou));
  }
  if (tile_size <= 0 || tile_overlap < 0 || tile_overlap >= tile_size) {
    throw DataError(fmt::format("tile_overlap ({}) must be in [0, tile_size ({}))",
                                tile_overlap, tile_size));
  }
  if (!(spatial_eps_multiplier > 0.0)) {
    throw DataError("config field 'spatial_eps_multiplier' must be positive");
  }
  if (!(semantic_eps > 0.0 && semantic_eps < 2.0)) {
    throw DataError("config field 'semantic_eps' must lie in (0,2)");
  }
  if (spatial_min_samples < 1 || semantic_min_samples < 1) {
    throw DataError("min_samples fields must be >= 1");
  }
  if (!(beta >= 0.0)) throw DataError("config field 'beta' must be >= 0");
}

const std::vector<std::string>& config_field_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.push_back(f.name);
    return out;
  }();
  return names;
}

double config_field_value(const Config& cfg, std::string_view name) {
  return field(name).get(cfg);
}

void set_config_field(Config& cfg, std::string_view name, std::string_view value) {
  field(name).set(cfg, value);
}

std::vector<KeyValue> parse_key_values(std::string_view text, std::string_view origin) {
  std::vector<KeyValue> out;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto end = text.find('\n', pos);
    std::string_view line = text.substr(pos, end == std::string_view::npos ? text.npos : end - pos);
    pos = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw DataError(fmt::format("{}:{}: expected 'key = value'", origin, line_no));
    }
    out.push_back(KeyValue{std::string(trim(line.substr(0, eq))),
                           std::string(trim(line.substr(eq + 1))), line_no});
  }
  return out;
}

Config parse_config(std::string_view text, std::string_view origin) {
  Config cfg;
  for (const auto& kv : parse_key_values(text, origin)) {
    try {
      set_config_field(cfg, kv.key, kv.value);
    } catch (const DataError& e) {
      throw DataError(fmt::format("{}:{}: {}", origin, kv.line, e.what()));
    }
  }
  cfg.validate();
  return cfg;
}

Config load_config(const std::string& path) {
  if (path == "default") return Config{};
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open config file '{}'", path));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string to_config_text(const Config& cfg) {
  std::string out;
  for (const auto& f : fields()) out += fmt::format("{} = {}\n", f.name, f.print(cfg));
  return out;
}

}  // namespace evgate
