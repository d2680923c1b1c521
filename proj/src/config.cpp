#include "sfcd/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "sfcd/errors.hpp"
#include "sfcd/format.hpp"

namespace sfcd {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_line(int line, const std::string& message) {
  throw InputError("config line " + std::to_string(line) + ": " + message);
}

double parse_double(std::string_view text, int line, std::string_view key) {
  text = trim(text);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(value)) {
    bad_line(line, "invalid number '" + std::string(text) + "' for key '" + std::string(key) + "'");
  }
  return value;
}

template <typename Int>
Int parse_integer(std::string_view text, int line, std::string_view key) {
  text = trim(text);
  Int value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    bad_line(line, "invalid integer '" + std::string(text) + "' for key '" + std::string(key) + "'");
  }
  return value;
}

void parse_init(std::string_view text, int line, SfcmConfig& cfg) {
  if (text == "percentile") {
    cfg.init = InitMethod::percentile;
    cfg.fixed_centers.clear();
    return;
  }
  if (text == "kmeans-like") {
    cfg.init = InitMethod::kmeans_like;
    cfg.fixed_centers.clear();
    return;
  }
  constexpr std::string_view prefix = "fixed(";
  if (text.substr(0, prefix.size()) == prefix && text.back() == ')') {
    auto body = text.substr(prefix.size(), text.size() - prefix.size() - 1);
    cfg.init = InitMethod::fixed;
    cfg.fixed_centers.clear();
    while (!body.empty()) {
      const auto comma = body.find(',');
      cfg.fixed_centers.push_back(parse_double(body.substr(0, comma), line, "init"));
      if (comma == std::string_view::npos) break;
      body.remove_prefix(comma + 1);
    }
    return;
  }
  bad_line(line, "init must be percentile, kmeans-like or fixed(v1, v2, ...), got '" +
                     std::string(text) + "'");
}

}  // namespace

std::string_view to_string(InitMethod method) {
  switch (method) {
    case InitMethod::percentile: return "percentile";
    case InitMethod::kmeans_like: return "kmeans-like";
    case InitMethod::fixed: return "fixed";
  }
  return "?";
}

std::string_view to_string(SpatialVariant variant) {
  switch (variant) {
    case SpatialVariant::none: return "none";
    case SpatialVariant::neighbor: return "neighbor";
    case SpatialVariant::intensity: return "intensity";
  }
  return "?";
}

SpatialVariant parse_spatial_variant(std::string_view text) {
  if (text == "none") return SpatialVariant::none;
  if (text == "neighbor") return SpatialVariant::neighbor;
  if (text == "intensity") return SpatialVariant::intensity;
  throw InputError("spatial_variant must be none, neighbor or intensity, got '" + std::string(text) +
                   "'");
}

void SfcmConfig::validate() const {
  auto require = [](bool ok, const char* message) {
    if (!ok) throw InputError(std::string("invalid config: ") + message);
  };
  require(clusters >= 2, "c must be >= 2");
  require(std::isfinite(m) && m > 1.0, "m must be > 1");
  require(std::isfinite(p) && p >= 0.0, "p must be >= 0");
  require(std::isfinite(q) && q >= 0.0, "q must be >= 0");
  require(p + q > 0.0, "p + q must be > 0");
  require(window_radius >= 1, "window_radius must be >= 1");
  require(std::isfinite(epsilon) && epsilon > 0.0, "epsilon must be > 0");
  require(max_iter >= 1, "max_iter must be >= 1");
  require(intensity_levels >= 1, "intensity_levels must be >= 1");
  if (init == InitMethod::fixed) {
    require(fixed_centers.size() == static_cast<std::size_t>(clusters),
            "fixed init needs exactly c centers");
  }
}

SfcmConfig parse_config(std::string_view text) {
  SfcmConfig cfg;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text.remove_prefix(eol == std::string_view::npos ? text.size() : eol + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) bad_line(line_no, "expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (value.empty()) bad_line(line_no, "missing value for key '" + std::string(key) + "'");
    if (!seen.emplace(key).second) bad_line(line_no, "duplicate key '" + std::string(key) + "'");

    if (key == "c") {
      cfg.clusters = parse_integer<int>(value, line_no, key);
    } else if (key == "m") {
      cfg.m = parse_double(value, line_no, key);
    } else if (key == "p") {
      cfg.p = parse_double(value, line_no, key);
    } else if (key == "q") {
      cfg.q = parse_double(value, line_no, key);
    } else if (key == "window_radius") {
      cfg.window_radius = parse_integer<int>(value, line_no, key);
    } else if (key == "epsilon") {
      cfg.epsilon = parse_double(value, line_no, key);
    } else if (key == "max_iter") {
      cfg.max_iter = parse_integer<int>(value, line_no, key);
    } else if (key == "init") {
      parse_init(value, line_no, cfg);
    } else if (key == "spatial_variant") {
      try {
        cfg.spatial_variant = parse_spatial_variant(value);
      } catch (const InputError& e) {
        bad_line(line_no, e.what());
      }
    } else if (key == "intensity_levels") {
      cfg.intensity_levels = parse_integer<int>(value, line_no, key);
    } else if (key == "seed") {
      cfg.seed = parse_integer<std::uint64_t>(value, line_no, key);
    } else {
      bad_line(line_no, "unknown config key '" + std::string(key) + "'");
    }
  }
  cfg.validate();
  return cfg;
}

SfcmConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string() + ": cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_config(buffer.str());
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::string serialize_config(const SfcmConfig& cfg) {
  std::ostringstream out;
  out << "c = " << cfg.clusters << '\n'
      << "m = " << format_number(cfg.m) << '\n'
      << "p = " << format_number(cfg.p) << '\n'
      << "q = " << format_number(cfg.q) << '\n'
      << "window_radius = " << cfg.window_radius << '\n'
      << "epsilon = " << format_number(cfg.epsilon) << '\n'
      << "max_iter = " << cfg.max_iter << '\n'
      << "init = ";
  if (cfg.init == InitMethod::fixed) {
    out << "fixed(";
    for (std::size_t i = 0; i < cfg.fixed_centers.size(); ++i) {
      out << (i ? ", " : "") << format_number(cfg.fixed_centers[i]);
    }
    out << ')';
  } else {
    out << to_string(cfg.init);
  }
  out << '\n'
      << "spatial_variant = " << to_string(cfg.spatial_variant) << '\n'
      << "intensity_levels = " << cfg.intensity_levels << '\n'
      << "seed = " << cfg.seed << '\n';
  return out.str();
}

}  // namespace sfcd
