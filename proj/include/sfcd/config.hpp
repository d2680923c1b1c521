#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace sfcd {

enum class InitMethod { percentile, kmeans_like, fixed };
enum class SpatialVariant { none, neighbor, intensity };

std::string_view to_string(InitMethod method);
std::string_view to_string(SpatialVariant variant);
SpatialVariant parse_spatial_variant(std::string_view text);

/// Every tunable of the clustering run.
struct SfcmConfig {
  int clusters = 2;
  double m = 2.0;           ///< fuzzification exponent, > 1
  double p = 1.0;           ///< exponent on the pixel's own membership
  double q = 1.0;           ///< exponent on the spatial function
  int window_radius = 1;    ///< neighborhood is (2r+1) x (2r+1)
  double epsilon = 1e-5;    ///< stop once the max membership change drops below this
  int max_iter = 100;
  InitMethod init = InitMethod::kmeans_like;
  std::vector<double> fixed_centers;  ///< used when init == fixed
  SpatialVariant spatial_variant = SpatialVariant::neighbor;
  int intensity_levels = 256;
  std::uint64_t seed = 0;

  /// Throws InputError describing the first violated constraint.
  void validate() const;

  friend bool operator==(const SfcmConfig&, const SfcmConfig&) = default;
};

/// Parses the key=value format: one key per line, `#` starts a comment,
/// blank lines ignored. Keys not given keep their defaults. Unknown or
/// repeated keys and malformed values throw InputError with the line number.
SfcmConfig parse_config(std::string_view text);

/// Reads and parses a config file; errors carry the path.
SfcmConfig load_config(const std::filesystem::path& path);

/// Writes every key in canonical order; parse_config(serialize_config(c)) == c.
std::string serialize_config(const SfcmConfig& config);

}  // namespace sfcd
