#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "sfcd/config.hpp"
#include "sfcd/grid.hpp"

namespace sfcd {

/// Axis-aligned rectangle [x, x + width) x [y, y + height).
struct Rect {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t width = 0;
  std::size_t height = 0;
};

/// Closed disk: pixels whose centers satisfy (px - cx)^2 + (py - cy)^2 <= r^2.
struct Disk {
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;
};

/// A changed region. `after_level` overrides the phantom's high level
/// inside this shape; later shapes win where they overlap.
struct ChangeShape {
  enum class Kind { rect, disk } kind = Kind::rect;
  Rect rect;
  Disk disk;
  std::optional<double> after_level;

  static ChangeShape rectangle(std::size_t x, std::size_t y, std::size_t w, std::size_t h) {
    ChangeShape s;
    s.kind = Kind::rect;
    s.rect = {x, y, w, h};
    return s;
  }
  static ChangeShape circle(double cx, double cy, double r) {
    ChangeShape s;
    s.kind = Kind::disk;
    s.disk = {cx, cy, r};
    return s;
  }

  bool contains(std::size_t px, std::size_t py) const;
};

struct Phantom {
  Image before;
  Image after;
  LabelMap truth;  ///< 1 inside any shape
};

struct BaseLevels {
  double low = 0.0;
  double high = 0.0;
};

/// Noise-free pair: `before` is constant at levels.low; `after` matches it
/// except inside the shapes, where it takes levels.high (or the shape's own
/// level). Throws InputError if a shape does not fit inside the grid.
Phantom make_phantom(std::size_t width, std::size_t height, const std::vector<ChangeShape>& shapes,
                     BaseLevels levels);

/// Multiplies each pixel by an independent Gamma(looks, 1/looks) factor
/// (unit mean, variance 1/looks). Deterministic for a given seed.
Image add_speckle(const Image& image, int looks, std::uint64_t seed);

/// Speckles both acquisitions of `phantom` with independent streams derived
/// from `seed`.
Phantom speckle_phantom(const Phantom& phantom, int looks, std::uint64_t seed);

/// The fixed benchmark scene: 128 x 128, levels (20, 400), one large
/// rectangle, one disk and a 3 x 3 block.
Phantom standard_phantom();

/// The 3 x 3 block of standard_phantom().
Rect standard_small_block();

struct DetectionMetrics {
  double overall_accuracy = 0.0;
  double kappa = 0.0;
  std::size_t false_alarms = 0;       ///< predicted changed, truly unchanged
  std::size_t missed_detections = 0;  ///< predicted unchanged, truly changed
};

/// Confusion-matrix scores of a binary prediction. Throws InputError on
/// shape mismatch or non-binary maps.
DetectionMetrics score(const LabelMap& predicted, const LabelMap& truth);

/// Fraction of truly changed pixels inside `region` that are predicted
/// changed.
double region_recall(const LabelMap& predicted, const LabelMap& truth, const Rect& region);

/// Converts a 0/1 change map image into a binary LabelMap.
LabelMap binary_labels(const Image& change_map);

/// CSV with header `oa,kappa,fa,md` and one row.
void write_metrics_csv(std::ostream& out, const DetectionMetrics& metrics);

struct BenchRow {
  std::uint64_t seed = 0;
  int looks = 0;
  SpatialVariant variant = SpatialVariant::none;
  DetectionMetrics metrics;
  double small_region_recall = 0.0;
  std::optional<std::string> failure;  ///< set when the run raised a NumericalError
};

/// For every seed base_seed .. base_seed + seeds - 1 and every entry of
/// `looks`: speckles the standard phantom, clusters its unquantized
/// difference image with plain FCM, neighbor and intensity variants (other
/// settings from cfg), and scores each against the truth.
std::vector<BenchRow> run_bench(const SfcmConfig& cfg, std::size_t seeds, std::uint64_t base_seed,
                                const std::vector<int>& looks);

/// CSV with header `seed,looks,variant,oa,kappa,fa,md,small_region_recall`.
/// Failed rows carry `nan` metrics.
void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows);

}  // namespace sfcd
