#include "sfcd/synth.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <string>

#include "sfcd/diff_image.hpp"
#include "sfcd/errors.hpp"
#include "sfcd/format.hpp"
#include "sfcd/sfcm.hpp"

namespace sfcd {

namespace {

// SplitMix64 finalizer; decorrelates the per-acquisition streams.
std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

void check_fits(const ChangeShape& shape, std::size_t width, std::size_t height) {
  bool ok = true;
  if (shape.kind == ChangeShape::Kind::rect) {
    const auto& r = shape.rect;
    ok = r.width > 0 && r.height > 0 && r.x + r.width <= width && r.y + r.height <= height;
  } else {
    const auto& d = shape.disk;
    ok = d.radius >= 0.0 && d.cx - d.radius >= 0.0 && d.cy - d.radius >= 0.0 &&
         d.cx + d.radius <= static_cast<double>(width - 1) &&
         d.cy + d.radius <= static_cast<double>(height - 1);
  }
  if (!ok) {
    throw InputError("shape does not fit inside the " + std::to_string(width) + "x" +
                     std::to_string(height) + " grid");
  }
}

void require_binary(const LabelMap& map, const char* name) {
  for (auto label : map.labels()) {
    if (label > 1) throw InputError(std::string(name) + " is not a binary map");
  }
}

}  // namespace

bool ChangeShape::contains(std::size_t px, std::size_t py) const {
  if (kind == Kind::rect) {
    return px >= rect.x && px < rect.x + rect.width && py >= rect.y && py < rect.y + rect.height;
  }
  const double dx = static_cast<double>(px) - disk.cx;
  const double dy = static_cast<double>(py) - disk.cy;
  return dx * dx + dy * dy <= disk.radius * disk.radius;
}

Phantom make_phantom(std::size_t width, std::size_t height, const std::vector<ChangeShape>& shapes,
                     BaseLevels levels) {
  if (!(levels.low >= 0.0) || !(levels.high >= 0.0)) {
    throw InputError("phantom levels must be non-negative");
  }
  for (const auto& s : shapes) check_fits(s, width, height);

  std::vector<double> after(width * height, levels.low);
  std::vector<LabelMap::Label> truth(width * height, 0);
  for (const auto& s : shapes) {
    const double level = s.after_level.value_or(levels.high);
    for (std::size_t y = 0; y < height; ++y) {
      for (std::size_t x = 0; x < width; ++x) {
        if (!s.contains(x, y)) continue;
        after[y * width + x] = level;
        truth[y * width + x] = 1;
      }
    }
  }
  return Phantom{Image(width, height, levels.low), Image(width, height, std::move(after)),
                 LabelMap(width, height, std::move(truth), 2)};
}

Image add_speckle(const Image& image, int looks, std::uint64_t seed) {
  if (looks < 1) throw InputError("looks must be >= 1");
  std::mt19937_64 rng(seed);
  std::gamma_distribution<double> factor(static_cast<double>(looks), 1.0 / looks);
  std::vector<double> out(image.size());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = image[j] * factor(rng);
  return Image(image.width(), image.height(), std::move(out));
}

Phantom speckle_phantom(const Phantom& phantom, int looks, std::uint64_t seed) {
  return Phantom{add_speckle(phantom.before, looks, mix_seed(2 * seed)),
                 add_speckle(phantom.after, looks, mix_seed(2 * seed + 1)), phantom.truth};
}

Rect standard_small_block() { return Rect{30, 100, 3, 3}; }

Phantom standard_phantom() {
  const Rect block = standard_small_block();
  return make_phantom(128, 128,
                      {ChangeShape::rectangle(12, 14, 40, 30), ChangeShape::circle(88.0, 80.0, 18.0),
                       ChangeShape::rectangle(block.x, block.y, block.width, block.height)},
                      BaseLevels{20.0, 400.0});
}

DetectionMetrics score(const LabelMap& predicted, const LabelMap& truth) {
  if (!predicted.same_shape(truth)) throw InputError("prediction and truth shapes differ");
  require_binary(predicted, "prediction");
  require_binary(truth, "truth");

  std::size_t tp = 0, tn = 0, fp = 0, fn = 0;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    const bool pred = predicted[j] == 1;
    const bool real = truth[j] == 1;
    if (pred && real) ++tp;
    else if (!pred && !real) ++tn;
    else if (pred) ++fp;
    else ++fn;
  }
  const auto n = static_cast<double>(truth.size());
  const double observed = static_cast<double>(tp + tn) / n;
  const double expected = (static_cast<double>(tp + fp) * static_cast<double>(tp + fn) +
                           static_cast<double>(tn + fn) * static_cast<double>(tn + fp)) /
                          (n * n);
  DetectionMetrics m;
  m.overall_accuracy = observed;
  // Chance agreement of 1 only happens when both maps are the same constant.
  m.kappa = expected == 1.0 ? 1.0 : (observed - expected) / (1.0 - expected);
  m.false_alarms = fp;
  m.missed_detections = fn;
  return m;
}

double region_recall(const LabelMap& predicted, const LabelMap& truth, const Rect& region) {
  if (!predicted.same_shape(truth)) throw InputError("prediction and truth shapes differ");
  if (region.x + region.width > truth.width() || region.y + region.height > truth.height()) {
    throw InputError("recall region outside the map");
  }
  std::size_t positives = 0;
  std::size_t hits = 0;
  for (std::size_t y = region.y; y < region.y + region.height; ++y) {
    for (std::size_t x = region.x; x < region.x + region.width; ++x) {
      const std::size_t j = y * truth.width() + x;
      if (truth[j] != 1) continue;
      ++positives;
      if (predicted[j] == 1) ++hits;
    }
  }
  return positives == 0 ? 1.0 : static_cast<double>(hits) / static_cast<double>(positives);
}

LabelMap binary_labels(const Image& change_map) {
  std::vector<LabelMap::Label> labels(change_map.size());
  for (std::size_t j = 0; j < labels.size(); ++j) labels[j] = change_map[j] > 0.0 ? 1 : 0;
  return LabelMap(change_map.width(), change_map.height(), std::move(labels), 2);
}

void write_metrics_csv(std::ostream& out, const DetectionMetrics& m) {
  out << "oa,kappa,fa,md\n"
      << format_number(m.overall_accuracy) << ',' << format_number(m.kappa) << ','
      << m.false_alarms << ',' << m.missed_detections << '\n';
}

std::vector<BenchRow> run_bench(const SfcmConfig& cfg, std::size_t seeds, std::uint64_t base_seed,
                                const std::vector<int>& looks) {
  if (seeds < 1) throw InputError("bench needs at least one seed");
  cfg.validate();
  const Phantom clean = standard_phantom();
  const Rect block = standard_small_block();
  constexpr SpatialVariant kVariants[] = {SpatialVariant::none, SpatialVariant::neighbor,
                                          SpatialVariant::intensity};

  std::vector<BenchRow> rows;
  for (std::size_t s = 0; s < seeds; ++s) {
    const std::uint64_t seed = base_seed + s;
    for (int l : looks) {
      const Phantom noisy = speckle_phantom(clean, l, seed);
      const Image diff = difference_image(noisy.before, noisy.after);
      for (SpatialVariant variant : kVariants) {
        BenchRow row;
        row.seed = seed;
        row.looks = l;
        row.variant = variant;
        SfcmConfig run = cfg;
        run.spatial_variant = variant;
        try {
          const ChangeResult result = run_sfcm(diff, run);
          const LabelMap predicted = binary_labels(result.change_map);
          row.metrics = score(predicted, clean.truth);
          row.small_region_recall = region_recall(predicted, clean.truth, block);
        } catch (const NumericalError& e) {
          row.failure = e.what();
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "seed,looks,variant,oa,kappa,fa,md,small_region_recall\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << r.looks << ',' << to_string(r.variant) << ',';
    if (r.failure) {
      out << "nan,nan,nan,nan,nan\n";
      continue;
    }
    out << format_number(r.metrics.overall_accuracy) << ',' << format_number(r.metrics.kappa) << ','
        << r.metrics.false_alarms << ',' << r.metrics.missed_detections << ','
        << format_number(r.small_region_recall) << '\n';
  }
}

}  // namespace sfcd
