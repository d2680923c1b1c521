#include "sfcd/diff_image.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sfcd/errors.hpp"

namespace sfcd {

namespace {

std::string shape_of(const Image& img) {
  return std::to_string(img.width()) + "x" + std::to_string(img.height());
}

}  // namespace

Image difference_image(const Image& before, const Image& after) {
  if (!before.same_shape(after)) {
    throw InputError("difference image needs equal shapes, got " + shape_of(before) + " and " +
                     shape_of(after));
  }
  std::vector<double> out(before.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double a = before[j];
    const double b = after[j];
    const double sum = a + b;
    // Inputs are non-negative, so sum == 0 only when both are zero.
    out[j] = sum > 0.0 ? std::abs(a - b) / sum : 0.0;
  }
  return Image(before.width(), before.height(), std::move(out));
}

Image quantize(const Image& diff, int levels) {
  if (levels < 2) throw InputError("quantize needs at least 2 levels, got " + std::to_string(levels));
  const double top = levels - 1;
  std::vector<double> out(diff.size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = std::clamp(std::round(diff[j] * top), 0.0, top);
  }
  return Image(diff.width(), diff.height(), std::move(out));
}

ImageStats image_stats(const Image& image) {
  ImageStats stats{image[0], 0.0, image[0]};
  double sum = 0.0;
  for (double v : image.data()) {
    stats.min = std::min(stats.min, v);
    stats.max = std::max(stats.max, v);
    sum += v;
  }
  stats.mean = sum / static_cast<double>(image.size());
  return stats;
}

}  // namespace sfcd
