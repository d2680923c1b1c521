#pragma once

#include "sfcd/grid.hpp"

namespace sfcd {

/// Normalized absolute difference |a - b| / (a + b) of two co-registered
/// acquisitions. Every value lies in [0, 1]; pixels where both inputs are
/// zero map to 0. Throws InputError naming both shapes on mismatch.
Image difference_image(const Image& before, const Image& after);

/// Maps each value s in [0, 1] to round(s * (levels - 1)). Requires
/// levels >= 2. With 256 levels this yields an 8-bit grey-level image.
Image quantize(const Image& diff, int levels);

struct ImageStats {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

ImageStats image_stats(const Image& image);

}  // namespace sfcd
