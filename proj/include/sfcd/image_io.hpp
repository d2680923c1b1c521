#pragma once

#include <filesystem>

#include "sfcd/grid.hpp"

namespace sfcd {

/// Reads a single-channel binary PGM (P5) or grayscale PNG. The format is
/// detected from the file's magic bytes. Samples are decoded losslessly:
/// 8-bit files yield 0..255, 16-bit files 0..65535.
///
/// Throws InputError (message carries the path) when the file cannot be
/// read, has more than one channel, or declares a zero dimension.
Image load_image(const std::filesystem::path& path);

/// Writes `image` as PGM or PNG depending on the extension (.pgm / .png).
/// Samples are rounded to the nearest integer and must fit in `bit_depth`
/// (8 or 16) bits afterwards, otherwise InputError is thrown and nothing is
/// written.
void save_image(const Image& image, const std::filesystem::path& path, int bit_depth);

}  // namespace sfcd
