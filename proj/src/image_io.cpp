#include "sfcd/image_io.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "sfcd/errors.hpp"

namespace sfcd {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void fail(const fs::path& path, const std::string& cause) {
  throw InputError(path.string() + ": " + cause);
}

std::vector<unsigned char> read_all(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open file for reading");
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

// ---------------------------------------------------------------- PGM

class PgmHeaderParser {
 public:
  PgmHeaderParser(const std::vector<unsigned char>& bytes, const fs::path& path)
      : bytes_(bytes), path_(path) {}

  unsigned long next_number() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) fail(path_, "malformed PGM header");
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > 0xFFFFFFFFul) fail(path_, "PGM header value too large");
    }
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) fail(path_, "malformed PGM header");
    return pos_ + 1;
  }

  void skip(std::size_t n) { pos_ += n; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& bytes_;
  const fs::path& path_;
  std::size_t pos_ = 0;
};

Image decode_pgm(const std::vector<unsigned char>& bytes, const fs::path& path) {
  if (bytes[1] == '6' || bytes[1] == '3') fail(path, "multi-channel input (PPM color image)");
  if (bytes[1] != '5') fail(path, "unsupported PNM variant P" + std::string(1, bytes[1]));

  PgmHeaderParser parser(bytes, path);
  parser.skip(2);
  const auto width = parser.next_number();
  const auto height = parser.next_number();
  const auto maxval = parser.next_number();
  if (width == 0 || height == 0) fail(path, "zero-dimension header");
  if (maxval == 0 || maxval > 65535) fail(path, "PGM maxval out of range");
  const std::size_t offset = parser.raster_offset();

  const std::size_t sample_bytes = maxval < 256 ? 1 : 2;
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (bytes.size() - offset < count * sample_bytes) fail(path, "truncated PGM raster");

  std::vector<double> data(count);
  const unsigned char* raster = bytes.data() + offset;
  for (std::size_t i = 0; i < count; ++i) {
    unsigned value = sample_bytes == 1 ? raster[i] : (raster[2 * i] << 8) | raster[2 * i + 1];
    if (value > maxval) fail(path, "PGM sample exceeds maxval");
    data[i] = value;
  }
  return Image(width, height, std::move(data));
}

void encode_pgm(const Image& image, const std::vector<unsigned>& samples, int bit_depth,
                const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open file for writing");
  out << "P5\n" << image.width() << ' ' << image.height() << '\n'
      << (bit_depth == 8 ? 255 : 65535) << '\n';
  std::vector<unsigned char> raster;
  raster.reserve(samples.size() * (bit_depth / 8));
  for (unsigned s : samples) {
    if (bit_depth == 16) raster.push_back(static_cast<unsigned char>(s >> 8));
    raster.push_back(static_cast<unsigned char>(s & 0xFF));
  }
  out.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
  if (!out) fail(path, "write failed");
}

// ---------------------------------------------------------------- PNG

struct PngErrorContext {
  std::string message;
};

void png_error_handler(png_structp png, png_const_charp message) {
  auto* ctx = static_cast<PngErrorContext*>(png_get_error_ptr(png));
  if (ctx) ctx->message = message;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

class PngReadStruct {
 public:
  explicit PngReadStruct(PngErrorContext* ctx) {
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, ctx, png_error_handler, png_warning_handler);
    if (png_) info_ = png_create_info_struct(png_);
  }
  ~PngReadStruct() { png_destroy_read_struct(&png_, info_ ? &info_ : nullptr, nullptr); }
  PngReadStruct(const PngReadStruct&) = delete;
  PngReadStruct& operator=(const PngReadStruct&) = delete;

  png_structp png() const { return png_; }
  png_infop info() const { return info_; }

 private:
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

class PngWriteStruct {
 public:
  explicit PngWriteStruct(PngErrorContext* ctx) {
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, ctx, png_error_handler, png_warning_handler);
    if (png_) info_ = png_create_info_struct(png_);
  }
  ~PngWriteStruct() { png_destroy_write_struct(&png_, info_ ? &info_ : nullptr); }
  PngWriteStruct(const PngWriteStruct&) = delete;
  PngWriteStruct& operator=(const PngWriteStruct&) = delete;

  png_structp png() const { return png_; }
  png_infop info() const { return info_; }

 private:
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

Image decode_png(const fs::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) fail(path, "cannot open file for reading");

  PngErrorContext ctx;
  PngReadStruct reader(&ctx);
  if (!reader.png() || !reader.info()) fail(path, "libpng initialisation failed");

  // Everything libpng may longjmp over is owned outside this block.
  png_uint_32 width = 0;
  png_uint_32 height = 0;
  int bit_depth = 0;
  int color_type = 0;
  std::vector<unsigned char> pixels;
  std::vector<png_bytep> rows;

  if (setjmp(png_jmpbuf(reader.png()))) {
    fail(path, "corrupt PNG: " + ctx.message);
  }

  png_init_io(reader.png(), file.get());
  png_read_info(reader.png(), reader.info());
  png_get_IHDR(reader.png(), reader.info(), &width, &height, &bit_depth, &color_type, nullptr,
               nullptr, nullptr);
  if (width == 0 || height == 0) fail(path, "zero-dimension header");
  if (color_type != PNG_COLOR_TYPE_GRAY) {
    fail(path, "multi-channel input (PNG color type " + std::to_string(color_type) + ")");
  }
  if (bit_depth < 8) png_set_packing(reader.png());
  png_set_interlace_handling(reader.png());
  png_read_update_info(reader.png(), reader.info());

  const std::size_t rowbytes = png_get_rowbytes(reader.png(), reader.info());
  pixels.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = pixels.data() + y * rowbytes;
  png_read_image(reader.png(), rows.data());
  png_read_end(reader.png(), nullptr);

  std::vector<double> data(static_cast<std::size_t>(width) * height);
  for (png_uint_32 y = 0; y < height; ++y) {
    const unsigned char* row = rows[y];
    for (png_uint_32 x = 0; x < width; ++x) {
      data[static_cast<std::size_t>(y) * width + x] =
          bit_depth == 16 ? static_cast<double>((row[2 * x] << 8) | row[2 * x + 1]) : row[x];
    }
  }
  return Image(width, height, std::move(data));
}

void encode_png(const Image& image, const std::vector<unsigned>& samples, int bit_depth,
                const fs::path& path) {
  const std::size_t width = image.width();
  const std::size_t height = image.height();
  const std::size_t bytes_per_sample = bit_depth / 8;
  std::vector<unsigned char> pixels(samples.size() * bytes_per_sample);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (bit_depth == 16) {
      pixels[2 * i] = static_cast<unsigned char>(samples[i] >> 8);
      pixels[2 * i + 1] = static_cast<unsigned char>(samples[i] & 0xFF);
    } else {
      pixels[i] = static_cast<unsigned char>(samples[i]);
    }
  }
  std::vector<png_bytep> rows(height);
  for (std::size_t y = 0; y < height; ++y) rows[y] = pixels.data() + y * width * bytes_per_sample;

  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) fail(path, "cannot open file for writing");

  PngErrorContext ctx;
  PngWriteStruct writer(&ctx);
  if (!writer.png() || !writer.info()) fail(path, "libpng initialisation failed");
  if (setjmp(png_jmpbuf(writer.png()))) fail(path, "PNG write failed: " + ctx.message);

  png_init_io(writer.png(), file.get());
  png_set_IHDR(writer.png(), writer.info(), static_cast<png_uint_32>(width),
               static_cast<png_uint_32>(height), bit_depth, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(writer.png(), writer.info());
  png_write_image(writer.png(), rows.data());
  png_write_end(writer.png(), nullptr);
}

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  for (char& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext;
}

}  // namespace

Image load_image(const fs::path& path) {
  const auto bytes = read_all(path);
  if (bytes.size() >= 8 && png_sig_cmp(bytes.data(), 0, 8) == 0) return decode_png(path);
  if (bytes.size() >= 2 && bytes[0] == 'P') return decode_pgm(bytes, path);
  fail(path, "unrecognised image format (expected PGM or PNG)");
}

void save_image(const Image& image, const fs::path& path, int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    fail(path, "bit depth must be 8 or 16, got " + std::to_string(bit_depth));
  }
  const std::string ext = lower_extension(path);
  if (ext != ".pgm" && ext != ".png") fail(path, "unsupported output extension '" + ext + "'");

  const double max_value = bit_depth == 8 ? 255.0 : 65535.0;
  std::vector<unsigned> samples(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double rounded = std::round(image[i]);
    if (rounded > max_value) {
      fail(path, "value " + std::to_string(image[i]) + " at sample " + std::to_string(i) +
                     " out of range for " + std::to_string(bit_depth) + "-bit output");
    }
    samples[i] = static_cast<unsigned>(rounded);
  }
  if (ext == ".pgm") {
    encode_pgm(image, samples, bit_depth, path);
  } else {
    encode_png(image, samples, bit_depth, path);
  }
}

}  // namespace sfcd
