#include "derm/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>
#include <stdexcept>
#include <vector>

namespace derm {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::string& path, const char* mode) {
  FilePtr f(std::fopen(path.c_str(), mode));
  if (!f)
    throw std::runtime_error("cannot open file: " + path);
  return f;
}

std::string color_type_name(int color_type) {
  switch (color_type) {
    case PNG_COLOR_TYPE_GRAY: return "grayscale";
    case PNG_COLOR_TYPE_GRAY_ALPHA: return "grayscale+alpha";
    case PNG_COLOR_TYPE_PALETTE: return "palette";
    case PNG_COLOR_TYPE_RGB: return "RGB";
    case PNG_COLOR_TYPE_RGB_ALPHA: return "RGBA";
    default: return "unknown(" + std::to_string(color_type) + ")";
  }
}

// RAII reader around the classic libpng API. libpng reports errors via
// longjmp, so every read goes through the setjmp in read_rows().
class PngReader {
 public:
  explicit PngReader(const std::string& path) : path_(path) {
    file_ = open_file(path, "rb");
    png_byte sig[8];
    if (std::fread(sig, 1, 8, file_.get()) != 8 || png_sig_cmp(sig, 0, 8))
      throw std::runtime_error("not a PNG file: " + path);
    png_ = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                  nullptr);
    if (!png_) throw std::runtime_error("libpng allocation failed");
    info_ = png_create_info_struct(png_);
    if (!info_) {
      png_destroy_read_struct(&png_, nullptr, nullptr);
      throw std::runtime_error("libpng allocation failed");
    }
    if (setjmp(png_jmpbuf(png_))) {
      throw std::runtime_error("failed to decode PNG: " + path);
    }
    png_init_io(png_, file_.get());
    png_set_sig_bytes(png_, 8);
    png_read_info(png_, info_);
  }

  ~PngReader() { png_destroy_read_struct(&png_, &info_, nullptr); }

  PngReader(const PngReader&) = delete;
  PngReader& operator=(const PngReader&) = delete;

  int width() const { return static_cast<int>(png_get_image_width(png_, info_)); }
  int height() const { return static_cast<int>(png_get_image_height(png_, info_)); }
  int bit_depth() const { return png_get_bit_depth(png_, info_); }
  int color_type() const { return png_get_color_type(png_, info_); }
  png_structp png() { return png_; }
  png_infop info() { return info_; }

  // Applies pending transforms and reads the whole image; row_bytes is
  // validated against libpng's own accounting.
  std::vector<std::uint8_t> read_rows(std::size_t expected_row_bytes) {
    if (setjmp(png_jmpbuf(png_)))
      throw std::runtime_error("failed to decode PNG: " + path_);
    png_set_interlace_handling(png_);
    png_read_update_info(png_, info_);
    const std::size_t row_bytes = png_get_rowbytes(png_, info_);
    if (row_bytes != expected_row_bytes)
      throw std::runtime_error("unexpected PNG row size in " + path_);
    const int h = height();
    std::vector<std::uint8_t> data(row_bytes * h);
    std::vector<png_bytep> rows(h);
    for (int y = 0; y < h; ++y) rows[y] = data.data() + y * row_bytes;
    png_read_image(png_, rows.data());
    png_read_end(png_, nullptr);
    return data;
  }

 private:
  std::string path_;
  FilePtr file_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

class PngWriter {
 public:
  PngWriter(const std::string& path, int width, int height, int bit_depth,
            int color_type)
      : path_(path) {
    file_ = open_file(path, "wb");
    png_ = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                   nullptr);
    if (!png_) throw std::runtime_error("libpng allocation failed");
    info_ = png_create_info_struct(png_);
    if (!info_) {
      png_destroy_write_struct(&png_, nullptr);
      throw std::runtime_error("libpng allocation failed");
    }
    if (setjmp(png_jmpbuf(png_)))
      throw std::runtime_error("failed to write PNG: " + path_);
    png_init_io(png_, file_.get());
    png_set_IHDR(png_, info_, width, height, bit_depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png_, info_);
  }

  ~PngWriter() { png_destroy_write_struct(&png_, &info_); }

  PngWriter(const PngWriter&) = delete;
  PngWriter& operator=(const PngWriter&) = delete;

  void write_rows(const std::uint8_t* data, int height,
                  std::size_t row_bytes) {
    if (setjmp(png_jmpbuf(png_)))
      throw std::runtime_error("failed to write PNG: " + path_);
    for (int y = 0; y < height; ++y)
      png_write_row(png_, const_cast<png_bytep>(data + y * row_bytes));
    png_write_end(png_, nullptr);
  }

 private:
  std::string path_;
  FilePtr file_;
  png_structp png_ = nullptr;
  png_infop info_ = nullptr;
};

}  // namespace

BinaryMask load_mask_png(const std::string& path) {
  PngReader reader(path);
  if (reader.color_type() != PNG_COLOR_TYPE_GRAY)
    throw std::runtime_error("mask PNG must be grayscale, got color type " +
                             color_type_name(reader.color_type()) + ": " +
                             path);
  if (reader.bit_depth() != 8)
    throw std::runtime_error("mask PNG must be 8-bit, got bit depth " +
                             std::to_string(reader.bit_depth()) + ": " + path);
  const int w = reader.width();
  const int h = reader.height();
  std::vector<std::uint8_t> raw = reader.read_rows(static_cast<std::size_t>(w));
  std::vector<std::uint8_t> bits(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) bits[i] = raw[i] >= 128 ? 1 : 0;
  return BinaryMask(w, h, std::move(bits));
}

void save_mask_png(const BinaryMask& mask, const std::string& path) {
  std::vector<std::uint8_t> raw(mask.pixel_count());
  for (std::size_t i = 0; i < raw.size(); ++i)
    raw[i] = mask.value(i) ? 255 : 0;
  PngWriter writer(path, mask.width(), mask.height(), 8,
                   PNG_COLOR_TYPE_GRAY);
  writer.write_rows(raw.data(), mask.height(),
                    static_cast<std::size_t>(mask.width()));
}

ProbMap load_probmap_png16(const std::string& path) {
  PngReader reader(path);
  if (reader.color_type() != PNG_COLOR_TYPE_GRAY)
    throw std::runtime_error(
        "probability PNG must be grayscale, got color type " +
        color_type_name(reader.color_type()) + ": " + path);
  if (reader.bit_depth() != 16)
    throw std::runtime_error("probability PNG must be 16-bit, got bit depth " +
                             std::to_string(reader.bit_depth()) + ": " + path);
  const int w = reader.width();
  const int h = reader.height();
  // PNG stores 16-bit samples big-endian.
  std::vector<std::uint8_t> raw =
      reader.read_rows(static_cast<std::size_t>(w) * 2);
  std::vector<float> values(static_cast<std::size_t>(w) * h);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const unsigned v = (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1];
    values[i] = static_cast<float>(v / 65535.0);
  }
  return ProbMap(w, h, 1, std::move(values));
}

RgbImage load_rgb_png(const std::string& path) {
  PngReader reader(path);
  if (reader.bit_depth() == 16)
    throw std::runtime_error("color PNG must be 8-bit, got bit depth 16: " +
                             path);
  png_structp png = reader.png();
  const int color_type = reader.color_type();
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && reader.bit_depth() < 8)
    png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, reader.info(), PNG_INFO_tRNS))
    png_set_tRNS_to_alpha(png);
  if (color_type == PNG_COLOR_TYPE_GRAY ||
      color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  png_set_strip_alpha(png);

  const int w = reader.width();
  const int h = reader.height();
  std::vector<std::uint8_t> raw =
      reader.read_rows(static_cast<std::size_t>(w) * 3);
  return RgbImage(w, h, std::move(raw));
}

void save_rgb_png(const RgbImage& image, const std::string& path) {
  PngWriter writer(path, image.width(), image.height(), 8,
                   PNG_COLOR_TYPE_RGB);
  writer.write_rows(image.data().data(), image.height(),
                    static_cast<std::size_t>(image.width()) * 3);
}

void save_gray8_png(const std::vector<std::uint8_t>& data, int width,
                    int height, const std::string& path) {
  if (width < 1 || height < 1 ||
      data.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("gray8 data length must equal width*height");
  PngWriter writer(path, width, height, 8, PNG_COLOR_TYPE_GRAY);
  writer.write_rows(data.data(), height, static_cast<std::size_t>(width));
}

}  // namespace derm
