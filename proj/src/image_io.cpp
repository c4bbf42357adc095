#include "steel/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace steel {
namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

// Reads the next whitespace-delimited PNM header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  int c = 0;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

int parse_header_int(std::istream& in, const std::filesystem::path& path, const char* what) {
  const std::string tok = next_token(in);
  try {
    std::size_t used = 0;
    const int v = std::stoi(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw IoError(path.string() + ": bad PGM " + what + " '" + tok + "'");
  }
}

GrayImage load_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string() + ": cannot open");
  const std::string magic = next_token(in);
  if (magic != "P2" && magic != "P5") throw IoError(path.string() + ": not a grayscale PGM (magic '" + magic + "')");
  const int width = parse_header_int(in, path, "width");
  const int height = parse_header_int(in, path, "height");
  const int maxval = parse_header_int(in, path, "maxval");
  if (width < 1 || height < 1) throw IoError(path.string() + ": empty image");
  if (maxval < 1 || maxval > 255) {
    throw IoError(path.string() + ": unsupported bit depth (maxval " + std::to_string(maxval) + ")");
  }
  GrayImage img(height, width);
  if (magic == "P5") {
    // next_token consumed exactly one whitespace byte after maxval.
    in.read(reinterpret_cast<char*>(img.data()), static_cast<std::streamsize>(img.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.size())) throw IoError(path.string() + ": truncated PGM data");
  } else {
    for (Eigen::Index i = 0; i < img.size(); ++i) {
      const int v = parse_header_int(in, path, "sample");
      if (v < 0 || v > maxval) throw IoError(path.string() + ": sample out of range");
      img.data()[i] = static_cast<std::uint8_t>(v);
    }
  }
  for (Eigen::Index i = 0; i < img.size() && maxval != 255; ++i) {
    img.data()[i] = static_cast<std::uint8_t>((img.data()[i] * 255 + maxval / 2) / maxval);
  }
  return img;
}

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_handler(png_structp png, png_const_charp msg) {
  auto* message = static_cast<std::string*>(png_get_error_ptr(png));
  if (message) *message = msg;
  png_longjmp(png, 1);
}

void png_warning_handler(png_structp, png_const_charp) {}

GrayImage load_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) throw IoError(path.string() + ": cannot open");
  std::string message;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &message, png_error_handler, png_warning_handler);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path.string() + ": libpng initialisation failed");
  }
  GrayImage img;
  std::vector<png_bytep> row_ptrs;
  std::vector<png_byte> buffer;
  int channels = 0;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path.string() + ": " + (message.empty() ? "corrupt PNG" : message));
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const int bit_depth = png_get_bit_depth(png, info);
  const int color = png_get_color_type(png, info);
  if (bit_depth > 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(path.string() + ": unsupported bit depth " + std::to_string(bit_depth));
  }
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_read_update_info(png, info);
  const auto width = png_get_image_width(png, info);
  const auto height = png_get_image_height(png, info);
  channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  buffer.resize(stride * height);
  row_ptrs.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) row_ptrs[y] = buffer.data() + y * stride;
  png_read_image(png, row_ptrs.data());
  png_read_end(png, nullptr);
  const png_byte out_color = png_get_color_type(png, info);
  png_destroy_read_struct(&png, &info, nullptr);

  const bool has_alpha = (out_color & PNG_COLOR_MASK_ALPHA) != 0;
  const int colour_channels = has_alpha ? channels - 1 : channels;
  img.resize(static_cast<Eigen::Index>(height), static_cast<Eigen::Index>(width));
  for (png_uint_32 y = 0; y < height; ++y) {
    const png_byte* row = row_ptrs[y];
    for (png_uint_32 x = 0; x < width; ++x) {
      const png_byte* px = row + static_cast<std::size_t>(x) * static_cast<std::size_t>(channels);
      int sum = 0;
      for (int c = 0; c < colour_channels; ++c) sum += px[c];
      img(y, x) = static_cast<std::uint8_t>((sum + colour_channels / 2) / colour_channels);
    }
  }
  return img;
}

void save_png(const std::filesystem::path& path, const GrayImage& image) {
  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) throw IoError(path.string() + ": cannot open for writing");
  std::string message;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, png_error_handler, png_warning_handler);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError(path.string() + ": libpng initialisation failed");
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.rows()));
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError(path.string() + ": " + (message.empty() ? "PNG write failed" : message));
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.cols()), static_cast<png_uint_32>(image.rows()), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (Eigen::Index y = 0; y < image.rows(); ++y) {
    rows[static_cast<std::size_t>(y)] = const_cast<png_bytep>(image.data() + y * image.cols());
  }
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

void save_pgm(const std::filesystem::path& path, const GrayImage& image, bool ascii) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(path.string() + ": cannot open for writing");
  out << (ascii ? "P2\n" : "P5\n") << image.cols() << ' ' << image.rows() << "\n255\n";
  if (ascii) {
    for (Eigen::Index y = 0; y < image.rows(); ++y) {
      for (Eigen::Index x = 0; x < image.cols(); ++x) {
        out << static_cast<int>(image(y, x)) << (x + 1 == image.cols() ? '\n' : ' ');
      }
    }
  } else {
    out.write(reinterpret_cast<const char*>(image.data()), static_cast<std::streamsize>(image.size()));
  }
  if (!out) throw IoError(path.string() + ": write failed");
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw IoError(path.string() + ": no such file");
  const std::string ext = lower_extension(path);
  if (ext == ".png") return load_png(path);
  if (ext == ".pgm" || ext == ".pnm") return load_pgm(path);
  // Sniff the signature for unknown extensions.
  std::ifstream in(path, std::ios::binary);
  char sig[2] = {};
  in.read(sig, 2);
  if (sig[0] == 'P' && (sig[1] == '2' || sig[1] == '5')) return load_pgm(path);
  if (static_cast<unsigned char>(sig[0]) == 0x89 && sig[1] == 'P') return load_png(path);
  throw IoError(path.string() + ": unrecognized image format");
}

void save_image(const std::filesystem::path& path, const GrayImage& image) {
  if (image.size() == 0) throw PreconditionError("save_image: empty image");
  if (lower_extension(path) == ".png") {
    save_png(path, image);
  } else {
    save_pgm(path, image, false);
  }
}

void save_pgm_ascii(const std::filesystem::path& path, const GrayImage& image) { save_pgm(path, image, true); }

GrayImage mask_to_image(const BinaryMask& mask) {
  return mask.select(GrayImage::Constant(mask.rows(), mask.cols(), 255), GrayImage::Zero(mask.rows(), mask.cols()));
}

BinaryMask load_mask(const std::filesystem::path& path) { return load_image(path) != 0; }

void save_mask(const std::filesystem::path& path, const BinaryMask& mask) { save_image(path, mask_to_image(mask)); }

}  // namespace steel
