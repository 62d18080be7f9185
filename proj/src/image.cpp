#include "drbench/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "drbench/errors.hpp"

namespace drbench {

double luma(double r, double g, double b) {
  return 0.299 * r + 0.587 * g + 0.114 * b;
}

namespace {

// Skips PNM whitespace and '#' comments, then reads one unsigned integer.
int read_pnm_int(std::istream& in, const std::string& path) {
  for (;;) {
    int c = in.peek();
    if (c == EOF) throw IoError("truncated pnm header in " + path);
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    break;
  }
  int value = 0;
  if (!(in >> value) || value < 0) {
    throw IoError("malformed pnm value in " + path);
  }
  return value;
}

int read_sample(std::istream& in, bool binary, int maxval, const std::string& path) {
  if (!binary) return read_pnm_int(in, path);
  if (maxval < 256) {
    int c = in.get();
    if (c == EOF) throw IoError("truncated pnm data in " + path);
    return c;
  }
  int hi = in.get();
  int lo = in.get();
  if (hi == EOF || lo == EOF) throw IoError("truncated pnm data in " + path);
  return hi * 256 + lo;
}

}  // namespace

GrayImage read_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  const std::string name = path.string();
  if (!in) throw IoError("cannot open image file " + name);

  char p = 0, digit = 0;
  in.get(p);
  in.get(digit);
  if (p != 'P' || (digit != '2' && digit != '3' && digit != '5' && digit != '6')) {
    throw IoError("unsupported image format in " + name + " (want P2/P3/P5/P6)");
  }
  bool binary = digit == '5' || digit == '6';
  bool color = digit == '3' || digit == '6';

  int width = read_pnm_int(in, name);
  int height = read_pnm_int(in, name);
  int maxval = read_pnm_int(in, name);
  if (width < 1 || height < 1 || maxval < 1 || maxval > 65535) {
    throw IoError("invalid pnm dimensions in " + name);
  }
  if (binary) in.get();  // single whitespace after maxval

  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(static_cast<std::size_t>(width) * height);

  const double scale = 1.0 / maxval;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    if (color) {
      double r = read_sample(in, binary, maxval, name) * scale;
      double g = read_sample(in, binary, maxval, name) * scale;
      double b = read_sample(in, binary, maxval, name) * scale;
      img.pixels[i] = luma(r, g, b);
    } else {
      img.pixels[i] = read_sample(in, binary, maxval, name) * scale;
    }
  }
  return img;
}

void write_pgm(const std::filesystem::path& path, const GrayImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write image file " + path.string());
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  for (double v : image.pixels) {
    double clamped = std::clamp(v, 0.0, 1.0);
    out.put(static_cast<char>(static_cast<unsigned char>(std::lround(clamped * 255.0))));
  }
  if (!out) throw IoError("short write to " + path.string());
}

GrayImage resize_bilinear(const GrayImage& image, int width, int height) {
  if (width < 1 || height < 1) {
    throw InvalidSpecError("resize target must be at least 1x1");
  }
  GrayImage out;
  out.width = width;
  out.height = height;
  out.pixels.resize(static_cast<std::size_t>(width) * height);

  const double sx = static_cast<double>(image.width) / width;
  const double sy = static_cast<double>(image.height) / height;

  for (int y = 0; y < height; ++y) {
    double src_y = (y + 0.5) * sy - 0.5;
    src_y = std::clamp(src_y, 0.0, static_cast<double>(image.height - 1));
    int y0 = std::min(static_cast<int>(std::floor(src_y)), std::max(image.height - 2, 0));
    double ty = src_y - y0;
    int y1 = std::min(y0 + 1, image.height - 1);

    for (int x = 0; x < width; ++x) {
      double src_x = (x + 0.5) * sx - 0.5;
      src_x = std::clamp(src_x, 0.0, static_cast<double>(image.width - 1));
      int x0 = std::min(static_cast<int>(std::floor(src_x)), std::max(image.width - 2, 0));
      double tx = src_x - x0;
      int x1 = std::min(x0 + 1, image.width - 1);

      double top = (1.0 - tx) * image.at(y0, x0) + tx * image.at(y0, x1);
      double bottom = (1.0 - tx) * image.at(y1, x0) + tx * image.at(y1, x1);
      out.at(y, x) = (1.0 - ty) * top + ty * bottom;
    }
  }
  return out;
}

}  // namespace drbench
