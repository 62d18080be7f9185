#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace drbench {

// Grayscale raster with intensities in [0, 1].
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<double> pixels;  // row-major

  double at(int y, int x) const {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
  double& at(int y, int x) {
    return pixels[static_cast<std::size_t>(y) * width + x];
  }
};

// Reads a portable anymap (P2/P3/P5/P6, maxval up to 65535). Color inputs
// are converted with luma weights (0.299, 0.587, 0.114).
GrayImage read_pnm(const std::filesystem::path& path);

// Writes an 8-bit binary graymap (P5); values are clamped to [0, 1].
void write_pgm(const std::filesystem::path& path, const GrayImage& image);

// Anisotropic bilinear resize with the half-pixel-center convention:
// src = clamp((dst + 0.5) * scale - 0.5, 0, src_extent - 1).
GrayImage resize_bilinear(const GrayImage& image, int width, int height);

double luma(double r, double g, double b);

}  // namespace drbench
