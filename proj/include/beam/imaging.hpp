#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "beam/geometry.hpp"

namespace beam::imaging {

// 8-bit grayscale raster, row-major.
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, std::uint8_t fill = 0);
  GrayImage(int width, int height, std::vector<std::uint8_t> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return samples_.empty(); }

  std::uint8_t at(int x, int y) const { return samples_[index(x, y)]; }
  std::uint8_t& at(int x, int y) { return samples_[index(x, y)]; }

  std::span<const std::uint8_t> samples() const { return samples_; }

  GrayImage crop(int x, int y, int w, int h) const;

  bool operator==(const GrayImage&) const = default;

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> samples_;
};

struct Size {
  int width;
  int height;
};

// Inverse mapping with bilinear interpolation; `h` maps source pixels to
// destination pixels. Samples falling outside the source are 0.
GrayImage warp_image(const GrayImage& src, const Homography& h, Size out);

// Straight edge through the image center, tilted `angle_deg` from vertical;
// the side at positive x gets `high`. Each pixel is the mean of a
// supersample x supersample grid of point samples (1 gives a hard step).
GrayImage slanted_edge_pattern(Size size, double angle_deg, std::uint8_t low, std::uint8_t high,
                               int supersample = 4);

// Normalized 1D Gaussian taps for offsets -r..r with r = ceil(4 sigma).
std::vector<double> gaussian_kernel(double sigma);

// Separable Gaussian with edge replication; sigma = 0 returns the input.
GrayImage gaussian_blur(const GrayImage& src, double sigma);

struct EdgeProfile {
  std::vector<double> positions;  // pixels along the edge normal
  std::vector<double> esf;
  double oversample = 4.0;
  double edge_angle_deg = 0.0;  // fitted tilt from vertical
};

// Slanted-edge ESF: per-row derivative centroids, least-squares edge line,
// projection of every pixel onto the edge normal, 1/oversample binning.
EdgeProfile esf_from_roi(const GrayImage& roi, double oversample = 4.0);

struct MtfCurve {
  std::vector<double> frequencies;  // cycles per pixel
  std::vector<double> response;

  // Samples with frequency <= Nyquist (0.5 cy/px).
  MtfCurve reported() const;
  double at(double frequency) const;
};

// ESF -> LSF (first difference) -> Hann window about the LSF peak -> DFT
// magnitude normalized by DC. The first-difference transfer is divided out.
// Frequencies run from 0 to 1 cy/px.
MtfCurve mtf_from_esf(const EdgeProfile& p);

struct Mtf50 {
  double cycles_per_pixel;
  double cycles_per_degree;
};

// First downward crossing of 0.5, linearly interpolated.
Mtf50 mtf50(const MtfCurve& curve, double pitch_deg_per_px);

// Binary PGM (P5, maxval 255).
GrayImage read_pgm(const std::filesystem::path& path);
void write_pgm(const GrayImage& image, const std::filesystem::path& path);
GrayImage decode_pgm(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);

}  // namespace beam::imaging
