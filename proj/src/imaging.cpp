#include "beam/imaging.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "beam/error.hpp"

namespace beam::imaging {

namespace {

std::uint8_t to_u8(double v) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

GrayImage::GrayImage(int width, int height, std::uint8_t fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) fail(ErrorCode::InvalidArgument, "image dimensions must be positive");
  samples_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
}

GrayImage::GrayImage(int width, int height, std::vector<std::uint8_t> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width <= 0 || height <= 0) fail(ErrorCode::InvalidArgument, "image dimensions must be positive");
  if (samples_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
    fail(ErrorCode::InvalidArgument, "sample count does not match width * height");
  }
}

GrayImage GrayImage::crop(int x, int y, int w, int h) const {
  if (x < 0 || y < 0 || w <= 0 || h <= 0 || x + w > width_ || y + h > height_) {
    fail(ErrorCode::OutOfRange, "region of interest lies outside the image");
  }
  GrayImage out(w, h);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) out.at(c, r) = at(x + c, y + r);
  return out;
}

GrayImage warp_image(const GrayImage& src, const Homography& h, Size out) {
  if (src.empty()) fail(ErrorCode::InvalidArgument, "empty source image");
  const Mat3 inv = h.matrix().inverse();
  if (!inv.allFinite()) fail(ErrorCode::DegenerateHomography, "homography is not invertible");
  GrayImage dst(out.width, out.height);
  const int w = src.width();
  const int hgt = src.height();
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const Vec3 q = inv * Vec3(x, y, 1.0);
      if (std::abs(q.z()) < 1e-12) continue;
      double sx = q.x() / q.z();
      double sy = q.y() / q.z();
      // Integer-aligned samples stay exact despite rounding in the inverse.
      if (std::abs(sx - std::round(sx)) < 1e-9) sx = std::round(sx);
      if (std::abs(sy - std::round(sy)) < 1e-9) sy = std::round(sy);
      if (!(sx >= 0.0 && sx <= w - 1 && sy >= 0.0 && sy <= hgt - 1)) continue;
      const int x0 = static_cast<int>(std::floor(sx));
      const int y0 = static_cast<int>(std::floor(sy));
      const double ax = sx - x0;
      const double ay = sy - y0;
      const int x1 = std::min(x0 + 1, w - 1);
      const int y1 = std::min(y0 + 1, hgt - 1);
      const double top = (1.0 - ax) * src.at(x0, y0) + ax * src.at(x1, y0);
      const double bottom = (1.0 - ax) * src.at(x0, y1) + ax * src.at(x1, y1);
      dst.at(x, y) = to_u8((1.0 - ay) * top + ay * bottom);
    }
  }
  return dst;
}

GrayImage slanted_edge_pattern(Size size, double angle_deg, std::uint8_t low, std::uint8_t high,
                               int supersample) {
  if (!(std::abs(angle_deg) >= 2.0 && std::abs(angle_deg) <= 10.0)) {
    fail(ErrorCode::AngleOutOfRange, "edge angle must satisfy 2 <= |angle| <= 10 degrees");
  }
  if (supersample < 1) fail(ErrorCode::InvalidArgument, "supersample factor must be >= 1");
  GrayImage img(size.width, size.height);
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double nx = std::cos(a);
  const double ny = -std::sin(a);
  const double cx = 0.5 * (size.width - 1);
  const double cy = 0.5 * (size.height - 1);
  const int n = supersample;
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      int on = 0;
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const double px = x - 0.5 + (i + 0.5) / n;
          const double py = y - 0.5 + (j + 0.5) / n;
          const double d = (px - cx) * nx + (py - cy) * ny;
          // Points exactly on the line split evenly between the two sides.
          if (d > 0.0 || (d == 0.0 && ((i + j) & 1))) ++on;
        }
      }
      const double frac = static_cast<double>(on) / (n * n);
      img.at(x, y) = to_u8(low + frac * (static_cast<double>(high) - low));
    }
  }
  return img;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma >= 0.0)) fail(ErrorCode::InvalidArgument, "sigma must be non-negative");
  if (sigma == 0.0) return {1.0};
  const int r = static_cast<int>(std::ceil(4.0 * sigma));
  std::vector<double> k(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) {
    k[i + r] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + r];
  }
  for (auto& v : k) v /= sum;
  return k;
}

GrayImage gaussian_blur(const GrayImage& src, double sigma) {
  const auto k = gaussian_kernel(sigma);
  if (k.size() == 1) return src;
  const int r = static_cast<int>(k.size() / 2);
  const int w = src.width();
  const int h = src.height();
  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * src.at(std::clamp(x + i, 0, w - 1), y);
      tmp[static_cast<std::size_t>(y) * w + x] = acc;
    }
  }
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp[static_cast<std::size_t>(std::clamp(y + i, 0, h - 1)) * w + x];
      out.at(x, y) = to_u8(acc);
    }
  }
  return out;
}

}  // namespace beam::imaging
