#include "beam/graycode.hpp"

#include <bit>
#include <cstdlib>

#include "beam/error.hpp"

namespace beam::sim {

std::uint32_t gray_encode(std::uint32_t v) { return v ^ (v >> 1); }

std::uint32_t gray_decode(std::uint32_t g) {
  std::uint32_t v = g;
  for (std::uint32_t shift = 1; shift < 32; shift <<= 1) v ^= v >> shift;
  return v;
}

int bits_for(int n) {
  if (n < 2) return 1;
  return static_cast<int>(std::bit_width(static_cast<std::uint32_t>(n - 1)));
}

PatternStack graycode_generate(int width, int height) {
  if (width < 2 || height < 2) fail(ErrorCode::InvalidArgument, "pattern resolution must be at least 2x2");
  PatternStack stack;
  stack.layout = {width, height, bits_for(width), bits_for(height)};
  const auto add_axis = [&](int bits, bool columns) {
    for (int b = bits - 1; b >= 0; --b) {
      imaging::GrayImage on(width, height);
      imaging::GrayImage off(width, height);
      for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
          const auto code = gray_encode(static_cast<std::uint32_t>(columns ? x : y));
          const bool bit = (code >> b) & 1U;
          on.at(x, y) = bit ? 255 : 0;
          off.at(x, y) = bit ? 0 : 255;
        }
      }
      stack.patterns.push_back(std::move(on));
      stack.patterns.push_back(std::move(off));
    }
  };
  add_axis(stack.layout.column_bits, true);
  add_axis(stack.layout.row_bits, false);
  return stack;
}

CameraObservation observe_patterns(const PatternStack& stack, const Homography& projector_to_camera) {
  const auto& l = stack.layout;
  CameraObservation obs;
  obs.pixels.reserve(static_cast<std::size_t>(l.width) * l.height);
  for (int y = 0; y < l.height; ++y)
    for (int x = 0; x < l.width; ++x) obs.pixels.push_back(apply_homography(projector_to_camera, Vec2(x, y)));
  obs.frames.reserve(stack.patterns.size());
  for (const auto& p : stack.patterns) obs.frames.emplace_back(p.samples().begin(), p.samples().end());
  return obs;
}

CameraObservation observation_from_images(std::span<const imaging::GrayImage> frames) {
  if (frames.empty()) fail(ErrorCode::InvalidArgument, "no camera frames");
  const int w = frames.front().width();
  const int h = frames.front().height();
  CameraObservation obs;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) obs.pixels.emplace_back(x, y);
  for (const auto& f : frames) {
    if (f.width() != w || f.height() != h) fail(ErrorCode::InvalidArgument, "camera frames differ in size");
    obs.frames.emplace_back(f.samples().begin(), f.samples().end());
  }
  return obs;
}

void corrupt_observation(CameraObservation& obs, double fraction, std::mt19937_64& rng) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) fail(ErrorCode::InvalidArgument, "corruption fraction must be in [0, 1]");
  if (obs.frames.size() < 2) return;
  std::bernoulli_distribution pick(fraction);
  std::uniform_int_distribution<std::size_t> pair(0, obs.frames.size() / 2 - 1);
  for (std::size_t i = 0; i < obs.pixels.size(); ++i) {
    if (!pick(rng)) continue;
    const std::size_t k = pair(rng);
    obs.frames[2 * k][i] = 128;
    obs.frames[2 * k + 1][i] = 128;
  }
}

CorrespondenceSet graycode_decode(const GrayCodeLayout& layout, const CameraObservation& obs, int threshold) {
  const auto pairs = static_cast<std::size_t>(layout.pattern_pairs());
  if (obs.frames.size() != 2 * pairs) {
    fail(ErrorCode::InvalidArgument, "observed bit stack does not match the pattern layout");
  }
  for (const auto& f : obs.frames) {
    if (f.size() != obs.pixels.size()) fail(ErrorCode::InvalidArgument, "frame length mismatch");
  }
  CorrespondenceSet out;
  out.reserve(obs.pixels.size());
  for (std::size_t i = 0; i < obs.pixels.size(); ++i) {
    std::uint32_t col = 0;
    std::uint32_t row = 0;
    bool ok = true;
    for (std::size_t k = 0; k < pairs && ok; ++k) {
      const int on = obs.frames[2 * k][i];
      const int off = obs.frames[2 * k + 1][i];
      if (std::abs(on - off) < threshold) {
        ok = false;
        break;
      }
      const std::uint32_t bit = on > off ? 1U : 0U;
      if (k < static_cast<std::size_t>(layout.column_bits)) {
        col = (col << 1) | bit;
      } else {
        row = (row << 1) | bit;
      }
    }
    if (!ok) continue;
    const auto x = gray_decode(col);
    const auto y = gray_decode(row);
    if (x >= static_cast<std::uint32_t>(layout.width) || y >= static_cast<std::uint32_t>(layout.height)) continue;
    out.push_back({Vec2(x, y), obs.pixels[i]});
  }
  if (out.size() < 4) {
    fail(ErrorCode::InsufficientCorrespondences, "fewer than 4 decodable camera samples");
  }
  return out;
}

}  // namespace beam::sim
