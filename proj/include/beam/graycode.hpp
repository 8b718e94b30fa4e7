#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "beam/geometry.hpp"
#include "beam/imaging.hpp"

namespace beam::sim {

std::uint32_t gray_encode(std::uint32_t v);
std::uint32_t gray_decode(std::uint32_t g);

// Number of bits needed to index `n` positions (ceil(log2 n), at least 1).
int bits_for(int n);

struct GrayCodeLayout {
  int width = 0;
  int height = 0;
  int column_bits = 0;
  int row_bits = 0;

  int pattern_pairs() const { return column_bits + row_bits; }
};

// Reflected-Gray structured light stack. Pattern 2k is bit k and pattern
// 2k + 1 its inverse; column bits (MSB first) precede row bits.
struct PatternStack {
  GrayCodeLayout layout;
  std::vector<imaging::GrayImage> patterns;
};

PatternStack graycode_generate(int width, int height);

// Intensities seen by a set of camera samples, one frame per pattern.
struct CameraObservation {
  std::vector<Vec2> pixels;
  std::vector<std::vector<std::uint8_t>> frames;
};

// Camera samples placed at projector_to_camera(p) for every projector pixel p.
CameraObservation observe_patterns(const PatternStack& stack, const Homography& projector_to_camera);

// Samples on the integer pixel grid of captured camera frames.
CameraObservation observation_from_images(std::span<const imaging::GrayImage> frames);

// Makes a `fraction` of samples undecodable by equalizing one bit pair.
void corrupt_observation(CameraObservation& obs, double fraction, std::mt19937_64& rng);

// Pairs are (projector pixel -> camera position). Samples whose on/off
// difference falls below `threshold` for any bit, or that decode outside the
// projector raster, are dropped.
CorrespondenceSet graycode_decode(const GrayCodeLayout& layout, const CameraObservation& obs,
                                  int threshold = 16);

}  // namespace beam::sim
