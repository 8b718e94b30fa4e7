// Regenerates the bundled MTF test images:
//   make_fixtures <data-dir>

#include <cstdio>
#include <filesystem>
#include <string>

#include "beam/beam.h"

namespace {

constexpr int kSize = 128;
constexpr double kAngleDeg = 5.0;

bool write(beam_image* image, const std::filesystem::path& path) {
  const beam_status s = beam_image_write_pgm(image, path.string().c_str());
  beam_image_destroy(image);
  if (s != BEAM_OK) {
    std::fprintf(stderr, "%s: %s\n", path.string().c_str(), beam_last_error());
    return false;
  }
  return true;
}

// Point-sampled step blurred by sigma, so the edge response is the Gaussian
// alone; sigma = 0 gives the area-sampled edge.
beam_image* edge(double sigma) {
  beam_image* base = nullptr;
  if (beam_image_slanted_edge(kSize, kSize, kAngleDeg, 20, 220, sigma > 0.0 ? 1 : 4, &base) != BEAM_OK) return nullptr;
  if (sigma == 0.0) return base;
  beam_image* blurred = nullptr;
  beam_image_blur(base, sigma, &blurred);
  beam_image_destroy(base);
  return blurred;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: make_fixtures <data-dir>\n");
    return 2;
  }
  const std::filesystem::path dir(argv[1]);
  std::filesystem::create_directories(dir);

  beam_image* uniform = nullptr;
  beam_image_slanted_edge(kSize, kSize, kAngleDeg, 128, 128, 1, &uniform);

  beam_image* sigma2 = edge(2.0);
  beam_image* sharp = edge(0.0);
  if (sigma2 == nullptr || sharp == nullptr || uniform == nullptr) {
    std::fprintf(stderr, "fixture synthesis failed: %s\n", beam_last_error());
    return 1;
  }
  const bool ok = write(sigma2, dir / "edge_sigma2.pgm") & write(sharp, dir / "edge_sharp.pgm") &
                  write(uniform, dir / "uniform.pgm");
  return ok ? 0 : 1;
}
