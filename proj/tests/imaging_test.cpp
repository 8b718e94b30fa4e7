#include <cmath>
#include <filesystem>
#include <random>

#include "beam/imaging.hpp"
#include "oracles.hpp"
#include "support.hpp"

namespace beam::imaging {
namespace {

using test::error_of;

constexpr Size kEdgeSize{128, 128};

GrayImage gradient(int w, int h) {
  GrayImage g(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) g.at(x, y) = static_cast<std::uint8_t>(std::lround(20.0 + 1.5 * x + 0.8 * y));
  return g;
}

GrayImage flipped_vertically(const GrayImage& src) {
  GrayImage out(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y)
    for (int x = 0; x < src.width(); ++x) out.at(x, y) = src.at(x, src.height() - 1 - y);
  return out;
}

// Point-sampled step then the library blur; the Gaussian is the only filter.
GrayImage blurred_edge(double sigma) {
  return gaussian_blur(slanted_edge_pattern(kEdgeSize, 5.0, 20, 220, 1), sigma);
}

MtfCurve analyze(const GrayImage& img) { return mtf_from_esf(esf_from_roi(img)); }

double crossing(const EdgeProfile& p) {
  const double lo = p.esf.front();
  const double hi = p.esf.back();
  const double mid = 0.5 * (lo + hi);
  for (std::size_t i = 0; i + 1 < p.esf.size(); ++i) {
    if ((p.esf[i] - mid) * (p.esf[i + 1] - mid) <= 0.0 && p.esf[i] != p.esf[i + 1]) {
      return p.positions[i] + (mid - p.esf[i]) / (p.esf[i + 1] - p.esf[i]) * (p.positions[i + 1] - p.positions[i]);
    }
  }
  return NAN;
}

TEST(GrayImage, Construction) {
  EXPECT_EQ(error_of([] { GrayImage(0, 5); }), ErrorCode::InvalidArgument);
  EXPECT_EQ(error_of([] { GrayImage(2, 2, std::vector<std::uint8_t>(3)); }), ErrorCode::InvalidArgument);
  const GrayImage g(3, 2, 7);
  EXPECT_EQ(g.samples().size(), 6u);
  EXPECT_EQ(g.at(2, 1), 7);
  EXPECT_EQ(error_of([&] { g.crop(2, 0, 2, 2); }), ErrorCode::OutOfRange);
}

TEST(Warp, IdentityIsExact) {
  const auto src = gradient(64, 48);
  EXPECT_EQ(warp_image(src, Homography::identity(), {64, 48}), src);
}

TEST(Warp, IntegerTranslationIsExactWithZeroFill) {
  const auto src = gradient(64, 48);
  Mat3 t = Mat3::Identity();
  t(0, 2) = 5.0;
  const auto out = warp_image(src, Homography(t), {64, 48});
  for (int y = 0; y < 48; ++y) {
    for (int x = 0; x < 64; ++x) {
      EXPECT_EQ(out.at(x, y), x < 5 ? 0 : src.at(x - 5, y)) << x << "," << y;
    }
  }
}

TEST(Warp, RoundTripOfSmoothImage) {
  const auto src = gradient(120, 100);
  Mat3 h;
  h << 0.97, 0.05, 2.3, -0.04, 1.02, -1.7, 1e-4, -5e-5, 1.0;
  const Homography fwd(h);
  const auto back = warp_image(warp_image(src, fwd, {120, 100}), fwd.inverse(), {120, 100});
  double err = 0.0;
  int n = 0;
  for (int y = 15; y < 85; ++y)
    for (int x = 15; x < 105; ++x) {
      err += std::abs(static_cast<double>(back.at(x, y)) - src.at(x, y));
      ++n;
    }
  EXPECT_LE(err / n, 1.0);
}

TEST(Warp, SingularHomographyRejected) {
  Mat3 h = Mat3::Zero();
  h(0, 0) = 1.0;
  EXPECT_EQ(error_of([&] { warp_image(gradient(8, 8), Homography(h), {8, 8}); }), ErrorCode::DegenerateHomography);
}

TEST(SlantedEdge, GeometricConstruction) {
  const auto img = slanted_edge_pattern(kEdgeSize, 5.0, 0, 255);
  const double drift = std::tan(test::deg(5.0));
  double sy = 0.0, sc = 0.0, syy = 0.0, syc = 0.0;
  for (int y = 0; y < kEdgeSize.height; ++y) {
    EXPECT_EQ(img.at(0, y), 0);
    EXPECT_EQ(img.at(kEdgeSize.width - 1, y), 255);
    int transitions = 0;
    double centroid = 0.0;
    double total = 0.0;
    for (int x = 0; x + 1 < kEdgeSize.width; ++x) {
      const int d = img.at(x + 1, y) - img.at(x, y);
      EXPECT_GE(d, 0);
      if (d != 0 && (x == 0 || img.at(x, y) == img.at(x - 1, y))) ++transitions;
      centroid += (x + 0.5) * d;
      total += d;
    }
    EXPECT_LE(transitions, 1) << "row " << y;
    // Edge line x = cx + tan(a) (y - cy); a 4x4 supersample places each row to 1/8 px.
    const double c = centroid / total;
    EXPECT_NEAR(c, 63.5 + drift * (y - 63.5), 0.125 + 1e-9) << "row " << y;
    sy += y;
    sc += c;
    syy += static_cast<double>(y) * y;
    syc += y * c;
  }
  const double n = kEdgeSize.height;
  const double slope = (n * syc - sy * sc) / (n * syy - sy * sy);
  const double intercept = (sc - slope * sy) / n;
  EXPECT_NEAR(slope, drift, 1e-3);
  EXPECT_NEAR(intercept + slope * 63.5, 63.5, 0.02);
}

TEST(SlantedEdge, MeanIsMidLevel) {
  for (double angle : {-8.0, -2.0, 3.0, 5.0, 10.0}) {
    const auto img = slanted_edge_pattern(kEdgeSize, angle, 40, 200);
    double sum = 0.0;
    for (auto v : img.samples()) sum += v;
    EXPECT_NEAR(sum / img.samples().size(), 120.0, 1.0) << angle;
  }
}

TEST(SlantedEdge, AngleRange) {
  EXPECT_EQ(error_of([] { slanted_edge_pattern(kEdgeSize, 0.0, 0, 255); }), ErrorCode::AngleOutOfRange);
  EXPECT_EQ(error_of([] { slanted_edge_pattern(kEdgeSize, 1.9, 0, 255); }), ErrorCode::AngleOutOfRange);
  EXPECT_EQ(error_of([] { slanted_edge_pattern(kEdgeSize, -12.0, 0, 255); }), ErrorCode::AngleOutOfRange);
}

TEST(GaussianBlur, ZeroSigmaIsIdentity) {
  const auto src = slanted_edge_pattern(kEdgeSize, 5.0, 10, 240);
  EXPECT_EQ(gaussian_blur(src, 0.0), src);
  EXPECT_EQ(error_of([&] { gaussian_blur(src, -1.0); }), ErrorCode::InvalidArgument);
}

TEST(GaussianBlur, KernelMatchesDirectEvaluation) {
  for (double sigma : {0.7, 1.5, 2.0, 3.3}) {
    const auto k = gaussian_kernel(sigma);
    const int r = static_cast<int>(std::ceil(4.0 * sigma));
    ASSERT_EQ(k.size(), static_cast<std::size_t>(2 * r + 1));
    double norm = 0.0;
    for (int i = -r; i <= r; ++i) norm += std::exp(-i * i / (2 * sigma * sigma));
    for (int i = -r; i <= r; ++i) EXPECT_NEAR(k[i + r], std::exp(-i * i / (2 * sigma * sigma)) / norm, 1e-12);
  }
}

TEST(GaussianBlur, ImpulseResponse) {
  GrayImage impulse(41, 41, 0);
  impulse.at(20, 20) = 255;
  const double sigma = 1.0;
  const auto out = gaussian_blur(impulse, sigma);
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const double expected = 255.0 * std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma)) / (2 * test::kPi);
      EXPECT_NEAR(out.at(20 + dx, 20 + dy) / 255.0, expected / 255.0, 1e-3 + 0.5 / 255.0);
    }
}

TEST(GaussianBlur, ConservesInteriorIntensity) {
  GrayImage img(64, 64, 0);
  for (int y = 24; y < 40; ++y)
    for (int x = 24; x < 40; ++x) img.at(x, y) = 200;
  const auto out = gaussian_blur(img, 2.0);
  double before = 0.0, after = 0.0;
  for (auto v : img.samples()) before += v;
  for (auto v : out.samples()) after += v;
  EXPECT_NEAR(after / before, 1.0, 1e-3);
}

TEST(Esf, IdealStepIsSharp) {
  const auto p = esf_from_roi(slanted_edge_pattern(kEdgeSize, 5.0, 20, 220, 1));
  int transition = 0;
  for (double v : p.esf)
    if (v > 21.0 && v < 219.0) ++transition;
  EXPECT_LE(transition, 2);
  EXPECT_NEAR(p.edge_angle_deg, 5.0, 0.1);
}

TEST(Esf, BlurredEdgeMatchesErrorFunction) {
  const double sigma = 2.0;
  const auto p = esf_from_roi(blurred_edge(sigma));
  double sq = 0.0;
  for (std::size_t i = 0; i < p.esf.size(); ++i) {
    const double e = p.esf[i] - oracle::gaussian_esf(20, 220, sigma, p.positions[i]);
    sq += e * e;
  }
  EXPECT_LE(std::sqrt(sq / p.esf.size()), 2.0);
  for (std::size_t i = 1; i < p.positions.size(); ++i) EXPECT_GT(p.positions[i], p.positions[i - 1]);
}

TEST(Esf, UniformRegionHasNoEdge) {
  EXPECT_EQ(error_of([] { esf_from_roi(GrayImage(64, 64, 128)); }), ErrorCode::NoEdgeFound);
}

TEST(Esf, NoiseWithoutEdgeIsRejected) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> v(0, 255);
  GrayImage img(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) img.at(x, y) = static_cast<std::uint8_t>(v(rng));
  EXPECT_EQ(error_of([&] { esf_from_roi(img); }), ErrorCode::NoEdgeFound);
}

TEST(Esf, VerticalFlipInvariance) {
  const auto img = blurred_edge(1.5);
  const auto a = esf_from_roi(img);
  const auto b = esf_from_roi(flipped_vertically(img));
  EXPECT_NEAR(a.edge_angle_deg, -b.edge_angle_deg, 0.05);
  EXPECT_NEAR(crossing(a), crossing(b), 1.0 / a.oversample);
  const double m1 = mtf50(mtf_from_esf(a), 1.0).cycles_per_pixel;
  const double m2 = mtf50(mtf_from_esf(b), 1.0).cycles_per_pixel;
  EXPECT_NEAR(m1, m2, 0.01 * m1);
}

TEST(Mtf, IdealStepIsNearlyFlat) {
  const auto curve = analyze(slanted_edge_pattern(kEdgeSize, 5.0, 20, 220, 1));
  EXPECT_GE(curve.at(0.25), 0.8);
}

TEST(Mtf, NormalizedAtDc) {
  const auto curve = analyze(blurred_edge(2.0));
  EXPECT_NEAR(curve.response.front(), 1.0, 1e-6);
  EXPECT_EQ(curve.frequencies.front(), 0.0);
  const auto r = curve.reported();
  EXPECT_LE(r.frequencies.back(), 0.5 + 1e-12);
  EXPECT_NEAR(r.frequencies.back(), 0.5, 1e-9);
}

class GaussianMtf : public ::testing::TestWithParam<double> {};

TEST_P(GaussianMtf, MatchesAnalyticTransfer) {
  const double sigma = GetParam();
  const auto curve = analyze(blurred_edge(sigma));
  for (std::size_t i = 0; i < curve.frequencies.size() && curve.frequencies[i] <= 0.3 + 1e-12; ++i) {
    const double f = curve.frequencies[i];
    EXPECT_NEAR(curve.response[i], oracle::gaussian_mtf(sigma, f), 0.05) << "f = " << f;
  }
  const double m50 = mtf50(curve, 1.0).cycles_per_pixel;
  EXPECT_NEAR(m50, oracle::gaussian_mtf50(sigma), 0.05 * oracle::gaussian_mtf50(sigma));
}

INSTANTIATE_TEST_SUITE_P(Sigmas, GaussianMtf, ::testing::Values(1.0, 2.0, 3.0));

TEST(Mtf, SigmaTwoHalfContrast) {
  EXPECT_NEAR(oracle::gaussian_mtf50(2.0), 0.0937, 1e-4);
  const double m50 = mtf50(analyze(blurred_edge(2.0)), 0.05).cycles_per_pixel;
  EXPECT_NEAR(m50, 0.0937, 0.05 * 0.0937);
}

TEST(Mtf, InvariantUnderIntensityScaleAndOffset) {
  const auto base = slanted_edge_pattern(kEdgeSize, 5.0, 10, 110, 4);
  const auto blurred = gaussian_blur(base, 1.5);
  GrayImage doubled(kEdgeSize.width, kEdgeSize.height);
  GrayImage shifted(kEdgeSize.width, kEdgeSize.height);
  for (int y = 0; y < kEdgeSize.height; ++y)
    for (int x = 0; x < kEdgeSize.width; ++x) {
      doubled.at(x, y) = static_cast<std::uint8_t>(2 * blurred.at(x, y));
      shifted.at(x, y) = static_cast<std::uint8_t>(blurred.at(x, y) + 100);
    }
  const auto a = analyze(blurred);
  const auto b = analyze(doubled);
  const auto c = analyze(shifted);
  ASSERT_EQ(a.response.size(), b.response.size());
  ASSERT_EQ(a.response.size(), c.response.size());
  for (std::size_t i = 0; i < a.response.size(); ++i) {
    EXPECT_NEAR(a.response[i], b.response[i], 1e-6);
    EXPECT_NEAR(a.response[i], c.response[i], 1e-6);
  }
}

TEST(Mtf, HalfContrastFallsWithBlur) {
  double prev = 1.0;
  for (double sigma : {0.5, 1.0, 2.0, 4.0}) {
    const auto img = gaussian_blur(slanted_edge_pattern(kEdgeSize, 5.0, 20, 220, 4), sigma);
    const double m50 = mtf50(analyze(img), 1.0).cycles_per_pixel;
    EXPECT_LT(m50, prev) << "sigma " << sigma;
    prev = m50;
  }
}

TEST(Mtf, SevenCyclesPerDegreeTarget) {
  const double pitch = 0.05;
  const double target_cpd = 7.0;
  const double sigma = oracle::gaussian_sigma_for_mtf50(target_cpd * pitch);
  EXPECT_NEAR(sigma, 0.535, 1e-3);
  const auto img = oracle::rendered_blurred_edge(128, 128, 5.0, 20, 220, sigma);
  EXPECT_NEAR(mtf50(analyze(img), pitch).cycles_per_degree, target_cpd, 0.05 * target_cpd);
}

TEST(Mtf50, UnitConversionAndErrors) {
  MtfCurve c;
  c.frequencies = {0.0, 0.1, 0.2, 0.3};
  c.response = {1.0, 0.8, 0.5, 0.2};
  const auto m = mtf50(c, 0.05);
  EXPECT_NEAR(m.cycles_per_pixel, 0.2, 1e-12);
  EXPECT_NEAR(m.cycles_per_degree, 4.0, 1e-9);
  c.response = {1.0, 0.9, 0.8, 0.7};
  EXPECT_EQ(error_of([&] { mtf50(c, 0.05); }), ErrorCode::NoHalfContrastCrossing);
  EXPECT_EQ(error_of([&] { mtf50(c, 0.0); }), ErrorCode::NonPositiveInput);
}

TEST(Mtf, ShortProfileRejected) {
  EdgeProfile p;
  for (int i = 0; i < 20; ++i) {
    p.positions.push_back(i * 0.25);
    p.esf.push_back(i < 10 ? 0.0 : 1.0);
  }
  EXPECT_EQ(error_of([&] { mtf_from_esf(p); }), ErrorCode::ProfileTooShort);
}

TEST(Pgm, RoundTripIsBitExact) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> v(0, 255);
  GrayImage img(37, 23);
  for (int y = 0; y < 23; ++y)
    for (int x = 0; x < 37; ++x) img.at(x, y) = static_cast<std::uint8_t>(v(rng));
  const auto bytes = encode_pgm(img);
  EXPECT_EQ(decode_pgm(bytes), img);
  const auto path = std::filesystem::temp_directory_path() / "beam_pgm_roundtrip.pgm";
  write_pgm(img, path);
  EXPECT_EQ(read_pgm(path), img);
  std::filesystem::remove(path);
}

TEST(Pgm, RejectsMalformedInput) {
  const std::string p2 = "P2\n2 2\n255\n0 0 0 0\n";
  EXPECT_EQ(error_of([&] { decode_pgm({reinterpret_cast<const std::uint8_t*>(p2.data()), p2.size()}); }),
            ErrorCode::Io);
  const std::string truncated = "P5\n4 4\n255\nabc";
  EXPECT_EQ(error_of([&] {
              decode_pgm({reinterpret_cast<const std::uint8_t*>(truncated.data()), truncated.size()});
            }),
            ErrorCode::Io);
  const std::string deep = "P5\n1 1\n65535\n\x01\x02";
  EXPECT_EQ(error_of([&] { decode_pgm({reinterpret_cast<const std::uint8_t*>(deep.data()), deep.size()}); }),
            ErrorCode::Io);
  EXPECT_EQ(error_of([] { read_pgm("/nonexistent/beam.pgm"); }), ErrorCode::Io);
}

}  // namespace
}  // namespace beam::imaging
