#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "beam/error.hpp"
#include "beam/imaging.hpp"

namespace beam::imaging {

namespace {

constexpr double kMinRowContrast = 8.0;  // intensity levels
constexpr double kMaxFitResidual = 2.0;  // pixels
constexpr double kFrequencyStep = 0.005; // cy/px
constexpr double kMaxFrequency = 1.0;    // cy/px

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
}

}  // namespace

EdgeProfile esf_from_roi(const GrayImage& roi, double oversample) {
  if (!(oversample >= 1.0)) fail(ErrorCode::InvalidArgument, "oversample must be >= 1");
  const int w = roi.width();
  const int h = roi.height();
  if (w < 4 || h < 2) fail(ErrorCode::NoEdgeFound, "region of interest too small");

  // Edge crossing per row from the centroid of the horizontal derivative.
  std::vector<double> ys;
  std::vector<double> xs;
  double contrast_sum = 0.0;
  for (int y = 0; y < h; ++y) {
    double s = 0.0;
    double m = 0.0;
    for (int x = 0; x + 1 < w; ++x) {
      const double d = static_cast<double>(roi.at(x + 1, y)) - roi.at(x, y);
      s += d;
      m += (x + 0.5) * d;
    }
    contrast_sum += std::abs(s);
    if (std::abs(s) >= kMinRowContrast) {
      ys.push_back(y);
      xs.push_back(m / s);
    }
  }
  if (contrast_sum / h < kMinRowContrast || ys.size() < std::max<std::size_t>(2, h / 2)) {
    fail(ErrorCode::NoEdgeFound, "no dominant edge in the region of interest");
  }

  // x = a + b y by least squares.
  const double n = static_cast<double>(ys.size());
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    syy += (ys[i] - my) * (ys[i] - my);
    sxy += (ys[i] - my) * (xs[i] - mx);
  }
  const double b = syy > 0.0 ? sxy / syy : 0.0;
  const double a = mx - b * my;
  double sq = 0.0;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double r = xs[i] - (a + b * ys[i]);
    sq += r * r;
  }
  if (std::sqrt(sq / n) > kMaxFitResidual) {
    fail(ErrorCode::NoEdgeFound, "edge crossings do not follow a straight line");
  }

  // Signed distance to the line along its normal; keep the range every row covers.
  const double c = 1.0 / std::sqrt(1.0 + b * b);
  double lo = -1e300;
  double hi = 1e300;
  for (int y = 0; y < h; ++y) {
    const double xe = a + b * y;
    lo = std::max(lo, (0.0 - xe) * c);
    hi = std::min(hi, (w - 1 - xe) * c);
  }
  const auto k_lo = static_cast<long>(std::ceil(lo * oversample));
  const auto k_hi = static_cast<long>(std::floor(hi * oversample));
  if (k_hi - k_lo < 2) fail(ErrorCode::NoEdgeFound, "edge too close to the region border");
  const auto bins = static_cast<std::size_t>(k_hi - k_lo);

  std::vector<double> sum(bins, 0.0);
  std::vector<int> count(bins, 0);
  for (int y = 0; y < h; ++y) {
    const double xe = a + b * y;
    for (int x = 0; x < w; ++x) {
      const double d = (x - xe) * c;
      const auto k = static_cast<long>(std::floor(d * oversample)) - k_lo;
      if (k < 0 || k >= static_cast<long>(bins)) continue;
      sum[k] += roi.at(x, y);
      count[k] += 1;
    }
  }

  EdgeProfile p;
  p.oversample = oversample;
  p.edge_angle_deg = std::atan(b) * 180.0 / std::numbers::pi;
  p.positions.resize(bins);
  p.esf.assign(bins, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < bins; ++k) {
    p.positions[k] = (static_cast<double>(k_lo) + static_cast<double>(k) + 0.5) / oversample;
    if (count[k] > 0) p.esf[k] = sum[k] / count[k];
  }
  // Fill empty bins from their populated neighbours.
  std::size_t first = 0;
  while (first < bins && std::isnan(p.esf[first])) ++first;
  if (first == bins) fail(ErrorCode::NoEdgeFound, "no samples along the edge normal");
  for (std::size_t k = 0; k < first; ++k) p.esf[k] = p.esf[first];
  std::size_t prev = first;
  for (std::size_t k = first + 1; k < bins; ++k) {
    if (std::isnan(p.esf[k])) continue;
    for (std::size_t j = prev + 1; j < k; ++j) {
      const double u = static_cast<double>(j - prev) / static_cast<double>(k - prev);
      p.esf[j] = p.esf[prev] + u * (p.esf[k] - p.esf[prev]);
    }
    prev = k;
  }
  for (std::size_t k = prev + 1; k < bins; ++k) p.esf[k] = p.esf[prev];
  return p;
}

MtfCurve mtf_from_esf(const EdgeProfile& p) {
  if (p.esf.size() < 32) fail(ErrorCode::ProfileTooShort, "edge profile needs at least 32 bins");
  if (p.positions.size() != p.esf.size()) fail(ErrorCode::InvalidArgument, "profile length mismatch");
  const double dx = 1.0 / p.oversample;

  std::vector<double> lsf(p.esf.size() - 1);
  for (std::size_t i = 0; i + 1 < p.esf.size(); ++i) lsf[i] = p.esf[i + 1] - p.esf[i];

  const auto peak = static_cast<std::size_t>(
      std::distance(lsf.begin(), std::max_element(lsf.begin(), lsf.end(), [](double x, double y) {
                      return std::abs(x) < std::abs(y);
                    })));
  const double half = static_cast<double>(std::max(peak, lsf.size() - 1 - peak)) + 1.0;
  for (std::size_t i = 0; i < lsf.size(); ++i) {
    const double u = (static_cast<double>(i) - static_cast<double>(peak)) / half;
    lsf[i] *= 0.5 * (1.0 + std::cos(std::numbers::pi * u));
  }

  const double dc = std::abs(std::accumulate(lsf.begin(), lsf.end(), 0.0));
  if (!(dc > 1e-9)) fail(ErrorCode::NoEdgeFound, "edge profile has no contrast");

  MtfCurve curve;
  const auto steps = static_cast<int>(std::lround(kMaxFrequency / kFrequencyStep));
  for (int j = 0; j <= steps; ++j) {
    const double f = j * kFrequencyStep;
    std::complex<double> acc = 0.0;
    for (std::size_t i = 0; i < lsf.size(); ++i) {
      const double phase = -2.0 * std::numbers::pi * f * (static_cast<double>(i) - static_cast<double>(peak)) * dx;
      acc += lsf[i] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    curve.frequencies.push_back(f);
    curve.response.push_back(j == 0 ? 1.0 : std::abs(acc) / dc / sinc(f * dx));
  }
  return curve;
}

MtfCurve MtfCurve::reported() const {
  MtfCurve out;
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    if (frequencies[i] > 0.5 + 1e-12) break;
    out.frequencies.push_back(frequencies[i]);
    out.response.push_back(response[i]);
  }
  return out;
}

double MtfCurve::at(double f) const {
  if (frequencies.empty()) fail(ErrorCode::InvalidArgument, "empty MTF curve");
  if (f <= frequencies.front()) return response.front();
  for (std::size_t i = 1; i < frequencies.size(); ++i) {
    if (f <= frequencies[i]) {
      const double u = (f - frequencies[i - 1]) / (frequencies[i] - frequencies[i - 1]);
      return response[i - 1] + u * (response[i] - response[i - 1]);
    }
  }
  return response.back();
}

Mtf50 mtf50(const MtfCurve& curve, double pitch_deg_per_px) {
  if (!(pitch_deg_per_px > 0.0)) fail(ErrorCode::NonPositiveInput, "pixel pitch must be positive");
  const auto& f = curve.frequencies;
  const auto& r = curve.response;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    if (r[i] >= 0.5 && r[i + 1] < 0.5) {
      const double cypx = f[i] + (r[i] - 0.5) / (r[i] - r[i + 1]) * (f[i + 1] - f[i]);
      return {cypx, cypx / pitch_deg_per_px};
    }
  }
  fail(ErrorCode::NoHalfContrastCrossing, "MTF never drops below half contrast");
}

}  // namespace beam::imaging
