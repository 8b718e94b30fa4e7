#include <cctype>
#include <fstream>
#include <iterator>
#include <string>

#include "beam/error.hpp"
#include "beam/imaging.hpp"

namespace beam::imaging {

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  long number() {
    skip_space_and_comments();
    long v = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      v = v * 10 + (bytes_[pos_++] - '0');
      if (++digits > 9) fail(ErrorCode::Io, "PGM header value too large");
    }
    if (digits == 0) fail(ErrorCode::Io, "malformed PGM header");
    return v;
  }

  std::size_t pos() const { return pos_; }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') {
    fail(ErrorCode::Io, "not a binary PGM (P5) image");
  }
  HeaderReader r(bytes);
  r.advance(2);
  const long w = r.number();
  const long h = r.number();
  const long maxval = r.number();
  if (w <= 0 || h <= 0) fail(ErrorCode::Io, "PGM dimensions must be positive");
  if (maxval != 255) fail(ErrorCode::Io, "only maxval 255 PGM images are supported");
  if (r.pos() >= bytes.size() || !std::isspace(bytes[r.pos()])) fail(ErrorCode::Io, "malformed PGM header");
  r.advance(1);
  const auto n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() - r.pos() < n) fail(ErrorCode::Io, "PGM pixel data truncated");
  std::vector<std::uint8_t> samples(bytes.begin() + static_cast<std::ptrdiff_t>(r.pos()),
                                    bytes.begin() + static_cast<std::ptrdiff_t>(r.pos() + n));
  return GrayImage(static_cast<int>(w), static_cast<int>(h), std::move(samples));
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  if (image.empty()) fail(ErrorCode::InvalidArgument, "cannot encode an empty image");
  const std::string header =
      "P5\n" + std::to_string(image.width()) + " " + std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.samples().begin(), image.samples().end());
  return out;
}

GrayImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_pgm(bytes);
}

void write_pgm(const GrayImage& image, const std::filesystem::path& path) {
  const auto bytes = encode_pgm(image);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace beam::imaging
