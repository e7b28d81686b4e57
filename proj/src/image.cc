#include "silref/image.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>

#include "silref/errors.h"

namespace silref {

SilhouetteImage::SilhouetteImage(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw InvalidSize("image size must be at least 1x1");
  }
  values_.assign(static_cast<std::size_t>(width) * height, fill);
}

double SilhouetteImage::Sum() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s;
}

std::size_t SilhouetteImage::Count(double threshold) const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(),
                    [threshold](double v) { return v >= threshold; }));
}

SilhouetteImage SilhouetteImage::Thresholded(double threshold) const {
  SilhouetteImage out(width_, height_);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    out.values_[i] = values_[i] >= threshold ? 1.0 : 0.0;
  }
  return out;
}

SilhouetteImage SilhouetteImage::Shifted(int dx, int dy) const {
  SilhouetteImage out(width_, height_);
  for (int y = 0; y < height_; ++y) {
    const int sy = y - dy;
    if (sy < 0 || sy >= height_) continue;
    for (int x = 0; x < width_; ++x) {
      const int sx = x - dx;
      if (sx < 0 || sx >= width_) continue;
      out(x, y) = (*this)(sx, sy);
    }
  }
  return out;
}

void WritePgm(const SilhouetteImage& image, std::ostream& out) {
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  std::vector<unsigned char> bytes(image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double a = std::clamp(image[i], 0.0, 1.0);
    bytes[i] = static_cast<unsigned char>(std::lround(a * 255.0));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

void SavePgm(const SilhouetteImage& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  WritePgm(image, out);
  if (!out) throw IoError("write failed for '" + path + "'");
}

namespace {

// Reads the next header integer, skipping whitespace and '#' comments.
int ReadHeaderInt(std::istream& in) {
  int c = in.peek();
  while (c != EOF) {
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
    } else if (std::isspace(c)) {
      in.get();
    } else {
      break;
    }
    c = in.peek();
  }
  int value = 0;
  if (!(in >> value)) throw ParseError("bad PGM header", 1);
  return value;
}

}  // namespace

SilhouetteImage ReadPgm(std::istream& in, PgmMode mode) {
  std::string magic(2, '\0');
  in.read(magic.data(), 2);
  if (!in || magic != "P5") throw ParseError("not a binary PGM (P5)", 1);
  const int width = ReadHeaderInt(in);
  const int height = ReadHeaderInt(in);
  const int maxval = ReadHeaderInt(in);
  if (width < 1 || height < 1 || maxval != 255) {
    throw ParseError("PGM must be 8-bit with positive size", 1);
  }
  in.get();  // single whitespace byte before the raster
  std::vector<unsigned char> bytes(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw ParseError("truncated PGM raster", 1);
  }
  SilhouetteImage image(width, height);
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    image[i] = mode == PgmMode::kBinarize ? (bytes[i] >= 128 ? 1.0 : 0.0)
                                          : bytes[i] / 255.0;
  }
  return image;
}

SilhouetteImage LoadPgm(const std::string& path, PgmMode mode) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return ReadPgm(in, mode);
}

}  // namespace silref
