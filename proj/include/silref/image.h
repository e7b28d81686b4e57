#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace silref {

/// Dense row-major scalar image with values in [0, 1]. Holds both hard
/// ({0, 1}) masks and soft coverage.
class SilhouetteImage {
 public:
  SilhouetteImage() = default;
  SilhouetteImage(int width, int height, double fill = 0.0);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int x, int y) { return values_[Index(x, y)]; }
  double operator()(int x, int y) const { return values_[Index(x, y)]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  std::size_t Index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }
  bool SameShape(const SilhouetteImage& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  double Sum() const;
  // Number of pixels with value >= threshold.
  std::size_t Count(double threshold = 0.5) const;
  SilhouetteImage Thresholded(double threshold = 0.5) const;
  // Integer translation; pixels shifted in from outside are zero.
  SilhouetteImage Shifted(int dx, int dy) const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> values_;
};

// Binary PGM (P5), maxval 255, value v encodes alpha = v / 255.
void WritePgm(const SilhouetteImage& image, std::ostream& out);
void SavePgm(const SilhouetteImage& image, const std::string& path);

enum class PgmMode {
  kSoft,      // alpha = v / 255
  kBinarize,  // 1 iff v >= 128
};
SilhouetteImage ReadPgm(std::istream& in, PgmMode mode);
SilhouetteImage LoadPgm(const std::string& path, PgmMode mode);

}  // namespace silref
