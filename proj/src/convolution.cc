#include "silref/convolution.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "silref/errors.h"

namespace silref {
namespace {

// out[i] = sum_k tap[k] in[clamp(i - (k - h))] / total
void ConvolveLine(const double* in, double* out, int n,
                  const std::vector<double>& taps, double total) {
  const int h = static_cast<int>(taps.size()) / 2;
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int k = 0; k < static_cast<int>(taps.size()); ++k) {
      const int src = std::clamp(i - (k - h), 0, n - 1);
      acc += taps[k] * in[src];
    }
    out[i] = acc / total;
  }
}

// Transpose of ConvolveLine: scatter each input into the clamped taps.
void ConvolveLineAdjoint(const double* in, double* out, int n,
                         const std::vector<double>& taps, double total) {
  const int h = static_cast<int>(taps.size()) / 2;
  std::fill(out, out + n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double v = in[i] / total;
    if (v == 0.0) continue;
    for (int k = 0; k < static_cast<int>(taps.size()); ++k) {
      const int dst = std::clamp(i - (k - h), 0, n - 1);
      out[dst] += taps[k] * v;
    }
  }
}

template <typename LineOp>
SilhouetteImage Separable(const SilhouetteImage& image, const Kernel& g,
                          LineOp op) {
  const int w = image.width();
  const int h = image.height();
  SilhouetteImage rows(w, h);
  for (int y = 0; y < h; ++y) {
    op(&image.values()[static_cast<std::size_t>(y) * w],
       &rows.values()[static_cast<std::size_t>(y) * w], w, g.taps(),
       g.tap_total());
  }
  SilhouetteImage out(w, h);
  std::vector<double> col_in(h), col_out(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) col_in[y] = rows(x, y);
    op(col_in.data(), col_out.data(), h, g.taps(), g.tap_total());
    for (int y = 0; y < h; ++y) out(x, y) = col_out[y];
  }
  return out;
}

}  // namespace

std::string ToString(KernelKind kind) {
  return kind == KernelKind::kBox ? "box" : "gaussian";
}

KernelKind ParseKernelKind(const std::string& name) {
  if (name == "box") return KernelKind::kBox;
  if (name == "gaussian" || name == "gauss") return KernelKind::kGaussian;
  throw InvalidConfig("unknown kernel kind '" + name + "'");
}

Kernel BuildKernel(KernelKind kind, int size, double sigma) {
  if (size < 3 || size % 2 == 0) {
    throw InvalidSize("kernel size must be odd and >= 3, got " +
                      std::to_string(size));
  }
  Kernel g;
  g.kind_ = kind;
  g.size_ = size;
  g.taps_.resize(size);
  const int h = size / 2;
  if (kind == KernelKind::kBox) {
    std::fill(g.taps_.begin(), g.taps_.end(), 1.0);
  } else {
    g.sigma_ = sigma > 0.0 ? sigma : size / 6.0;
    for (int i = 0; i < size; ++i) {
      const double x = i - h;
      g.taps_[i] = std::exp(-0.5 * x * x / (g.sigma_ * g.sigma_));
    }
  }
  g.tap_total_ = 0.0;
  for (double t : g.taps_) g.tap_total_ += t;
  return g;
}

std::vector<double> Kernel::Weights1d() const {
  std::vector<double> w(taps_.size());
  for (std::size_t i = 0; i < taps_.size(); ++i) w[i] = taps_[i] / tap_total_;
  return w;
}

std::vector<double> Kernel::Weights2d() const {
  const std::vector<double> w = Weights1d();
  std::vector<double> out(w.size() * w.size());
  for (std::size_t r = 0; r < w.size(); ++r) {
    for (std::size_t c = 0; c < w.size(); ++c) out[r * w.size() + c] = w[r] * w[c];
  }
  return out;
}

std::string Kernel::Fingerprint() const {
  std::ostringstream ss;
  ss << ToString(kind_) << size_;
  if (kind_ == KernelKind::kGaussian) ss << "/s" << sigma_;
  return ss.str();
}

SilhouetteImage Convolve(const SilhouetteImage& image, const Kernel& g) {
  return Separable(image, g, ConvolveLine);
}

SilhouetteImage ConvolveAdjoint(const SilhouetteImage& image, const Kernel& g) {
  return Separable(image, g, ConvolveLineAdjoint);
}

}  // namespace silref
