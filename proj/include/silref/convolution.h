#pragma once

#include <string>
#include <vector>

#include "silref/image.h"

namespace silref {

enum class KernelKind { kBox, kGaussian };

std::string ToString(KernelKind kind);
KernelKind ParseKernelKind(const std::string& name);

/**
 * Separable, symmetric low-pass kernel with unit DC gain.
 *
 * The 2D kernel is the outer product of `Weights1d()` with itself; both the
 * 1D and 2D weights are non-negative and sum to one. Convolution divides the
 * raw tap sum by the tap total accumulated in the same order, which makes a
 * constant image a bit-exact fixed point.
 */
class Kernel {
 public:
  Kernel() = default;

  KernelKind kind() const { return kind_; }
  int size() const { return size_; }
  int half() const { return size_ / 2; }
  double gaussian_sigma() const { return sigma_; }

  const std::vector<double>& taps() const { return taps_; }
  double tap_total() const { return tap_total_; }

  std::vector<double> Weights1d() const;
  // size x size, row-major.
  std::vector<double> Weights2d() const;

  std::string Fingerprint() const;

  friend Kernel BuildKernel(KernelKind kind, int size, double sigma);

 private:
  KernelKind kind_ = KernelKind::kBox;
  int size_ = 0;
  double sigma_ = 0.0;
  std::vector<double> taps_;
  double tap_total_ = 0.0;
};

// Throws InvalidSize unless size is odd and >= 3. A non-positive sigma
// selects the default size / 6 for Gaussians; ignored for box kernels.
Kernel BuildKernel(KernelKind kind, int size, double sigma = 0.0);

/// g * image with replicate (edge-clamp) padding, separable evaluation.
SilhouetteImage Convolve(const SilhouetteImage& image, const Kernel& g);

/// Adjoint of Convolve: <Convolve(x), y> == <x, ConvolveAdjoint(y)>.
SilhouetteImage ConvolveAdjoint(const SilhouetteImage& image, const Kernel& g);

}  // namespace silref
