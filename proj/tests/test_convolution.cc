#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "silref/convolution.h"
#include "silref/errors.h"

namespace silref {
namespace {

SilhouetteImage RandomImage(int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SilhouetteImage img(w, h);
  for (double& v : img.values()) v = u(rng);
  return img;
}

// Direct 2D sum with coordinates clamped to the frame.
SilhouetteImage BruteForce(const SilhouetteImage& img, const Kernel& g) {
  const std::vector<double> w2 = g.Weights2d();
  const int n = g.size();
  const int h = g.half();
  SilhouetteImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      long double acc = 0.0L;
      for (int ky = 0; ky < n; ++ky) {
        for (int kx = 0; kx < n; ++kx) {
          const int sx = std::clamp(x - (kx - h), 0, img.width() - 1);
          const int sy = std::clamp(y - (ky - h), 0, img.height() - 1);
          acc += static_cast<long double>(w2[ky * n + kx]) * img(sx, sy);
        }
      }
      out(x, y) = static_cast<double>(acc);
    }
  }
  return out;
}

TEST(Kernel, WeightsAreNormalizedAndSymmetric) {
  for (const Kernel& g : {BuildKernel(KernelKind::kBox, 49),
                          BuildKernel(KernelKind::kGaussian, 69),
                          BuildKernel(KernelKind::kGaussian, 7, 2.5)}) {
    const std::vector<double> w1 = g.Weights1d();
    ASSERT_EQ(static_cast<int>(w1.size()), g.size());
    EXPECT_NEAR(std::accumulate(w1.begin(), w1.end(), 0.0), 1.0, 1e-14);
    for (int i = 0; i < g.size(); ++i) {
      EXPECT_GE(w1[i], 0.0);
      EXPECT_EQ(w1[i], w1[g.size() - 1 - i]);
    }
    const std::vector<double> w2 = g.Weights2d();
    EXPECT_NEAR(std::accumulate(w2.begin(), w2.end(), 0.0), 1.0, 1e-13);
  }
  EXPECT_DOUBLE_EQ(BuildKernel(KernelKind::kGaussian, 69).gaussian_sigma(), 69.0 / 6.0);
}

TEST(Kernel, RejectsInvalidSizes) {
  EXPECT_THROW(BuildKernel(KernelKind::kBox, 4), InvalidSize);
  EXPECT_THROW(BuildKernel(KernelKind::kBox, 1), InvalidSize);
  EXPECT_THROW(BuildKernel(KernelKind::kGaussian, -3), InvalidSize);
  EXPECT_THROW(ParseKernelKind("median"), InvalidConfig);
  EXPECT_EQ(ParseKernelKind("box"), KernelKind::kBox);
}

TEST(Convolve, MatchesBruteForce2d) {
  std::mt19937_64 rng(51);
  for (const Kernel& g : {BuildKernel(KernelKind::kBox, 5),
                          BuildKernel(KernelKind::kGaussian, 9),
                          BuildKernel(KernelKind::kBox, 49)}) {
    const SilhouetteImage img = RandomImage(37, 23, rng);
    const SilhouetteImage fast = Convolve(img, g);
    const SilhouetteImage slow = BruteForce(img, g);
    for (std::size_t i = 0; i < img.size(); ++i) ASSERT_NEAR(fast[i], slow[i], 1e-12);
  }
}

TEST(Convolve, ConstantImageIsExactFixedPoint) {
  SilhouetteImage img(31, 17);
  for (double& v : img.values()) v = 1.0;
  const SilhouetteImage out = Convolve(img, BuildKernel(KernelKind::kGaussian, 69));
  for (double v : out.values()) ASSERT_EQ(v, 1.0);
}

TEST(Convolve, AdjointIdentity) {
  std::mt19937_64 rng(52);
  for (const Kernel& g : {BuildKernel(KernelKind::kBox, 49),
                          BuildKernel(KernelKind::kGaussian, 13)}) {
    for (int trial = 0; trial < 5; ++trial) {
      const SilhouetteImage x = RandomImage(40, 30, rng);
      const SilhouetteImage y = RandomImage(40, 30, rng);
      const SilhouetteImage gx = Convolve(x, g);
      const SilhouetteImage gty = ConvolveAdjoint(y, g);
      double lhs = 0.0, rhs = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        lhs += gx[i] * y[i];
        rhs += x[i] * gty[i];
      }
      EXPECT_NEAR(lhs, rhs, 1e-10 * std::abs(lhs));
    }
  }
}

TEST(Convolve, ImpulseAwayFromBorderReproducesKernel) {
  const Kernel g = BuildKernel(KernelKind::kGaussian, 7, 1.3);
  SilhouetteImage img(15, 15);
  img(7, 7) = 1.0;
  const SilhouetteImage out = Convolve(img, g);
  const std::vector<double> w2 = g.Weights2d();
  for (int y = 0; y < 7; ++y) {
    for (int x = 0; x < 7; ++x) EXPECT_NEAR(out(4 + x, 4 + y), w2[y * 7 + x], 1e-15);
  }
  EXPECT_EQ(out(0, 0), 0.0);
}

}  // namespace
}  // namespace silref
