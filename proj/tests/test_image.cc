#include <sstream>

#include <gtest/gtest.h>

#include "silref/errors.h"
#include "silref/image.h"

namespace silref {
namespace {

TEST(SilhouetteImage, BasicAccessors) {
  SilhouetteImage img(4, 3);
  EXPECT_EQ(img.size(), 12u);
  img(1, 2) = 0.75;
  img(3, 0) = 0.25;
  EXPECT_EQ(img[img.Index(1, 2)], 0.75);
  EXPECT_EQ(img.Index(1, 2), 9u);
  EXPECT_DOUBLE_EQ(img.Sum(), 1.0);
  EXPECT_EQ(img.Count(0.5), 1u);
  EXPECT_EQ(img.Count(0.25), 2u);
  const SilhouetteImage t = img.Thresholded(0.5);
  EXPECT_EQ(t(1, 2), 1.0);
  EXPECT_EQ(t(3, 0), 0.0);
}

TEST(SilhouetteImage, ShiftedMovesAndZeroFills) {
  SilhouetteImage img(5, 5);
  img(0, 0) = 1.0;
  img(4, 4) = 1.0;
  const SilhouetteImage s = img.Shifted(2, 1);
  EXPECT_EQ(s(2, 1), 1.0);
  EXPECT_EQ(s.Sum(), 1.0);  // (4, 4) left the frame
  const SilhouetteImage back = s.Shifted(-2, -1);
  EXPECT_EQ(back(0, 0), 1.0);
}

TEST(Pgm, RoundTripsEightBitValues) {
  SilhouetteImage img(7, 2);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = double(i * 17 % 256) / 255.0;
  std::stringstream ss;
  WritePgm(img, ss);
  const std::string bytes = ss.str();
  EXPECT_EQ(bytes.substr(0, 11), "P5\n7 2\n255\n");
  EXPECT_EQ(bytes.size(), 11u + 14u);
  const SilhouetteImage back = ReadPgm(ss, PgmMode::kSoft);
  ASSERT_TRUE(back.SameShape(img));
  for (std::size_t i = 0; i < img.size(); ++i) EXPECT_EQ(back[i], img[i]);
}

TEST(Pgm, HardMasksUseZeroAnd255) {
  SilhouetteImage img(2, 1);
  img[1] = 1.0;
  std::stringstream ss;
  WritePgm(img, ss);
  const std::string raster = ss.str().substr(ss.str().size() - 2);
  EXPECT_EQ(static_cast<unsigned char>(raster[0]), 0);
  EXPECT_EQ(static_cast<unsigned char>(raster[1]), 255);
}

TEST(Pgm, BinarizeThresholdIs128) {
  std::string data = "P5\n# comment\n3 1\n255\n";
  data += static_cast<char>(127);
  data += static_cast<char>(128);
  data += static_cast<char>(255);
  std::istringstream in(data);
  const SilhouetteImage img = ReadPgm(in, PgmMode::kBinarize);
  EXPECT_EQ(img[0], 0.0);
  EXPECT_EQ(img[1], 1.0);
  EXPECT_EQ(img[2], 1.0);
}

TEST(Pgm, MalformedInputs) {
  std::istringstream p2("P2\n1 1\n255\n0\n");
  EXPECT_THROW(ReadPgm(p2, PgmMode::kSoft), ParseError);
  std::istringstream deep("P5\n1 1\n65535\n\0\0");
  EXPECT_THROW(ReadPgm(deep, PgmMode::kSoft), ParseError);
  std::istringstream truncated("P5\n4 4\n255\nabc");
  EXPECT_THROW(ReadPgm(truncated, PgmMode::kSoft), ParseError);
  EXPECT_THROW(LoadPgm("/nonexistent.pgm", PgmMode::kSoft), IoError);
}

}  // namespace
}  // namespace silref
