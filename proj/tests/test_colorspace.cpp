#include <gtest/gtest.h>

#include "sparsedisp/colorspace.hpp"

namespace sparsedisp {
namespace {

double lightness(std::uint8_t r, std::uint8_t g, std::uint8_t b) { return rgb_to_lab({r, g, b}).l; }

TEST(Colorspace, ReferenceWhiteAndBlack) {
  EXPECT_NEAR(lightness(255, 255, 255), 100.0, 1e-3);
  EXPECT_NEAR(lightness(0, 0, 0), 0.0, 1e-9);
}

// Expected values computed beforehand with skimage.color.rgb2lab (sRGB, D65).
TEST(Colorspace, MatchesReferenceConverter) {
  EXPECT_NEAR(lightness(255, 0, 0), 53.2406, 0.05);
  EXPECT_NEAR(lightness(0, 255, 0), 87.7351, 0.05);
  EXPECT_NEAR(lightness(0, 0, 255), 32.2957, 0.05);
  EXPECT_NEAR(lightness(128, 128, 128), 53.5850, 0.05);
  EXPECT_NEAR(lightness(10, 20, 30), 5.9485, 0.05);
  const auto red = rgb_to_lab({255, 0, 0});
  EXPECT_NEAR(red.a, 80.0923, 0.1);
  EXPECT_NEAR(red.b, 67.2028, 0.1);
}

TEST(Colorspace, GrayAxisIsStrictlyMonotone) {
  double prev = -1.0;
  for (int v = 0; v <= 255; ++v) {
    const double l = lightness(v, v, v);
    EXPECT_GT(l, prev) << v;
    EXPECT_GE(l, 0.0);
    EXPECT_LE(l, 100.0);
    prev = l;
  }
  EXPECT_GT(lightness(128, 128, 128), lightness(0, 0, 0));
  EXPECT_LT(lightness(128, 128, 128), lightness(255, 255, 255));
}

TEST(Colorspace, ChannelOrderMattersOnlyForChromaticInput) {
  EXPECT_DOUBLE_EQ(lightness(77, 77, 77), lightness(77, 77, 77));
  EXPECT_GT(std::abs(lightness(255, 0, 0) - lightness(0, 255, 0)), 1.0);
}

TEST(Colorspace, MapPreservesShape) {
  RgbImage img(3, 2, Rgb{255, 255, 255});
  img(1, 1) = {0, 0, 0};
  const auto l = rgb_to_lightness(img);
  ASSERT_TRUE(l.same_shape(img));
  EXPECT_NEAR(l(0, 0), 100.0, 1e-3);
  EXPECT_NEAR(l(1, 1), 0.0, 1e-9);
}

}  // namespace
}  // namespace sparsedisp
