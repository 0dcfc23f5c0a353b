#include <gtest/gtest.h>

#include "droso/error.hpp"
#include "droso/imaging.hpp"
#include "droso/rng.hpp"
#include "oracles.hpp"

using namespace droso;

TEST(Grayscale, WhiteRgbBecomesWhite) {
    const RawFrame rgb(5, 4, 3, 255);
    const RawFrame gray = to_grayscale(rgb);
    EXPECT_EQ(gray.channels, 1u);
    for (auto p : gray.pixels) EXPECT_EQ(p, 255);
}

TEST(Grayscale, GrayIsIdentity) {
    RawFrame f(7, 3, 1);
    for (std::size_t i = 0; i < f.pixels.size(); ++i) f.pixels[i] = static_cast<std::uint8_t>(i * 11);
    EXPECT_EQ(to_grayscale(f), f);
}

TEST(Grayscale, LumaOfSinglePixel) {
    RawFrame f(1, 1, 3);
    f.pixels = {100, 50, 200};
    // 0.299*100 + 0.587*50 + 0.114*200 = 82.05
    EXPECT_EQ(to_grayscale(f).pixels[0], 82);
}

TEST(Grayscale, RejectsInvalidFrame) {
    RawFrame f(2, 2, 3);
    f.pixels.pop_back();
    EXPECT_THROW(to_grayscale(f), ParameterError);
    EXPECT_THROW(to_grayscale(RawFrame(0, 2, 1)), ParameterError);
}

TEST(ResizeBox, ConstantStaysConstant) {
    const RawFrame f(37, 23, 1, 91);
    for (auto [w, h] : {std::pair{64, 32}, {5, 7}, {37, 23}, {100, 50}, {1, 1}}) {
        const RawFrame out = resize_box(f, w, h);
        ASSERT_EQ(out.width, static_cast<std::size_t>(w));
        for (auto p : out.pixels) EXPECT_EQ(p, 91);
    }
}

TEST(ResizeBox, TwoByTwoToOneRoundsHalfUp) {
    RawFrame f(2, 2, 1);
    f.pixels = {0, 255, 255, 0};
    EXPECT_EQ(resize_box(f, 1, 1).pixels, std::vector<std::uint8_t>{128});
}

TEST(ResizeBox, RampThreeToTwoMatchesFractionalCoverage) {
    RawFrame f(3, 3, 1);
    for (std::size_t y = 0; y < 3; ++y)
        for (std::size_t x = 0; x < 3; ++x) f.at(x, y) = static_cast<std::uint8_t>(x * 100 + y * 20);
    const RawFrame out = resize_box(f, 2, 2);
    // Box means 40, 173.33, 66.67, 200 from the floating-point coverage oracle.
    EXPECT_EQ(out.pixels, (std::vector<std::uint8_t>{40, 173, 67, 200}));
    EXPECT_EQ(out, oracle::resize_box(f, 2, 2));
}

TEST(ResizeBox, MatchesOracleOnRandomFrames) {
    Rng rng(3);
    for (int trial = 0; trial < 40; ++trial) {
        RawFrame f(1 + rng.below(40), 1 + rng.below(40), 1);
        for (auto& p : f.pixels) p = static_cast<std::uint8_t>(rng.below(256));
        const std::size_t w = 1 + rng.below(20), h = 1 + rng.below(20);
        const RawFrame got = resize_box(f, w, h);
        const RawFrame want = oracle::resize_box(f, w, h);
        for (std::size_t i = 0; i < got.pixels.size(); ++i)
            // the oracle rounds a floating-point mean; exact .5 cases may land either side
            EXPECT_LE(std::abs(got.pixels[i] - want.pixels[i]), 1) << "trial " << trial;
    }
}

TEST(ResizeBox, RejectsColorAndZeroSizes) {
    EXPECT_THROW(resize_box(RawFrame(4, 4, 3), 2, 2), ParameterError);
    EXPECT_THROW(resize_box(RawFrame(4, 4, 1), 0, 2), ParameterError);
}

TEST(FlattenNormalize, ZeroAndFull) {
    for (std::uint8_t v : {0, 255}) {
        const ImageVector img = flatten_normalize(RawFrame(64, 32, 1, v));
        ASSERT_EQ(img.size(), kImageLength);
        for (float x : img.values) EXPECT_EQ(x, v == 0 ? 0.0f : 1.0f);
    }
}

TEST(FlattenNormalize, RowMajorIndexing) {
    RawFrame f(64, 32, 1);
    f.at(0, 1) = 255;
    const ImageVector img = flatten_normalize(f);
    for (std::size_t i = 0; i < img.size(); ++i) EXPECT_EQ(img.values[i], i == 64 ? 1.0f : 0.0f);
}

TEST(FlattenNormalize, RejectsWrongSize) {
    EXPECT_THROW(flatten_normalize(RawFrame(32, 64, 1)), DimensionError);
    EXPECT_THROW(flatten_normalize(RawFrame(64, 32, 3)), DimensionError);
}

TEST(Preprocess, ConstantFrame) {
    for (std::uint8_t c : {0, 17, 200, 255}) {
        const ImageVector img = preprocess(RawFrame(333, 111, 3, c));
        ASSERT_EQ(img.size(), kImageLength);
        for (float x : img.values) EXPECT_FLOAT_EQ(x, c / 255.0f);
    }
}

TEST(Preprocess, CheckerboardOfTwoByTwoBlocks) {
    RawFrame f(128, 64, 1);
    for (std::size_t y = 0; y < 64; ++y)
        for (std::size_t x = 0; x < 128; ++x) f.at(x, y) = ((x / 2 + y / 2) % 2) ? 255 : 0;
    const ImageVector img = preprocess(f);
    for (std::size_t y = 0; y < 32; ++y)
        for (std::size_t x = 0; x < 64; ++x) EXPECT_EQ(img.values[y * 64 + x], ((x + y) % 2) ? 1.0f : 0.0f);
}

TEST(Preprocess, PureAndFixedLength) {
    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        RawFrame f(1 + rng.below(300), 1 + rng.below(200), rng.below(2) ? 3 : 1);
        for (auto& p : f.pixels) p = static_cast<std::uint8_t>(rng.below(256));
        const ImageVector a = preprocess(f);
        EXPECT_EQ(a.size(), kImageLength);
        EXPECT_EQ(a, preprocess(f));
        for (float v : a.values) {
            EXPECT_GE(v, 0.0f);
            EXPECT_LE(v, 1.0f);
        }
    }
}

TEST(Preprocess, ScalingIntensityNeverIncreasesOutput) {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        RawFrame f(50 + rng.below(150), 20 + rng.below(100), rng.below(2) ? 3 : 1);
        for (auto& p : f.pixels) p = static_cast<std::uint8_t>(rng.below(256));
        const double s = rng.uniform(0.01, 1.0);
        RawFrame scaled = f;
        for (auto& p : scaled.pixels) p = static_cast<std::uint8_t>(std::floor(p * s));
        const ImageVector a = preprocess(f), b = preprocess(scaled);
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(b.values[i], a.values[i]);
    }
}
