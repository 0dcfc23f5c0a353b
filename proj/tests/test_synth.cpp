#include <gtest/gtest.h>

#include <cstdint>

#include "droso/error.hpp"
#include "droso/synth.hpp"
#include "synth_bench.hpp"

using namespace droso;

namespace {

// FNV-1a over all frame bytes.
std::uint64_t checksum(const RawFrame& f) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint8_t b : f.pixels) h = (h ^ b) * 0x100000001b3ULL;
    return h;
}

}  // namespace

TEST(SynthReference, DeterministicAndDistinct) {
    SynthConfig cfg;
    cfg.seed = 1;
    cfg.places = 50;
    const auto a = generate_reference(cfg);
    EXPECT_EQ(a, generate_reference(cfg));
    ASSERT_EQ(a.size(), 50u);
    for (const auto& f : a) {
        EXPECT_EQ(f.width, 128u);
        EXPECT_EQ(f.height, 64u);
        EXPECT_EQ(f.channels, 1u);
    }
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) EXPECT_NE(a[i], a[j]);
}

TEST(SynthReference, TwoPlaces) {
    SynthConfig cfg;
    cfg.places = 2;
    const auto f = generate_reference(cfg);
    ASSERT_EQ(f.size(), 2u);
    EXPECT_NE(f[0].pixels, f[1].pixels);
}

TEST(SynthReference, SeedChangesFrames) {
    SynthConfig a, b;
    a.seed = 1;
    b.seed = 2;
    a.places = b.places = 10;
    const auto fa = generate_reference(a), fb = generate_reference(b);
    std::size_t differing = 0;
    for (std::size_t i = 0; i < fa.size(); ++i) differing += fa[i] != fb[i];
    EXPECT_GE(differing, 1u);
}

TEST(SynthReference, ConfigValidated) {
    SynthConfig cfg;
    cfg.places = 1;
    EXPECT_THROW(generate_reference(cfg), ParameterError);
    cfg = SynthConfig{};
    cfg.shift_px = 64;
    EXPECT_THROW(cfg.validate(), ParameterError);
    cfg.shift_px = -64;
    EXPECT_THROW(cfg.validate(), ParameterError);
    cfg = SynthConfig{};
    cfg.noise_sigma = -0.1;
    EXPECT_THROW(cfg.validate(), ParameterError);
}

TEST(SynthQuery, ZeroPerturbationIsIdentity) {
    SynthConfig cfg;
    cfg.places = 8;
    const auto ref = generate_reference(cfg);
    EXPECT_EQ(generate_query(ref, cfg), ref);
}

TEST(SynthQuery, BrightnessNeverDarkens) {
    SynthConfig cfg;
    cfg.places = 8;
    cfg.brightness_shift = 0.1;
    const auto ref = generate_reference(cfg);
    const auto q = generate_query(ref, cfg);
    for (std::size_t i = 0; i < ref.size(); ++i)
        for (std::size_t j = 0; j < ref[i].pixels.size(); ++j) {
            EXPECT_GE(q[i].pixels[j], ref[i].pixels[j]);
            EXPECT_EQ(q[i].pixels[j], std::min(255, ref[i].pixels[j] + 26));  // 25.5 rounds up
        }
}

TEST(SynthQuery, CircularShift) {
    SynthConfig cfg;
    cfg.places = 3;
    cfg.shift_px = -5;
    const auto ref = generate_reference(cfg);
    const auto q = generate_query(ref, cfg);
    for (std::size_t i = 0; i < ref.size(); ++i)
        for (std::size_t y = 0; y < 64; ++y)
            for (std::size_t x = 0; x < 128; ++x) EXPECT_EQ(q[i].at(x, y), ref[i].at((x + 5) % 128, y));
}

TEST(SynthQuery, NoiseGoldenChecksum) {
    SynthConfig cfg;
    cfg.seed = 1;
    cfg.places = 4;
    cfg.noise_sigma = 0.1;
    const auto ref = generate_reference(cfg);
    const auto q = generate_query(ref, cfg);
    EXPECT_EQ(q, generate_query(ref, cfg));
    EXPECT_NE(q[0], ref[0]);
    // Pinned from the first reference run.
    EXPECT_EQ(checksum(q[0]), 5912066089559352823ULL);
}

TEST(SynthQuery, RejectsEmptyReference) {
    EXPECT_THROW(generate_query(std::vector<RawFrame>{}, SynthConfig{}), ParameterError);
}

TEST(SynthPipeline, UnperturbedQueriesGivePerfectAuc) {
    const auto data = bench::make(0.0, 0);
    const Ensemble e = bench::train(data, 16);
    const Evaluation ev = evaluate(e, data.queries, GroundTruth{});
    EXPECT_EQ(ev.curve.auc, 1.0);
}

// With a moderate viewpoint shift, more pixel noise must not make the ensemble
// noticeably better.
TEST(SynthPipeline, AucDegradesWithNoise) {
    const std::vector<double> levels{0.0, 0.05, 0.15, 0.30};
    SynthConfig cfg = bench::config(0.0, 8);
    const auto ref = generate_reference(cfg);
    const auto refs = bench::to_vectors(ref);
    const Ensemble e = bench::train({refs, {}}, 64);
    double previous = 2.0;
    for (double noise : levels) {
        cfg.noise_sigma = noise;
        const double auc = evaluate(e, bench::to_vectors(generate_query(ref, cfg)), GroundTruth{}).curve.auc;
        EXPECT_LE(auc, previous + 0.02) << "noise " << noise;
        previous = auc;
    }
}
