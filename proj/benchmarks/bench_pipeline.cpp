#include <benchmark/benchmark.h>

#include "droso/rng.hpp"
#include "droso/voting.hpp"

using namespace droso;

namespace {

ImageVector random_image(std::uint64_t seed) {
    Rng rng(seed);
    std::vector<float> v(kImageLength);
    for (float& x : v) x = static_cast<float>(rng.uniform());
    return ImageVector(std::move(v));
}

DrosoNet member(std::uint64_t seed, std::size_t places) {
    Rng rng(seed);
    QuantizedWeights w;
    w.rows = kDefaultActivations;
    w.cols = places;
    w.scale = 0.001f;
    w.q.resize(w.rows * w.cols);
    for (auto& q : w.q) q = static_cast<std::int8_t>(static_cast<int>(rng.below(255)) - 127);
    return DrosoNet(seed, generate_projection(seed, kImageLength, kDefaultActivations), std::move(w));
}

Ensemble ensemble(std::size_t n, std::size_t places) {
    Ensemble e;
    e.radius = places / 2;
    for (std::size_t i = 0; i < n; ++i) e.models.push_back(member(derive_seed(3, i), places));
    return e;
}

void BM_Encode(benchmark::State& state) {
    const ProjectionMatrix h = generate_projection(1, kImageLength, kDefaultActivations);
    const ImageVector img = random_image(2);
    for (auto _ : state) benchmark::DoNotOptimize(encode(img.view(), h));
}
BENCHMARK(BM_Encode);

void BM_QuantizedForward(benchmark::State& state) {
    const auto places = static_cast<std::size_t>(state.range(0));
    const DrosoNet m = member(5, places);
    const FeatureTag tag = encode(random_image(6).view(), m.projection());
    for (auto _ : state) benchmark::DoNotOptimize(forward(tag, m.quantized_weights()));
}
BENCHMARK(BM_QuantizedForward)->Arg(100)->Arg(1000);

void BM_Vote(benchmark::State& state) {
    const Ensemble e = ensemble(static_cast<std::size_t>(state.range(0)), 1000);
    const ImageVector img = random_image(7);
    for (auto _ : state) benchmark::DoNotOptimize(vote(e, img));
}
BENCHMARK(BM_Vote)->Arg(1)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
