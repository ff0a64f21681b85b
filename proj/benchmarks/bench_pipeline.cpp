#include <benchmark/benchmark.h>

#include <random>

#include "evox/metrics.hpp"
#include "evox/reconstructor.hpp"
#include "evox/voxel_grid.hpp"

namespace {

evox::EventStream random_stream(std::int32_t w, std::int32_t h, std::size_t n) {
    std::mt19937_64 gen(42);
    std::uniform_int_distribution<evox::Timestamp> time(0, 999999);
    std::uniform_int_distribution<int> cx(0, w - 1), cy(0, h - 1);
    evox::EventStream s{w, h, {}};
    s.events.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        s.events.push_back({time(gen), static_cast<std::int16_t>(cx(gen)),
                            static_cast<std::int16_t>(cy(gen)),
                            gen() % 2 ? std::int8_t{1} : std::int8_t{-1}});
    evox::sort_canonical(s);
    return s;
}

evox::Frame random_frame(std::int32_t w, std::int32_t h, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> v(0.0, 1.0);
    std::vector<double> px(static_cast<std::size_t>(w) * h);
    for (double& p : px) p = v(gen);
    return evox::Frame(w, h, 0, std::move(px));
}

}  // namespace

static void EncodeVoxelGrid(benchmark::State& state) {
    const evox::EventStream s = random_stream(240, 180, state.range(0));
    for (auto _ : state) {
        const evox::VoxelGrid g = evox::encode_voxel_grid(s, 0, 1000000, 5);
        benchmark::DoNotOptimize(g.values().data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(EncodeVoxelGrid)->Range(10000, 1000000);

static void CountEvents(benchmark::State& state) {
    const evox::EventStream s = random_stream(240, 180, state.range(0));
    for (auto _ : state) {
        const evox::CountPair c = evox::count_events(s, 250000, 750000);
        benchmark::DoNotOptimize(c.pos().data().data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(CountEvents)->Range(10000, 1000000);

static void ReconstructStep(benchmark::State& state) {
    const evox::EventStream s = random_stream(240, 180, 200000);
    const evox::CountPair counts = evox::count_events(s, 0, 1000000);
    evox::Reconstructor recon(240, 180, evox::CameraParams(0.2, 0.2, 0.1));
    recon.reset(evox::Frame::constant(240, 180, 0, 0.5));
    for (auto _ : state) {
        const evox::Frame f = recon.step(counts);
        benchmark::DoNotOptimize(f.pixels().data());
    }
    state.SetItemsProcessed(state.iterations() * 240 * 180);
}
BENCHMARK(ReconstructStep);

static void Ssim(benchmark::State& state) {
    const evox::Frame a = random_frame(240, 180, 1);
    const evox::Frame b = random_frame(240, 180, 2);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evox::ssim(a, b));
    }
    state.SetItemsProcessed(state.iterations() * 240 * 180);
}
BENCHMARK(Ssim);

BENCHMARK_MAIN();
