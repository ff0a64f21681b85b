#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "evox/simulator.hpp"

namespace {

std::vector<evox::Frame> texture(std::int32_t size, std::size_t n_frames) {
    std::vector<evox::Frame> frames;
    for (std::size_t i = 0; i < n_frames; ++i) {
        std::vector<double> px(static_cast<std::size_t>(size) * size);
        for (std::int32_t y = 0; y < size; ++y)
            for (std::int32_t x = 0; x < size; ++x)
                px[static_cast<std::size_t>(y) * size + x] =
                    0.2 + 0.15 * std::sin(2.0 * M_PI * (x + 0.9 * i) / 23.0) *
                              std::sin(2.0 * M_PI * (y + 0.6 * i) / 17.0);
        frames.emplace_back(size, size, static_cast<evox::Timestamp>(i) * 10000,
                            std::move(px));
    }
    return frames;
}

}  // namespace

static void SimulateEvents(benchmark::State& state) {
    const auto frames = texture(state.range(0), 20);
    const evox::CameraParams params(0.2, 0.2, 0.05);
    std::size_t events = 0;
    for (auto _ : state) {
        const evox::EventStream s = evox::simulate_events(frames, params, 1);
        events = s.events.size();
        benchmark::DoNotOptimize(s.events.data());
    }
    state.counters["events"] = static_cast<double>(events);
    state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * 19);
}
BENCHMARK(SimulateEvents)->Arg(64)->Arg(128)->Arg(256);

static void SimulateEventsThreaded(benchmark::State& state) {
    const auto frames = texture(240, 20);
    const evox::CameraParams params(0.2, 0.2, 0.05);
    for (auto _ : state) {
        const evox::EventStream s =
            evox::simulate_events(frames, params, static_cast<int>(state.range(0)));
        benchmark::DoNotOptimize(s.events.data());
    }
}
BENCHMARK(SimulateEventsThreaded)->Arg(1)->Arg(2)->Arg(4);

BENCHMARK_MAIN();
