#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace evox {

inline int resolve_threads(int threads, std::int32_t height) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads < 1) threads = 1;
    return std::min<int>(threads, height);
}

// Splits [0, height) into `bands` contiguous row ranges and runs
// fn(band, y0, y1) on each, in parallel when bands > 1. Bands partition the
// rows deterministically, so callers that keep per-band outputs and merge
// them in band order get thread-count-independent results.
inline void parallel_for_rows(
    std::int32_t height, int bands,
    const std::function<void(int, std::int32_t, std::int32_t)>& fn) {
    bands = std::clamp<int>(bands, 1, height);
    if (bands == 1) {
        fn(0, 0, height);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(bands);
    const std::int32_t chunk = (height + bands - 1) / bands;
    for (int b = 0; b < bands; ++b) {
        const std::int32_t y0 = b * chunk;
        const std::int32_t y1 = std::min<std::int32_t>(height, y0 + chunk);
        if (y0 >= y1) break;
        workers.emplace_back([&fn, b, y0, y1] { fn(b, y0, y1); });
    }
    for (auto& w : workers) w.join();
}

}  // namespace evox
