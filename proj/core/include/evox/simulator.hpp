#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evox/types.hpp"

namespace evox {

// Per-pixel map of log(f + k). Finite for every valid frame since
// f + k >= k > 0.
Grid<double> log_intensity(const Frame& frame, double k);

// Ideal event camera fed with a frame sequence: per pixel, the log
// intensity is interpolated linearly in time between consecutive frames and
// an event fires each time it departs from the latched reference by at
// least theta_pos (upward) or theta_neg (downward). The reference then
// advances by exactly that threshold, so sub-threshold change carries over
// across frame boundaries.
//
// Crossing exactly at the threshold fires (inclusive comparison). Crossing
// timestamps are interpolated, rounded to integer microseconds and clamped
// into [t_prev, t_next - 1] so an event is always attributed to the frame
// interval that produced it.
class EventSimulator {
public:
    EventSimulator(std::int32_t width, std::int32_t height, CameraParams params);

    // Latches the reference log intensity; drops any prior state.
    void init(const Frame& first);

    // Simulates (prev.t, frame.t] and returns the events in canonical
    // order. init() must have been called.
    std::vector<Event> process(const Frame& frame);

    bool initialized() const { return initialized_; }
    const Grid<double>& ref_log() const { return ref_log_; }
    const CameraParams& params() const { return params_; }

private:
    std::int32_t width_;
    std::int32_t height_;
    CameraParams params_;
    bool initialized_ = false;
    Timestamp last_t_ = 0;
    Grid<double> ref_log_;
    Grid<double> last_log_;
};

// Batch variant: simulates the whole sequence (>= 2 frames, shared
// dimensions, strictly increasing timestamps) and returns a canonical
// stream. Rows are independent, so `threads` > 1 splits the image into row
// bands; the result is identical to the single-threaded run.
EventStream simulate_events(std::span<const Frame> frames,
                            const CameraParams& params, int threads = 1);

// Draws theta_pos/theta_neg from N(mean, sigma^2), re-drawing until the
// value exceeds 0.01. sigma == 0 yields the means unchanged. k is passed
// through. Deterministic for a fixed seed.
CameraParams sample_thresholds(std::uint64_t seed, double mean_pos,
                               double mean_neg, double sigma, double k);

}  // namespace evox
