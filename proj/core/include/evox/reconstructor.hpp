#pragma once

#include <map>
#include <span>
#include <vector>

#include "evox/types.hpp"

namespace evox {

// Counts positive/negative events per pixel over [t0, t1). The stream must
// be in canonical order.
CountPair count_events(const EventStream& stream, Timestamp t0, Timestamp t1);

// Recursive frame generator: per pixel the internal log state advances by
// theta_pos*E+ - theta_neg*E- each step and the emitted value is
// exp(state) - k clamped to [0, 1]. The internal state is never clamped, so
// drift in free-run stays observable.
//
// The state is held as the keyframe value plus an accumulated log offset;
// with a zero offset the emission returns the keyframe pixel bit-exactly.
class Reconstructor {
public:
    Reconstructor(std::int32_t width, std::int32_t height, CameraParams params,
                  std::int32_t reset_interval = 0);

    // Re-latches the state onto a keyframe and zeroes frames_since_reset.
    void reset(const Frame& keyframe);

    // Applies one count image and emits the frame at counts.t1().
    Frame step(const CountPair& counts);

    std::int32_t width() const { return width_; }
    std::int32_t height() const { return height_; }
    const CameraParams& params() const { return params_; }
    std::int32_t reset_interval() const { return reset_interval_; }
    std::int32_t frames_since_reset() const { return frames_since_reset_; }

    // log(f + k) the recursion currently holds, offset included.
    Grid<double> log_state() const;

    // Fraction of pixels whose last emission fell outside [0, 1] before the
    // clamp.
    double last_clip_fraction() const { return last_clip_fraction_; }

private:
    std::int32_t width_;
    std::int32_t height_;
    CameraParams params_;
    std::int32_t reset_interval_;
    std::int32_t frames_since_reset_ = 0;
    bool has_state_ = false;
    Grid<double> base_;        // keyframe pixel values
    Grid<double> log_offset_;  // accumulated theta_pos*E+ - theta_neg*E-
    double last_clip_fraction_ = 0.0;
};

struct ReconstructionResult {
    std::vector<Frame> frames;
    double mean_clip_fraction = 0.0;
};

// Walks the boundary list t_0..t_N: initializes on the keyframe at t_0,
// then per interval [t_i, t_i+1) counts events and steps, emitting N
// frames. With reset_interval R > 0, the state re-latches onto the keyframe
// at every boundary where frames_since_reset reaches R (such keyframes must
// exist).
ReconstructionResult reconstruct_sequence(const EventStream& stream,
                                          const std::map<Timestamp, Frame>& keyframes,
                                          std::span<const Timestamp> boundaries,
                                          const CameraParams& params,
                                          std::int32_t reset_interval);

}  // namespace evox
