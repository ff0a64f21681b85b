#include "evox/reconstructor.hpp"

#include <algorithm>
#include <cmath>

namespace evox {

CountPair count_events(const EventStream& stream, Timestamp t0, Timestamp t1) {
    if (t0 >= t1) throw std::invalid_argument("count_events: requires t0 < t1");
    if (stream.width <= 0 || stream.height <= 0)
        throw std::invalid_argument("count_events: stream has no dimensions");

    Grid<std::uint32_t> pos(stream.width, stream.height, 0);
    Grid<std::uint32_t> neg(stream.width, stream.height, 0);

    const auto cmp = [](const Event& e, Timestamp t) { return e.t < t; };
    auto first = std::lower_bound(stream.events.begin(), stream.events.end(), t0, cmp);
    auto last = std::lower_bound(first, stream.events.end(), t1, cmp);
    for (auto it = first; it != last; ++it) {
        if (it->polarity > 0)
            ++pos.at(it->x, it->y);
        else
            ++neg.at(it->x, it->y);
    }
    return CountPair(std::move(pos), std::move(neg), t0, t1);
}

Reconstructor::Reconstructor(std::int32_t width, std::int32_t height,
                             CameraParams params, std::int32_t reset_interval)
    : width_(width), height_(height), params_(params),
      reset_interval_(reset_interval) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("Reconstructor: dimensions must be positive");
    if (reset_interval < 0)
        throw std::invalid_argument("Reconstructor: reset interval must be >= 0");
}

void Reconstructor::reset(const Frame& keyframe) {
    if (keyframe.width() != width_ || keyframe.height() != height_)
        throw std::invalid_argument("Reconstructor: keyframe dimensions differ");
    base_ = keyframe.grid();
    log_offset_ = Grid<double>(width_, height_, 0.0);
    frames_since_reset_ = 0;
    has_state_ = true;
}

Frame Reconstructor::step(const CountPair& counts) {
    if (!has_state_) throw std::logic_error("Reconstructor: step() before reset()");
    if (counts.width() != width_ || counts.height() != height_)
        throw std::invalid_argument("Reconstructor: count dimensions differ");

    const double theta_pos = params_.theta_pos();
    const double theta_neg = params_.theta_neg();
    const double k = params_.k();

    std::vector<double> out(static_cast<std::size_t>(width_) * height_);
    std::size_t clipped = 0;
    const auto& pos = counts.pos().data();
    const auto& neg = counts.neg().data();
    auto& offset = log_offset_.data();
    const auto& base = base_.data();

    for (std::size_t i = 0; i < out.size(); ++i) {
        offset[i] += theta_pos * pos[i] - theta_neg * neg[i];
        double v;
        if (offset[i] == 0.0) {
            v = base[i];  // exp(0) identity, kept bit-exact
        } else {
            v = (base[i] + k) * std::exp(offset[i]) - k;
        }
        if (v < 0.0 || v > 1.0) {
            ++clipped;
            v = std::clamp(v, 0.0, 1.0);
        }
        out[i] = v;
    }
    last_clip_fraction_ = static_cast<double>(clipped) / out.size();
    ++frames_since_reset_;
    return Frame(width_, height_, counts.t1(), std::move(out));
}

Grid<double> Reconstructor::log_state() const {
    if (!has_state_) throw std::logic_error("Reconstructor: no state yet");
    Grid<double> state(width_, height_);
    const double k = params_.k();
    for (std::size_t i = 0; i < state.size(); ++i)
        state.data()[i] = std::log(base_.data()[i] + k) + log_offset_.data()[i];
    return state;
}

ReconstructionResult reconstruct_sequence(const EventStream& stream,
                                          const std::map<Timestamp, Frame>& keyframes,
                                          std::span<const Timestamp> boundaries,
                                          const CameraParams& params,
                                          std::int32_t reset_interval) {
    if (boundaries.size() < 2)
        throw std::invalid_argument("reconstruct_sequence: need at least 2 boundaries");
    for (std::size_t i = 1; i < boundaries.size(); ++i) {
        if (boundaries[i] <= boundaries[i - 1])
            throw std::invalid_argument("reconstruct_sequence: boundaries must be strictly increasing");
    }

    auto keyframe_at = [&keyframes](Timestamp t) -> const Frame& {
        auto it = keyframes.find(t);
        if (it == keyframes.end())
            throw std::invalid_argument(
                "reconstruct_sequence: missing keyframe at boundary " + std::to_string(t));
        return it->second;
    };

    const Frame& first = keyframe_at(boundaries[0]);
    Reconstructor recon(first.width(), first.height(), params, reset_interval);
    recon.reset(first);

    ReconstructionResult result;
    result.frames.reserve(boundaries.size() - 1);
    double clip_sum = 0.0;
    for (std::size_t i = 0; i + 1 < boundaries.size(); ++i) {
        if (reset_interval > 0 && recon.frames_since_reset() == reset_interval)
            recon.reset(keyframe_at(boundaries[i]));
        CountPair counts = count_events(stream, boundaries[i], boundaries[i + 1]);
        result.frames.push_back(recon.step(counts));
        clip_sum += recon.last_clip_fraction();
    }
    result.mean_clip_fraction = clip_sum / static_cast<double>(result.frames.size());
    return result;
}

}  // namespace evox
