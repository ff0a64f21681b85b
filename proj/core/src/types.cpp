#include "evox/types.hpp"

#include <algorithm>

namespace evox {

void sort_canonical(EventStream& stream) {
    std::stable_sort(stream.events.begin(), stream.events.end(), canonical_less);
}

StreamCheck validate_stream(const EventStream& stream) {
    for (std::size_t i = 0; i < stream.events.size(); ++i) {
        const Event& e = stream.events[i];
        if (e.t < 0) return {false, i, "time"};
        if (e.x < 0 || e.x >= stream.width || e.y < 0 || e.y >= stream.height)
            return {false, i, "bounds"};
        if (e.polarity != 1 && e.polarity != -1) return {false, i, "polarity"};
        if (i > 0 && canonical_less(e, stream.events[i - 1]))
            return {false, i, "sorted"};
    }
    return {};
}

Frame::Frame(std::int32_t width, std::int32_t height, Timestamp t,
             std::vector<double> pixels)
    : t_(t), pixels_(width, height, std::move(pixels)) {
    if (t < 0) throw std::invalid_argument("Frame: negative timestamp");
    for (double v : pixels_.data()) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw std::invalid_argument("Frame: pixel outside [0, 1]");
    }
}

Frame Frame::constant(std::int32_t width, std::int32_t height, Timestamp t,
                      double value) {
    return Frame(width, height, t,
                 std::vector<double>(static_cast<std::size_t>(width) * height, value));
}

CameraParams::CameraParams(double theta_pos, double theta_neg, double k)
    : theta_pos_(theta_pos), theta_neg_(theta_neg), k_(k) {
    auto positive_finite = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive_finite(theta_pos) || !positive_finite(theta_neg) || !positive_finite(k))
        throw std::invalid_argument("CameraParams: thresholds and k must be finite and > 0");
}

CountPair::CountPair(Grid<std::uint32_t> pos, Grid<std::uint32_t> neg,
                     Timestamp t0, Timestamp t1)
    : pos_(std::move(pos)), neg_(std::move(neg)), t0_(t0), t1_(t1) {
    if (pos_.width() != neg_.width() || pos_.height() != neg_.height())
        throw std::invalid_argument("CountPair: pos/neg dimensions differ");
    if (t0 >= t1) throw std::invalid_argument("CountPair: requires t0 < t1");
}

VoxelGrid::VoxelGrid(std::int32_t bins, std::int32_t width, std::int32_t height,
                     std::vector<double> values, Timestamp t0, Timestamp t1)
    : bins_(bins), width_(width), height_(height), t0_(t0), t1_(t1),
      values_(std::move(values)) {
    if (bins <= 0) throw std::invalid_argument("VoxelGrid: bins must be >= 1");
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("VoxelGrid: dimensions must be positive");
    if (t0 >= t1) throw std::invalid_argument("VoxelGrid: requires t0 < t1");
    if (values_.size() !=
        static_cast<std::size_t>(bins) * width * height)
        throw std::invalid_argument("VoxelGrid: value count does not match shape");
    for (double v : values_) {
        if (!std::isfinite(v))
            throw std::invalid_argument("VoxelGrid: non-finite value");
    }
}

double VoxelGrid::signed_mass() const {
    double sum = 0.0;
    for (double v : values_) sum += v;
    return sum;
}

}  // namespace evox
