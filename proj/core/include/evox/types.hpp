#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace evox {

// Timestamps are integer microseconds throughout. Ordering and interval
// membership stay exact; conversion from/to decimal seconds happens only
// at the file boundary (see io.hpp).
using Timestamp = std::int64_t;

// One brightness-change spike. Polarity is +1 (brightening) or -1
// (darkening). Coordinates are sensor pixel indices.
struct Event {
    Timestamp t = 0;
    std::int16_t x = 0;
    std::int16_t y = 0;
    std::int8_t polarity = 0;
};

// Canonical ordering: non-decreasing t, ties broken by (y, x, polarity).
inline bool canonical_less(const Event& a, const Event& b) {
    if (a.t != b.t) return a.t < b.t;
    if (a.y != b.y) return a.y < b.y;
    if (a.x != b.x) return a.x < b.x;
    return a.polarity < b.polarity;
}

struct EventStream {
    std::int32_t width = 0;
    std::int32_t height = 0;
    std::vector<Event> events;
};

// Stable so that equal-timestamp input order is preserved before the
// (y, x, polarity) tie-break keys decide.
void sort_canonical(EventStream& stream);

struct StreamCheck {
    bool ok = true;
    std::size_t index = 0;  // first violating event
    std::string rule;       // "bounds", "polarity", "time" or "sorted"
};

// Violations are data, not faults: never throws.
StreamCheck validate_stream(const EventStream& stream);

// Row-major 2-D buffer of T.
template <typename T>
class Grid {
public:
    Grid() = default;

    Grid(std::int32_t width, std::int32_t height, T fill = T{})
        : width_(width), height_(height) {
        if (width <= 0 || height <= 0)
            throw std::invalid_argument("Grid: dimensions must be positive");
        data_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    Grid(std::int32_t width, std::int32_t height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (width <= 0 || height <= 0)
            throw std::invalid_argument("Grid: dimensions must be positive");
        if (data_.size() != static_cast<std::size_t>(width) * height)
            throw std::invalid_argument("Grid: data size does not match dimensions");
    }

    std::int32_t width() const { return width_; }
    std::int32_t height() const { return height_; }
    std::size_t size() const { return data_.size(); }

    T& at(std::int32_t x, std::int32_t y) {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }
    const T& at(std::int32_t x, std::int32_t y) const {
        return data_[static_cast<std::size_t>(y) * width_ + x];
    }

    std::vector<T>& data() { return data_; }
    const std::vector<T>& data() const { return data_; }

private:
    std::int32_t width_ = 0;
    std::int32_t height_ = 0;
    std::vector<T> data_;
};

// Normalized grayscale frame: every pixel finite and in [0, 1].
class Frame {
public:
    Frame(std::int32_t width, std::int32_t height, Timestamp t,
          std::vector<double> pixels);

    static Frame constant(std::int32_t width, std::int32_t height, Timestamp t,
                          double value);

    std::int32_t width() const { return pixels_.width(); }
    std::int32_t height() const { return pixels_.height(); }
    Timestamp t() const { return t_; }

    double at(std::int32_t x, std::int32_t y) const { return pixels_.at(x, y); }
    const std::vector<double>& pixels() const { return pixels_.data(); }
    const Grid<double>& grid() const { return pixels_; }

private:
    Timestamp t_ = 0;
    Grid<double> pixels_;
};

// Per-sequence sensor model: polarity thresholds in log-intensity units and
// the intensity offset ratio k = b/a of the affine map I = a*f + b.
class CameraParams {
public:
    CameraParams(double theta_pos, double theta_neg, double k);

    double theta_pos() const { return theta_pos_; }
    double theta_neg() const { return theta_neg_; }
    double k() const { return k_; }

private:
    double theta_pos_;
    double theta_neg_;
    double k_;
};

// Per-pixel positive/negative event counts over the half-open interval
// [t0, t1).
class CountPair {
public:
    CountPair(Grid<std::uint32_t> pos, Grid<std::uint32_t> neg, Timestamp t0,
              Timestamp t1);

    std::int32_t width() const { return pos_.width(); }
    std::int32_t height() const { return pos_.height(); }
    Timestamp t0() const { return t0_; }
    Timestamp t1() const { return t1_; }

    const Grid<std::uint32_t>& pos() const { return pos_; }
    const Grid<std::uint32_t>& neg() const { return neg_; }

private:
    Grid<std::uint32_t> pos_;
    Grid<std::uint32_t> neg_;
    Timestamp t0_;
    Timestamp t1_;
};

// B-bin temporally-bilinear event tensor over [t0, t1), bins-major layout
// (bin, row, column).
class VoxelGrid {
public:
    VoxelGrid(std::int32_t bins, std::int32_t width, std::int32_t height,
              std::vector<double> values, Timestamp t0, Timestamp t1);

    std::int32_t bins() const { return bins_; }
    std::int32_t width() const { return width_; }
    std::int32_t height() const { return height_; }
    Timestamp t0() const { return t0_; }
    Timestamp t1() const { return t1_; }

    double at(std::int32_t bin, std::int32_t x, std::int32_t y) const {
        return values_[(static_cast<std::size_t>(bin) * height_ + y) * width_ + x];
    }
    const std::vector<double>& values() const { return values_; }

    // Sum over all bins and pixels; equals the polarity sum of the encoded
    // events for any bilinear encoding.
    double signed_mass() const;

private:
    std::int32_t bins_;
    std::int32_t width_;
    std::int32_t height_;
    Timestamp t0_;
    Timestamp t1_;
    std::vector<double> values_;
};

}  // namespace evox
