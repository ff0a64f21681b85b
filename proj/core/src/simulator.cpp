#include "evox/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "evox/parallel.hpp"

namespace evox {

namespace {

// Emits the crossings of one pixel over one interval. La/Lb are the log
// intensities at t_a/t_b; ref holds the latched reference and is advanced
// in place by whole thresholds.
template <typename Sink>
void emit_pixel_crossings(double La, double Lb, Timestamp t_a, Timestamp t_b,
                          double theta_pos, double theta_neg, double& ref,
                          std::int16_t x, std::int16_t y, Sink&& sink) {
    if (Lb == La) return;
    const double span = Lb - La;
    const double dt = static_cast<double>(t_b - t_a);
    if (Lb > La) {
        while (ref + theta_pos <= Lb) {
            ref += theta_pos;
            const double frac = (ref - La) / span;
            Timestamp t = t_a + static_cast<Timestamp>(std::llround(frac * dt));
            t = std::clamp<Timestamp>(t, t_a, t_b - 1);
            sink(Event{t, x, y, std::int8_t{+1}});
        }
    } else {
        while (ref - theta_neg >= Lb) {
            ref -= theta_neg;
            const double frac = (ref - La) / span;
            Timestamp t = t_a + static_cast<Timestamp>(std::llround(frac * dt));
            t = std::clamp<Timestamp>(t, t_a, t_b - 1);
            sink(Event{t, x, y, std::int8_t{-1}});
        }
    }
}

void check_frame_shape(const Frame& frame, std::int32_t width, std::int32_t height) {
    if (frame.width() != width || frame.height() != height)
        throw std::invalid_argument("simulator: frame dimensions differ");
}

}  // namespace

Grid<double> log_intensity(const Frame& frame, double k) {
    if (!(std::isfinite(k) && k > 0.0))
        throw std::invalid_argument("log_intensity: k must be finite and > 0");
    Grid<double> out(frame.width(), frame.height());
    const auto& px = frame.pixels();
    for (std::size_t i = 0; i < px.size(); ++i)
        out.data()[i] = std::log(px[i] + k);
    return out;
}

EventSimulator::EventSimulator(std::int32_t width, std::int32_t height,
                               CameraParams params)
    : width_(width), height_(height), params_(params) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("EventSimulator: dimensions must be positive");
}

void EventSimulator::init(const Frame& first) {
    check_frame_shape(first, width_, height_);
    ref_log_ = log_intensity(first, params_.k());
    last_log_ = ref_log_;
    last_t_ = first.t();
    initialized_ = true;
}

std::vector<Event> EventSimulator::process(const Frame& frame) {
    if (!initialized_)
        throw std::logic_error("EventSimulator: process() before init()");
    check_frame_shape(frame, width_, height_);
    if (frame.t() <= last_t_)
        throw std::invalid_argument("EventSimulator: timestamps must be strictly increasing");

    const Grid<double> next_log = log_intensity(frame, params_.k());
    std::vector<Event> events;
    for (std::int32_t y = 0; y < height_; ++y) {
        for (std::int32_t x = 0; x < width_; ++x) {
            emit_pixel_crossings(last_log_.at(x, y), next_log.at(x, y), last_t_,
                                 frame.t(), params_.theta_pos(), params_.theta_neg(),
                                 ref_log_.at(x, y), static_cast<std::int16_t>(x),
                                 static_cast<std::int16_t>(y),
                                 [&events](const Event& e) { events.push_back(e); });
        }
    }
    last_log_ = next_log;
    last_t_ = frame.t();
    std::stable_sort(events.begin(), events.end(), canonical_less);
    return events;
}

EventStream simulate_events(std::span<const Frame> frames,
                            const CameraParams& params, int threads) {
    if (frames.size() < 2)
        throw std::invalid_argument("simulate_events: need at least 2 frames");
    const std::int32_t width = frames[0].width();
    const std::int32_t height = frames[0].height();
    for (std::size_t i = 0; i < frames.size(); ++i) {
        check_frame_shape(frames[i], width, height);
        if (i > 0 && frames[i].t() <= frames[i - 1].t())
            throw std::invalid_argument("simulate_events: timestamps must be strictly increasing");
    }

    const int bands = resolve_threads(threads, height);
    std::vector<std::vector<Event>> band_events(bands);

    parallel_for_rows(height, bands, [&](int band, std::int32_t y0, std::int32_t y1) {
        std::vector<Event>& out = band_events[band];
        const std::size_t row0 = static_cast<std::size_t>(y0) * width;
        const std::size_t nrows = static_cast<std::size_t>(y1 - y0) * width;

        std::vector<double> ref(nrows), last(nrows), next(nrows);
        const double k = params.k();
        for (std::size_t i = 0; i < nrows; ++i)
            ref[i] = last[i] = std::log(frames[0].pixels()[row0 + i] + k);

        for (std::size_t f = 1; f < frames.size(); ++f) {
            const Timestamp t_a = frames[f - 1].t();
            const Timestamp t_b = frames[f].t();
            const auto& px = frames[f].pixels();
            for (std::size_t i = 0; i < nrows; ++i)
                next[i] = std::log(px[row0 + i] + k);

            std::size_t i = 0;
            for (std::int32_t y = y0; y < y1; ++y) {
                for (std::int32_t x = 0; x < width; ++x, ++i) {
                    emit_pixel_crossings(last[i], next[i], t_a, t_b,
                                         params.theta_pos(), params.theta_neg(),
                                         ref[i], static_cast<std::int16_t>(x),
                                         static_cast<std::int16_t>(y),
                                         [&out](const Event& e) { out.push_back(e); });
                }
            }
            last.swap(next);
        }
    });

    EventStream stream{width, height, {}};
    std::size_t total = 0;
    for (const auto& v : band_events) total += v.size();
    stream.events.reserve(total);
    for (auto& v : band_events)
        stream.events.insert(stream.events.end(), v.begin(), v.end());
    sort_canonical(stream);
    return stream;
}

CameraParams sample_thresholds(std::uint64_t seed, double mean_pos,
                               double mean_neg, double sigma, double k) {
    if (!(mean_pos > 0.0) || !(mean_neg > 0.0))
        throw std::invalid_argument("sample_thresholds: means must be > 0");
    if (!(sigma >= 0.0))
        throw std::invalid_argument("sample_thresholds: sigma must be >= 0");
    if (sigma == 0.0) return CameraParams(mean_pos, mean_neg, k);

    std::mt19937_64 gen(seed);
    auto draw = [&gen, sigma](double mean) {
        std::normal_distribution<double> dist(mean, sigma);
        double v;
        do {
            v = dist(gen);
        } while (!(v > 0.01));
        return v;
    };
    const double theta_pos = draw(mean_pos);
    const double theta_neg = draw(mean_neg);
    return CameraParams(theta_pos, theta_neg, k);
}

}  // namespace evox
