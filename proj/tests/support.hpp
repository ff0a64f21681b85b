#pragma once

// Shared fixtures for the test suites: deterministic synthetic frame
// sequences and scratch-directory plumbing.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <unistd.h>
#include <vector>

#include "evox/types.hpp"

namespace testsup {

// Mid-dark translating texture. Kept away from the clamp limits so the
// free-run recursion never clips with matched parameters.
inline std::vector<evox::Frame> moving_texture(std::int32_t width,
                                               std::int32_t height,
                                               std::size_t n_frames,
                                               evox::Timestamp dt_us,
                                               double mean = 0.2,
                                               double amp = 0.15) {
    std::vector<evox::Frame> frames;
    frames.reserve(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
        std::vector<double> px(static_cast<std::size_t>(width) * height);
        const double s = static_cast<double>(i);
        for (std::int32_t y = 0; y < height; ++y) {
            for (std::int32_t x = 0; x < width; ++x) {
                const double g =
                    0.8 * std::sin(2.0 * M_PI * (x + 0.9 * s) / 23.0) *
                        std::sin(2.0 * M_PI * (y + 0.6 * s) / 17.0) +
                    0.2 * std::sin(2.0 * M_PI * (x + y - 1.4 * s) / 41.0);
                px[static_cast<std::size_t>(y) * width + x] = mean + amp * g;
            }
        }
        frames.emplace_back(width, height, static_cast<evox::Timestamp>(i) * dt_us,
                            std::move(px));
    }
    return frames;
}

// Smooth random field in [lo, hi] from a handful of sinusoid modes.
inline std::vector<double> spatial_field(std::int32_t width, std::int32_t height,
                                         std::mt19937_64& gen, double lo,
                                         double hi) {
    std::uniform_real_distribution<double> lam(10.0, 70.0);
    std::uniform_real_distribution<double> ang(0.0, M_PI);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    std::uniform_real_distribution<double> weight(0.3, 1.0);

    struct Mode {
        double kx, ky, ph, w;
    };
    std::vector<Mode> modes(5);
    for (Mode& m : modes) {
        const double l = lam(gen);
        const double a = ang(gen);
        m = {2.0 * M_PI * std::cos(a) / l, 2.0 * M_PI * std::sin(a) / l, phase(gen),
             weight(gen)};
    }

    std::vector<double> field(static_cast<std::size_t>(width) * height);
    double fmin = 1e300, fmax = -1e300;
    for (std::int32_t y = 0; y < height; ++y) {
        for (std::int32_t x = 0; x < width; ++x) {
            double g = 0.0;
            for (const Mode& m : modes)
                g += m.w * std::sin(m.kx * x + m.ky * y + m.ph);
            field[static_cast<std::size_t>(y) * width + x] = g;
            fmin = std::min(fmin, g);
            fmax = std::max(fmax, g);
        }
    }
    const double scale = fmax > fmin ? (hi - lo) / (fmax - fmin) : 0.0;
    for (double& v : field) v = lo + (v - fmin) * scale;
    return field;
}

// Textured field under a global gain ramp c0 -> c1: every pixel changes
// monotonically, which maximizes per-pixel event counts and avoids exact
// value revisits.
inline std::vector<evox::Frame> gain_ramp_frames(std::int32_t width,
                                                 std::int32_t height,
                                                 std::size_t n_frames,
                                                 evox::Timestamp dt_us,
                                                 std::mt19937_64& gen, double c0,
                                                 double c1) {
    const std::vector<double> field = spatial_field(width, height, gen, 0.35, 1.0);
    std::vector<evox::Frame> frames;
    frames.reserve(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
        const double c =
            c0 + (c1 - c0) * static_cast<double>(i) / static_cast<double>(n_frames - 1);
        std::vector<double> px(field.size());
        for (std::size_t p = 0; p < field.size(); ++p)
            px[p] = std::clamp(c * field[p], 0.0, 1.0);
        frames.emplace_back(width, height, static_cast<evox::Timestamp>(i) * dt_us,
                            std::move(px));
    }
    return frames;
}

// Textured field under an oscillating gain: rows collect events of both
// polarities.
inline std::vector<evox::Frame> gain_osc_frames(std::int32_t width,
                                                std::int32_t height,
                                                std::size_t n_frames,
                                                evox::Timestamp dt_us,
                                                std::mt19937_64& gen) {
    const std::vector<double> field = spatial_field(width, height, gen, 0.35, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    const double ph = phase(gen);
    std::vector<evox::Frame> frames;
    frames.reserve(n_frames);
    for (std::size_t i = 0; i < n_frames; ++i) {
        const double c =
            0.48 + 0.44 * std::sin(2.2 * M_PI * static_cast<double>(i) /
                                       static_cast<double>(n_frames - 1) +
                                   ph);
        std::vector<double> px(field.size());
        for (std::size_t p = 0; p < field.size(); ++p)
            px[p] = std::clamp(c * field[p], 0.0, 1.0);
        frames.emplace_back(width, height, static_cast<evox::Timestamp>(i) * dt_us,
                            std::move(px));
    }
    return frames;
}

// Scratch directory under the system temp root, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("evox_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace testsup
