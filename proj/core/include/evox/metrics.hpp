#pragma once

#include <span>
#include <vector>

#include "evox/types.hpp"

namespace evox {

// Mean over pixels of the squared difference.
double mse(const Frame& a, const Frame& b);

// Structural similarity with the standard 11x11 Gaussian window
// (sigma 1.5), C1 = (0.01)^2 and C2 = (0.03)^2 for unit dynamic range.
// Only windows fully inside the image contribute (no padding), so both
// frames must be at least 11x11.
double ssim(const Frame& a, const Frame& b);

struct FrameMetrics {
    double mse = 0.0;
    double ssim = 0.0;
};

struct SequenceReport {
    std::vector<FrameMetrics> per_frame;
    double mean_mse = 0.0;
    double mean_ssim = 0.0;
};

SequenceReport evaluate_sequence(std::span<const Frame> recon,
                                 std::span<const Frame> truth);

}  // namespace evox
