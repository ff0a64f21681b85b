#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evox/types.hpp"

namespace evox {

// One regression sample: event counts over a frame interval at one pixel
// plus the bounding intensities. The model ties them together through
// theta_pos*e_pos - theta_neg*e_neg = log((f1 + k)/(f0 + k)).
struct ObservationRow {
    std::uint32_t e_pos = 0;
    std::uint32_t e_neg = 0;
    double f0 = 0.0;
    double f1 = 0.0;
};

class ObservationSet {
public:
    ObservationSet() = default;
    explicit ObservationSet(std::vector<ObservationRow> rows);

    const std::vector<ObservationRow>& rows() const { return rows_; }
    bool subsampled() const { return subsampled_; }
    std::uint64_t seed() const { return seed_; }

    friend ObservationSet build_observations(std::span<const Frame> frames,
                                             const EventStream& stream,
                                             std::size_t max_rows,
                                             std::uint64_t seed);

private:
    std::vector<ObservationRow> rows_;
    bool subsampled_ = false;
    std::uint64_t seed_ = 0;
};

// Forms one row per (pixel, consecutive-frame interval). When the total
// exceeds max_rows the set is subsampled uniformly at random with the given
// seed; rows with nonzero counts are always kept ahead of zero-count rows,
// and zero-count rows are capped at half the sample.
ObservationSet build_observations(std::span<const Frame> frames,
                                  const EventStream& stream,
                                  std::size_t max_rows, std::uint64_t seed);

enum class FitCondition { well_posed, rank_deficient_fallback };

struct FitResult {
    CameraParams params;
    double residual_rms = 0.0;  // log-domain RMS at the returned parameters
    std::size_t rows_used = 0;
    FitCondition condition = FitCondition::well_posed;
};

// Two-parameter linear least squares for (theta_pos, theta_neg) at fixed k
// via the closed-form 2x2 normal equations. Negative or unidentifiable
// parameters are re-solved with the offending one pinned at the 1e-4 floor
// and flagged rank_deficient_fallback.
FitResult fit_thresholds_given_k(const ObservationSet& obs, double k);

struct KRange {
    double lo = 0.0;
    double hi = 0.0;
};

// Outer 1-D search for k (64-point log-spaced grid, then golden-section
// refinement of the bracketing cell to relative width 1e-4), with the inner
// linear fit at each candidate. The search score is the profile objective
// log(rms) + mean(log(f1 + k)); the Jacobian term makes scores comparable
// across k where the raw log-domain rms is not (shrinking y with growing k
// would otherwise always favor the upper bound).
FitResult fit_all(const ObservationSet& obs, KRange k_range);

// Score used by fit_all, exposed for diagnostics.
double profile_objective(const ObservationSet& obs, double k);

// Max relative deviation between the analytic gradient of the least-squares
// objective J(theta_pos, theta_neg) and central finite differences with
// step h.
double objective_gradient_check(const ObservationSet& obs,
                                const CameraParams& params, double h);

}  // namespace evox
