#include "evox/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "evox/reconstructor.hpp"

namespace evox {

namespace {

constexpr double kParamFloor = 1e-4;

struct NormalSums {
    double spp = 0.0;  // sum E+^2
    double snn = 0.0;  // sum E-^2
    double spn = 0.0;  // sum E+ E-
    double spy = 0.0;  // sum E+ y
    double sny = 0.0;  // sum E- y
};

NormalSums accumulate_sums(const std::vector<ObservationRow>& rows, double k) {
    NormalSums s;
    for (const ObservationRow& r : rows) {
        const double ep = static_cast<double>(r.e_pos);
        const double en = static_cast<double>(r.e_neg);
        const double y = std::log((r.f1 + k) / (r.f0 + k));
        s.spp += ep * ep;
        s.snn += en * en;
        s.spn += ep * en;
        s.spy += ep * y;
        s.sny += en * y;
    }
    return s;
}

double residual_rms_at(const std::vector<ObservationRow>& rows, double k,
                       double theta_pos, double theta_neg) {
    double ss = 0.0;
    for (const ObservationRow& r : rows) {
        const double y = std::log((r.f1 + k) / (r.f0 + k));
        const double res = theta_pos * r.e_pos - theta_neg * r.e_neg - y;
        ss += res * res;
    }
    return std::sqrt(ss / static_cast<double>(rows.size()));
}

}  // namespace

ObservationSet::ObservationSet(std::vector<ObservationRow> rows)
    : rows_(std::move(rows)) {
    for (const ObservationRow& r : rows_) {
        auto valid_intensity = [](double v) {
            return std::isfinite(v) && v >= 0.0 && v <= 1.0;
        };
        if (!valid_intensity(r.f0) || !valid_intensity(r.f1))
            throw std::invalid_argument("ObservationSet: intensity outside [0, 1]");
    }
}

ObservationSet build_observations(std::span<const Frame> frames,
                                  const EventStream& stream,
                                  std::size_t max_rows, std::uint64_t seed) {
    if (frames.size() < 2)
        throw std::invalid_argument("build_observations: need at least 2 frames");
    const std::int32_t width = frames[0].width();
    const std::int32_t height = frames[0].height();
    for (std::size_t i = 1; i < frames.size(); ++i) {
        if (frames[i].width() != width || frames[i].height() != height)
            throw std::invalid_argument("build_observations: frame dimensions differ");
        if (frames[i].t() <= frames[i - 1].t())
            throw std::invalid_argument("build_observations: frame timestamps must increase");
    }

    std::vector<ObservationRow> nonzero;
    std::vector<ObservationRow> zero;
    for (std::size_t f = 0; f + 1 < frames.size(); ++f) {
        const CountPair counts =
            count_events(stream, frames[f].t(), frames[f + 1].t());
        const auto& pos = counts.pos().data();
        const auto& neg = counts.neg().data();
        const auto& f0 = frames[f].pixels();
        const auto& f1 = frames[f + 1].pixels();
        for (std::size_t i = 0; i < pos.size(); ++i) {
            ObservationRow row{pos[i], neg[i], f0[i], f1[i]};
            (pos[i] || neg[i] ? nonzero : zero).push_back(row);
        }
    }

    ObservationSet obs;
    obs.seed_ = seed;
    const std::size_t total = nonzero.size() + zero.size();
    if (total <= max_rows) {
        obs.rows_.reserve(total);
        obs.rows_.insert(obs.rows_.end(), nonzero.begin(), nonzero.end());
        obs.rows_.insert(obs.rows_.end(), zero.begin(), zero.end());
        return obs;
    }

    obs.subsampled_ = true;
    std::mt19937_64 gen(seed);
    if (nonzero.size() >= max_rows) {
        std::sample(nonzero.begin(), nonzero.end(), std::back_inserter(obs.rows_),
                    max_rows, gen);
        return obs;
    }
    obs.rows_ = std::move(nonzero);
    // Zero-count rows fill the remainder but never exceed half the sample.
    const std::size_t budget =
        std::min({max_rows - obs.rows_.size(), zero.size(), obs.rows_.size()});
    if (budget > 0)
        std::sample(zero.begin(), zero.end(), std::back_inserter(obs.rows_),
                    budget, gen);
    return obs;
}

FitResult fit_thresholds_given_k(const ObservationSet& obs, double k) {
    if (!(std::isfinite(k) && k > 0.0))
        throw std::invalid_argument("fit_thresholds_given_k: k must be finite and > 0");
    const auto& rows = obs.rows();
    if (rows.empty())
        throw std::invalid_argument("fit_thresholds_given_k: empty observation set");

    const NormalSums s = accumulate_sums(rows, k);
    if (s.spp == 0.0 && s.snn == 0.0)
        throw std::invalid_argument("fit_thresholds_given_k: all counts are zero");

    double theta_pos = kParamFloor;
    double theta_neg = kParamFloor;
    FitCondition condition = FitCondition::well_posed;

    const double det = s.spp * s.snn - s.spn * s.spn;
    const double det_scale = s.spp * s.snn;
    const bool singular = det <= det_scale * 1e-12;

    if (singular) {
        condition = FitCondition::rank_deficient_fallback;
        // Fit whichever column carries mass; the other sits at the floor.
        if (s.spp >= s.snn) {
            theta_pos = (s.spy + kParamFloor * s.spn) / s.spp;
            if (s.snn > 0.0)
                theta_neg = (kParamFloor * s.spn - s.sny) / s.snn;
        } else {
            theta_neg = (kParamFloor * s.spn - s.sny) / s.snn;
            if (s.spp > 0.0)
                theta_pos = (s.spy + kParamFloor * s.spn) / s.spp;
        }
        theta_pos = std::max(theta_pos, kParamFloor);
        theta_neg = std::max(theta_neg, kParamFloor);
    } else {
        theta_pos = (s.spy * s.snn - s.spn * s.sny) / det;
        theta_neg = (s.spn * s.spy - s.spp * s.sny) / det;
        if (theta_pos <= 0.0 || theta_neg <= 0.0) {
            condition = FitCondition::rank_deficient_fallback;
            if (theta_pos <= 0.0 && theta_neg <= 0.0) {
                theta_pos = theta_neg = kParamFloor;
            } else if (theta_pos <= 0.0) {
                theta_pos = kParamFloor;
                theta_neg = std::max((kParamFloor * s.spn - s.sny) / s.snn, kParamFloor);
            } else {
                theta_neg = kParamFloor;
                theta_pos = std::max((s.spy + kParamFloor * s.spn) / s.spp, kParamFloor);
            }
        }
    }

    FitResult result{CameraParams(theta_pos, theta_neg, k),
                     residual_rms_at(rows, k, theta_pos, theta_neg), rows.size(),
                     condition};
    return result;
}

double profile_objective(const ObservationSet& obs, double k) {
    const FitResult fit = fit_thresholds_given_k(obs, k);
    double jac = 0.0;
    for (const ObservationRow& r : obs.rows()) jac += std::log(r.f1 + k);
    jac /= static_cast<double>(obs.rows().size());
    return std::log(std::max(fit.residual_rms, 1e-300)) + jac;
}

FitResult fit_all(const ObservationSet& obs, KRange k_range) {
    if (!(std::isfinite(k_range.lo) && std::isfinite(k_range.hi)) ||
        k_range.lo <= 0.0 || k_range.hi < k_range.lo)
        throw std::invalid_argument("fit_all: need 0 < k_lo <= k_hi");

    if (k_range.hi == k_range.lo) return fit_thresholds_given_k(obs, k_range.lo);

    const int grid_points = 64;
    const double ulo = std::log(k_range.lo);
    const double uhi = std::log(k_range.hi);

    double best_u = ulo;
    double best_score = std::numeric_limits<double>::infinity();
    auto consider = [&](double u) {
        const double score = profile_objective(obs, std::exp(u));
        if (score < best_score) {
            best_score = score;
            best_u = u;
        }
        return score;
    };

    int best_index = 0;
    for (int i = 0; i < grid_points; ++i) {
        const double u = ulo + (uhi - ulo) * i / (grid_points - 1);
        const double score = consider(u);
        if (score == best_score) best_index = i;
    }

    // Golden-section refinement inside the bracketing grid cell.
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = ulo + (uhi - ulo) * std::max(best_index - 1, 0) / (grid_points - 1);
    double b = ulo + (uhi - ulo) * std::min(best_index + 1, grid_points - 1) /
                         (grid_points - 1);
    double c = b - golden * (b - a);
    double d = a + golden * (b - a);
    double fc = consider(c);
    double fd = consider(d);
    while (b - a > 1e-4) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = consider(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = consider(d);
        }
    }

    return fit_thresholds_given_k(obs, std::exp(best_u));
}

double objective_gradient_check(const ObservationSet& obs,
                                const CameraParams& params, double h) {
    if (!(h > 0.0)) throw std::invalid_argument("objective_gradient_check: h must be > 0");
    const auto& rows = obs.rows();
    const double k = params.k();

    auto objective = [&rows, k](double tp, double tn) {
        double ss = 0.0;
        for (const ObservationRow& r : rows) {
            const double y = std::log((r.f1 + k) / (r.f0 + k));
            const double res = tp * r.e_pos - tn * r.e_neg - y;
            ss += res * res;
        }
        return ss;
    };

    const double tp = params.theta_pos();
    const double tn = params.theta_neg();

    double grad_pos = 0.0;
    double grad_neg = 0.0;
    for (const ObservationRow& r : rows) {
        const double y = std::log((r.f1 + k) / (r.f0 + k));
        const double res = tp * r.e_pos - tn * r.e_neg - y;
        grad_pos += 2.0 * r.e_pos * res;
        grad_neg -= 2.0 * r.e_neg * res;
    }

    const double num_pos = (objective(tp + h, tn) - objective(tp - h, tn)) / (2.0 * h);
    const double num_neg = (objective(tp, tn + h) - objective(tp, tn - h)) / (2.0 * h);

    auto rel_dev = [](double analytic, double numeric) {
        const double scale = std::max(std::abs(analytic), std::abs(numeric));
        if (scale == 0.0) return 0.0;
        return std::abs(analytic - numeric) / scale;
    };
    return std::max(rel_dev(grad_pos, num_pos), rel_dev(grad_neg, num_neg));
}

}  // namespace evox
