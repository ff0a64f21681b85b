#include "evox/metrics.hpp"

#include <array>
#include <cmath>

namespace evox {

namespace {

constexpr int kWindow = 11;
constexpr int kRadius = kWindow / 2;
constexpr double kSigma = 1.5;
constexpr double kC1 = 0.01 * 0.01;
constexpr double kC2 = 0.03 * 0.03;

std::array<double, kWindow> gaussian_taps() {
    std::array<double, kWindow> taps{};
    double sum = 0.0;
    for (int i = 0; i < kWindow; ++i) {
        const double d = i - kRadius;
        taps[i] = std::exp(-d * d / (2.0 * kSigma * kSigma));
        sum += taps[i];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

void check_same_shape(const Frame& a, const Frame& b) {
    if (a.width() != b.width() || a.height() != b.height())
        throw std::invalid_argument("metrics: frame dimensions differ");
}

// Valid-mode separable Gaussian filter: output has (w - 10) x (h - 10)
// samples.
std::vector<double> filter_valid(const std::vector<double>& img, std::int32_t w,
                                 std::int32_t h,
                                 const std::array<double, kWindow>& taps) {
    const std::int32_t ow = w - kWindow + 1;
    const std::int32_t oh = h - kWindow + 1;
    std::vector<double> rowpass(static_cast<std::size_t>(ow) * h);
    for (std::int32_t y = 0; y < h; ++y) {
        for (std::int32_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < kWindow; ++i)
                acc += taps[i] * img[static_cast<std::size_t>(y) * w + x + i];
            rowpass[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (std::int32_t y = 0; y < oh; ++y) {
        for (std::int32_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < kWindow; ++i)
                acc += taps[i] * rowpass[static_cast<std::size_t>(y + i) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = acc;
        }
    }
    return out;
}

}  // namespace

double mse(const Frame& a, const Frame& b) {
    check_same_shape(a, b);
    const auto& pa = a.pixels();
    const auto& pb = b.pixels();
    double sum = 0.0;
    for (std::size_t i = 0; i < pa.size(); ++i) {
        const double d = pa[i] - pb[i];
        sum += d * d;
    }
    return sum / static_cast<double>(pa.size());
}

double ssim(const Frame& a, const Frame& b) {
    check_same_shape(a, b);
    if (a.width() < kWindow || a.height() < kWindow)
        throw std::invalid_argument("ssim: frames must be at least 11x11");

    static const std::array<double, kWindow> taps = gaussian_taps();
    const std::int32_t w = a.width();
    const std::int32_t h = a.height();
    const auto& pa = a.pixels();
    const auto& pb = b.pixels();

    std::vector<double> aa(pa.size()), bb(pa.size()), ab(pa.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        aa[i] = pa[i] * pa[i];
        bb[i] = pb[i] * pb[i];
        ab[i] = pa[i] * pb[i];
    }

    const std::vector<double> mu_a = filter_valid(pa, w, h, taps);
    const std::vector<double> mu_b = filter_valid(pb, w, h, taps);
    const std::vector<double> m_aa = filter_valid(aa, w, h, taps);
    const std::vector<double> m_bb = filter_valid(bb, w, h, taps);
    const std::vector<double> m_ab = filter_valid(ab, w, h, taps);

    double sum = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ua = mu_a[i];
        const double ub = mu_b[i];
        const double va = m_aa[i] - ua * ua;
        const double vb = m_bb[i] - ub * ub;
        const double cov = m_ab[i] - ua * ub;
        const double num = (2.0 * ua * ub + kC1) * (2.0 * cov + kC2);
        const double den = (ua * ua + ub * ub + kC1) * (va + vb + kC2);
        sum += num / den;
    }
    return sum / static_cast<double>(mu_a.size());
}

SequenceReport evaluate_sequence(std::span<const Frame> recon,
                                 std::span<const Frame> truth) {
    if (recon.size() != truth.size())
        throw std::invalid_argument("evaluate_sequence: sequence lengths differ");
    if (recon.empty())
        throw std::invalid_argument("evaluate_sequence: empty sequences");

    SequenceReport report;
    report.per_frame.reserve(recon.size());
    for (std::size_t i = 0; i < recon.size(); ++i) {
        FrameMetrics m{mse(recon[i], truth[i]), ssim(recon[i], truth[i])};
        report.per_frame.push_back(m);
        report.mean_mse += m.mse;
        report.mean_ssim += m.ssim;
    }
    report.mean_mse /= static_cast<double>(recon.size());
    report.mean_ssim /= static_cast<double>(recon.size());
    return report;
}

}  // namespace evox
