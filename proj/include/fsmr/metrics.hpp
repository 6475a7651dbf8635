#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "fsmr/error.hpp"
#include "fsmr/image.hpp"

namespace fsmr {

inline constexpr int kDefaultCrop = 24;
inline constexpr double kPeak = 255.0;

namespace detail {

inline void require_same_shape(const Image& a, const Image& b) {
    if (a.width() != b.width() || a.height() != b.height()) {
        throw InvalidArgument("images differ in size");
    }
}

} // namespace detail

/// PSNR in dB over the interior left after dropping `crop` pixels on every side.
/// Identical interiors give +infinity.
inline double psnr(const Image& a, const Image& b, int crop = kDefaultCrop) {
    detail::require_same_shape(a, b);
    if (crop < 0 || a.width() <= 2 * crop || a.height() <= 2 * crop) {
        throw InvalidArgument("crop leaves no interior");
    }
    double sum = 0.0;
    for (int n = crop; n < a.height() - crop; ++n) {
        for (int m = crop; m < a.width() - crop; ++m) {
            const double d = a.at(m, n) - b.at(m, n);
            sum += d * d;
        }
    }
    if (sum == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    const double count = static_cast<double>(a.width() - 2 * crop) * (a.height() - 2 * crop);
    return 10.0 * std::log10(kPeak * kPeak / (sum / count));
}

/// Mean SSIM over window centres inside the cropped interior. 11x11 Gaussian window with
/// standard deviation 1.5; stabilisers (0.01 * 255)^2 and (0.03 * 255)^2. Centres whose
/// window would leave the image are excluded.
inline double ssim(const Image& a, const Image& b, int crop = kDefaultCrop) {
    detail::require_same_shape(a, b);
    constexpr int kRadius = 5;
    constexpr int kSize = 2 * kRadius + 1;
    constexpr double kSigma = 1.5;
    constexpr double c1 = (0.01 * kPeak) * (0.01 * kPeak);
    constexpr double c2 = (0.03 * kPeak) * (0.03 * kPeak);

    std::array<double, kSize * kSize> window{};
    double total = 0.0;
    for (int j = 0; j < kSize; ++j) {
        for (int i = 0; i < kSize; ++i) {
            const double dx = i - kRadius;
            const double dy = j - kRadius;
            window[j * kSize + i] = std::exp(-(dx * dx + dy * dy) / (2.0 * kSigma * kSigma));
            total += window[j * kSize + i];
        }
    }
    for (double& g : window) {
        g /= total;
    }

    const int margin = std::max(std::max(crop, 0), kRadius);
    if (a.width() <= 2 * margin || a.height() <= 2 * margin) {
        throw InvalidArgument("crop leaves no interior");
    }
    double sum = 0.0;
    long count = 0;
    for (int n = margin; n < a.height() - margin; ++n) {
        for (int m = margin; m < a.width() - margin; ++m) {
            double mu_a = 0.0;
            double mu_b = 0.0;
            double aa = 0.0;
            double bb = 0.0;
            double ab = 0.0;
            for (int j = 0; j < kSize; ++j) {
                for (int i = 0; i < kSize; ++i) {
                    const double g = window[j * kSize + i];
                    const double va = a.at(m + i - kRadius, n + j - kRadius);
                    const double vb = b.at(m + i - kRadius, n + j - kRadius);
                    mu_a += g * va;
                    mu_b += g * vb;
                    aa += g * va * va;
                    bb += g * vb * vb;
                    ab += g * va * vb;
                }
            }
            const double var_a = aa - mu_a * mu_a;
            const double var_b = bb - mu_b * mu_b;
            const double cov = ab - mu_a * mu_b;
            sum += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                   ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

} // namespace fsmr
