#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string_view>

#include "fsmr/error.hpp"
#include "fsmr/geometry.hpp"
#include "fsmr/image.hpp"

namespace fsmr {

enum class Kernel { bilinear, bicubic, lanczos };

namespace detail {

inline constexpr double kCatmullRom = -0.5;
inline constexpr int kLanczosLobes = 3;

inline double cubic_weight(double x) {
    constexpr double a = kCatmullRom;
    x = std::abs(x);
    if (x <= 1.0) {
        return ((a + 2.0) * x - (a + 3.0)) * x * x + 1.0;
    }
    if (x < 2.0) {
        return ((a * x - 5.0 * a) * x + 8.0 * a) * x - 4.0 * a;
    }
    return 0.0;
}

inline double sinc(double x) {
    if (x == 0.0) {
        return 1.0;
    }
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

inline double lanczos_weight(double x) {
    return std::abs(x) < kLanczosLobes ? sinc(x) * sinc(x / kLanczosLobes) : 0.0;
}

// Taps and weights of one separable 1-D kernel at source coordinate `s`.
struct Taps {
    int first = 0;
    int count = 0;
    std::array<double, 2 * kLanczosLobes> weights{};
};

inline Taps kernel_taps(Kernel kernel, double s) {
    const double base = std::floor(s);
    const double frac = s - base;
    Taps t;
    if (frac == 0.0) {
        t.first = static_cast<int>(base);
        t.count = 1;
        t.weights[0] = 1.0;
        return t;
    }
    int radius = 1;
    switch (kernel) {
    case Kernel::bilinear:
        radius = 1;
        break;
    case Kernel::bicubic:
        radius = 2;
        break;
    case Kernel::lanczos:
        radius = kLanczosLobes;
        break;
    }
    t.first = static_cast<int>(base) - radius + 1;
    t.count = 2 * radius;
    double sum = 0.0;
    for (int i = 0; i < t.count; ++i) {
        const double x = s - (t.first + i);
        double w = 0.0;
        switch (kernel) {
        case Kernel::bilinear:
            w = 1.0 - std::abs(x);
            break;
        case Kernel::bicubic:
            w = cubic_weight(x);
            break;
        case Kernel::lanczos:
            w = lanczos_weight(x);
            break;
        }
        t.weights[i] = w;
        sum += w;
    }
    for (int i = 0; i < t.count; ++i) {
        t.weights[i] /= sum;
    }
    return t;
}

} // namespace detail

inline std::string_view kernel_name(Kernel k) {
    switch (k) {
    case Kernel::bilinear:
        return "bilinear";
    case Kernel::bicubic:
        return "bicubic";
    case Kernel::lanczos:
        return "lanczos";
    }
    return "?";
}

/// Inverse-mapping warp: output pixel p takes the kernel-interpolated source value at
/// inverse(p). Source reads outside the raster are clamped to the nearest edge pixel.
inline Image kernel_warp(const Image& source, const AffineTransform& inverse, Kernel kernel, int out_width,
                         int out_height) {
    Image out(out_width, out_height);
    const int w = source.width();
    const int h = source.height();
    for (int n = 0; n < out_height; ++n) {
        for (int m = 0; m < out_width; ++m) {
            const Point2 s = apply_affine(inverse, {static_cast<double>(m), static_cast<double>(n)});
            const auto tx = detail::kernel_taps(kernel, s.x);
            const auto ty = detail::kernel_taps(kernel, s.y);
            double acc = 0.0;
            for (int j = 0; j < ty.count; ++j) {
                const int row = std::clamp(ty.first + j, 0, h - 1);
                double line = 0.0;
                for (int i = 0; i < tx.count; ++i) {
                    line += tx.weights[i] * source.at(std::clamp(tx.first + i, 0, w - 1), row);
                }
                acc += ty.weights[j] * line;
            }
            out.at(m, n) = acc;
        }
    }
    return out;
}

inline Image kernel_warp(const Image& source, const AffineTransform& inverse, Kernel kernel) {
    return kernel_warp(source, inverse, kernel, source.width(), source.height());
}

} // namespace fsmr
