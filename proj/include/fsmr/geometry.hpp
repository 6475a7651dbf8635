#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "fsmr/error.hpp"

namespace fsmr {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

/// y = T x + t, with T stored row-major as {{t00, t01}, {t10, t11}}.
struct AffineTransform {
    std::array<std::array<double, 2>, 2> matrix{{{1.0, 0.0}, {0.0, 1.0}}};
    Point2 translation{};

    static constexpr double kSingularDeterminant = 1e-12;

    static AffineTransform identity() { return {}; }

    static AffineTransform linear(double t00, double t01, double t10, double t11) {
        AffineTransform a;
        a.matrix = {{{t00, t01}, {t10, t11}}};
        return a;
    }

    static AffineTransform rotation_degrees(double degrees) {
        const double r = degrees * std::numbers::pi / 180.0;
        const double c = std::cos(r);
        const double s = std::sin(r);
        return linear(c, -s, s, c);
    }

    static AffineTransform translate(double tx, double ty) {
        AffineTransform a;
        a.translation = {tx, ty};
        return a;
    }

    double determinant() const { return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]; }
};

inline Point2 apply_affine(const AffineTransform& a, Point2 p) {
    return {a.matrix[0][0] * p.x + a.matrix[0][1] * p.y + a.translation.x,
            a.matrix[1][0] * p.x + a.matrix[1][1] * p.y + a.translation.y};
}

/// `outer` after `inner`: compose(outer, inner)(p) = outer(inner(p)).
inline AffineTransform compose(const AffineTransform& outer, const AffineTransform& inner) {
    AffineTransform c;
    for (int r = 0; r < 2; ++r) {
        for (int col = 0; col < 2; ++col) {
            c.matrix[r][col] = outer.matrix[r][0] * inner.matrix[0][col] + outer.matrix[r][1] * inner.matrix[1][col];
        }
    }
    const Point2 t = apply_affine(outer, inner.translation);
    c.translation = t;
    return c;
}

inline AffineTransform invert_affine(const AffineTransform& a) {
    const double det = a.determinant();
    if (!(std::abs(det) > AffineTransform::kSingularDeterminant)) {
        throw SingularTransform();
    }
    const auto& m = a.matrix;
    AffineTransform inv = AffineTransform::linear(m[1][1] / det, -m[0][1] / det, -m[1][0] / det, m[0][0] / det);
    const Point2 t = apply_affine(AffineTransform::linear(inv.matrix[0][0], inv.matrix[0][1], inv.matrix[1][0],
                                                          inv.matrix[1][1]),
                                  a.translation);
    inv.translation = {-t.x, -t.y};
    return inv;
}

/// Conjugates a linear map so that it acts about `center` instead of the origin.
inline AffineTransform about_point(const AffineTransform& a, Point2 center) {
    return compose(AffineTransform::translate(center.x, center.y),
                   compose(a, AffineTransform::translate(-center.x, -center.y)));
}

} // namespace fsmr
