#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fsmr/geometry.hpp"
#include "fsmr/image.hpp"

namespace fsmr {

/// Delaunay triangulation by incremental Bowyer-Watson insertion. Coincident points are
/// kept once (first occurrence). Triangles are counter-clockwise.
class DelaunayTriangulation {
public:
    using Triangle = std::array<int, 3>;

    explicit DelaunayTriangulation(std::span<const Point2> points) : points_(points.begin(), points.end()) {
        build();
    }

    std::span<const Point2> points() const { return points_; }
    std::span<const Triangle> triangles() const { return triangles_; }
    bool degenerate() const { return triangles_.empty(); }

    /// Vertices sharing an edge with `v`, in ascending order.
    std::vector<int> neighbors(int v) const {
        std::vector<int> out;
        for (const Triangle& t : triangles_) {
            for (int i = 0; i < 3; ++i) {
                if (t[i] == v) {
                    out.push_back(t[(i + 1) % 3]);
                    out.push_back(t[(i + 2) % 3]);
                }
            }
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    struct Location {
        std::size_t triangle;
        std::array<double, 3> barycentric;
    };

    /// Triangle containing `p` (boundary inclusive) with barycentric coordinates.
    std::optional<Location> locate(Point2 p) const {
        constexpr double kSlack = -1e-12;
        for (std::size_t t = 0; t < triangles_.size(); ++t) {
            const auto b = barycentric(t, p);
            if (b[0] >= kSlack && b[1] >= kSlack && b[2] >= kSlack) {
                return Location{t, b};
            }
        }
        return std::nullopt;
    }

    std::array<double, 3> barycentric(std::size_t t, Point2 p) const {
        const Point2 a = points_[triangles_[t][0]];
        const Point2 b = points_[triangles_[t][1]];
        const Point2 c = points_[triangles_[t][2]];
        const double det = cross(b.x - a.x, b.y - a.y, c.x - a.x, c.y - a.y);
        const double b1 = cross(p.x - a.x, p.y - a.y, c.x - a.x, c.y - a.y) / det;
        const double b2 = cross(b.x - a.x, b.y - a.y, p.x - a.x, p.y - a.y) / det;
        return {1.0 - b1 - b2, b1, b2};
    }

private:
    static double cross(double ax, double ay, double bx, double by) { return ax * by - ay * bx; }

    static double orient(Point2 a, Point2 b, Point2 c) { return cross(b.x - a.x, b.y - a.y, c.x - a.x, c.y - a.y); }

    // Positive when d lies strictly inside the circumcircle of the counter-clockwise triangle abc.
    static double incircle(Point2 a, Point2 b, Point2 c, Point2 d) {
        const double adx = a.x - d.x;
        const double ady = a.y - d.y;
        const double bdx = b.x - d.x;
        const double bdy = b.y - d.y;
        const double cdx = c.x - d.x;
        const double cdy = c.y - d.y;
        const double ad = adx * adx + ady * ady;
        const double bd = bdx * bdx + bdy * bdy;
        const double cd = cdx * cdx + cdy * cdy;
        return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) + ad * (bdx * cdy - bdy * cdx);
    }

    void build() {
        const std::size_t n = points_.size();
        if (n < 3) {
            return;
        }
        Point2 lo = points_.front();
        Point2 hi = points_.front();
        for (const Point2& p : points_) {
            lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
            hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
        }
        // Integer-valued super triangle keeps integer inputs exact in the predicates.
        const double span = std::ceil(std::max({hi.x - lo.x, hi.y - lo.y, 1.0}));
        const double cx = std::round(0.5 * (lo.x + hi.x));
        const double cy = std::round(0.5 * (lo.y + hi.y));
        const int s0 = static_cast<int>(n);
        points_.push_back({cx - 20.0 * span, cy - 10.0 * span});
        points_.push_back({cx + 20.0 * span, cy - 10.0 * span});
        points_.push_back({cx, cy + 20.0 * span});
        triangles_.push_back({s0, s0 + 1, s0 + 2});

        std::vector<std::size_t> bad;
        std::vector<std::pair<int, int>> edges;
        for (std::size_t i = 0; i < n; ++i) {
            const Point2 p = points_[i];
            if (is_duplicate(i)) {
                continue;
            }
            bad.clear();
            for (std::size_t t = 0; t < triangles_.size(); ++t) {
                const Triangle& tri = triangles_[t];
                if (incircle(points_[tri[0]], points_[tri[1]], points_[tri[2]], p) > 0.0) {
                    bad.push_back(t);
                }
            }
            edges.clear();
            for (std::size_t t : bad) {
                const Triangle& tri = triangles_[t];
                for (int e = 0; e < 3; ++e) {
                    edges.emplace_back(tri[e], tri[(e + 1) % 3]);
                }
            }
            // Boundary of the cavity: edges not shared by two bad triangles.
            std::vector<char> shared(edges.size(), 0);
            for (std::size_t a = 0; a < edges.size(); ++a) {
                for (std::size_t b = a + 1; b < edges.size(); ++b) {
                    if (edges[a].first == edges[b].second && edges[a].second == edges[b].first) {
                        shared[a] = shared[b] = 1;
                    }
                }
            }
            for (auto it = bad.rbegin(); it != bad.rend(); ++it) {
                triangles_[*it] = triangles_.back();
                triangles_.pop_back();
            }
            for (std::size_t e = 0; e < edges.size(); ++e) {
                if (shared[e] == 0 && orient(points_[edges[e].first], points_[edges[e].second], p) > 0.0) {
                    triangles_.push_back({edges[e].first, edges[e].second, static_cast<int>(i)});
                }
            }
        }
        std::erase_if(triangles_, [s0](const Triangle& t) { return t[0] >= s0 || t[1] >= s0 || t[2] >= s0; });
        points_.resize(n);
        std::sort(triangles_.begin(), triangles_.end());
    }

    bool is_duplicate(std::size_t i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (points_[j] == points_[i]) {
                return true;
            }
        }
        return false;
    }

    std::vector<Point2> points_;
    std::vector<Triangle> triangles_;
};

/// Piecewise-cubic interpolation of scattered data over a Delaunay triangulation.
///
/// Vertex gradients come from a weighted least-squares quadratic fit over the vertex's
/// neighbourhood. Each triangle carries a cubic Bezier patch whose edge control points
/// follow the vertex gradients and whose centre control point gives quadratic
/// precision; the interpolant is continuous, passes through every sample and
/// reproduces linear data exactly. Outside the convex hull the nearest sample is used.
class ScatteredCubicInterpolator {
public:
    explicit ScatteredCubicInterpolator(std::span<const MeshSample> samples)
        : values_(samples.size()), triangulation_(positions_of(samples)) {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            values_[i] = samples[i].value;
        }
        estimate_gradients();
    }

    const DelaunayTriangulation& triangulation() const { return triangulation_; }
    Point2 gradient(std::size_t vertex) const { return gradients_[vertex]; }

    double operator()(Point2 p) const {
        if (values_.empty()) {
            throw EmptyArea();
        }
        const auto pts = triangulation_.points();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (pts[i] == p) {
                return values_[i];
            }
        }
        const auto loc = triangulation_.locate(p);
        if (!loc) {
            return nearest(p);
        }
        return patch_value(triangulation_.triangles()[loc->triangle], loc->barycentric);
    }

private:
    static std::vector<Point2> positions_of(std::span<const MeshSample> samples) {
        std::vector<Point2> pts;
        pts.reserve(samples.size());
        for (const auto& s : samples) {
            pts.push_back(s.position);
        }
        return pts;
    }

    double nearest(Point2 p) const {
        const auto pts = triangulation_.points();
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_index = 0;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double d = (pts[i].x - p.x) * (pts[i].x - p.x) + (pts[i].y - p.y) * (pts[i].y - p.y);
            if (d < best) {
                best = d;
                best_index = i;
            }
        }
        return values_[best_index];
    }

    // Solves the n x n system in place (row-major, augmented column last). Returns false
    // when a pivot is negligible relative to the matrix scale.
    static bool solve(std::vector<double>& m, int n) {
        double scale = 0.0;
        for (int r = 0; r < n; ++r) {
            for (int c = 0; c < n; ++c) {
                scale = std::max(scale, std::abs(m[r * (n + 1) + c]));
            }
        }
        if (scale == 0.0) {
            return false;
        }
        for (int col = 0; col < n; ++col) {
            int pivot = col;
            for (int r = col + 1; r < n; ++r) {
                if (std::abs(m[r * (n + 1) + col]) > std::abs(m[pivot * (n + 1) + col])) {
                    pivot = r;
                }
            }
            if (std::abs(m[pivot * (n + 1) + col]) < 1e-10 * scale) {
                return false;
            }
            for (int c = 0; c <= n; ++c) {
                std::swap(m[col * (n + 1) + c], m[pivot * (n + 1) + c]);
            }
            for (int r = col + 1; r < n; ++r) {
                const double f = m[r * (n + 1) + col] / m[col * (n + 1) + col];
                for (int c = col; c <= n; ++c) {
                    m[r * (n + 1) + c] -= f * m[col * (n + 1) + c];
                }
            }
        }
        for (int r = n - 1; r >= 0; --r) {
            double v = m[r * (n + 1) + n];
            for (int c = r + 1; c < n; ++c) {
                v -= m[r * (n + 1) + c] * m[c * (n + 1) + n];
            }
            m[r * (n + 1) + n] = v / m[r * (n + 1) + r];
        }
        return true;
    }

    // Weighted fit of f_j - f_v by a polynomial without constant term; `terms` = 2 (linear)
    // or 5 (quadratic). Returns the gradient part on success.
    std::optional<Point2> fit(int v, std::span<const int> neighbors, int terms) const {
        if (static_cast<int>(neighbors.size()) < terms) {
            return std::nullopt;
        }
        const auto pts = triangulation_.points();
        std::vector<double> m(static_cast<std::size_t>(terms) * (terms + 1), 0.0);
        std::array<double, 5> row{};
        for (int j : neighbors) {
            const double dx = pts[j].x - pts[v].x;
            const double dy = pts[j].y - pts[v].y;
            const double w = 1.0 / (dx * dx + dy * dy);
            const double df = values_[j] - values_[v];
            row = {dx, dy, dx * dx, dx * dy, dy * dy};
            for (int r = 0; r < terms; ++r) {
                for (int c = 0; c < terms; ++c) {
                    m[r * (terms + 1) + c] += w * row[r] * row[c];
                }
                m[r * (terms + 1) + terms] += w * row[r] * df;
            }
        }
        if (!solve(m, terms)) {
            return std::nullopt;
        }
        return Point2{m[0 * (terms + 1) + terms], m[1 * (terms + 1) + terms]};
    }

    void estimate_gradients() {
        const auto pts = triangulation_.points();
        gradients_.assign(pts.size(), {0.0, 0.0});
        if (triangulation_.degenerate()) {
            return;
        }
        std::vector<std::vector<int>> ring(pts.size());
        for (std::size_t v = 0; v < pts.size(); ++v) {
            ring[v] = triangulation_.neighbors(static_cast<int>(v));
        }
        for (std::size_t v = 0; v < pts.size(); ++v) {
            std::vector<int> hood = ring[v];
            if (hood.size() < 8) {
                for (int u : ring[v]) {
                    hood.insert(hood.end(), ring[u].begin(), ring[u].end());
                }
                std::sort(hood.begin(), hood.end());
                hood.erase(std::unique(hood.begin(), hood.end()), hood.end());
                std::erase(hood, static_cast<int>(v));
            }
            const int vi = static_cast<int>(v);
            if (auto g = fit(vi, hood, 5)) {
                gradients_[v] = *g;
            } else if (auto gl = fit(vi, hood, 2)) {
                gradients_[v] = *gl;
            }
        }
    }

    double patch_value(const DelaunayTriangulation::Triangle& t, const std::array<double, 3>& b) const {
        const auto pts = triangulation_.points();
        const Point2 p[3] = {pts[t[0]], pts[t[1]], pts[t[2]]};
        const double f[3] = {values_[t[0]], values_[t[1]], values_[t[2]]};
        const Point2 g[3] = {gradients_[t[0]], gradients_[t[1]], gradients_[t[2]]};
        // Edge control point next to vertex i on the edge towards vertex j.
        auto edge = [&](int i, int j) {
            return f[i] + (g[i].x * (p[j].x - p[i].x) + g[i].y * (p[j].y - p[i].y)) / 3.0;
        };
        const double c210 = edge(0, 1);
        const double c201 = edge(0, 2);
        const double c120 = edge(1, 0);
        const double c021 = edge(1, 2);
        const double c102 = edge(2, 0);
        const double c012 = edge(2, 1);
        const double c111 =
            (c210 + c201 + c120 + c021 + c102 + c012) / 4.0 - (f[0] + f[1] + f[2]) / 6.0;
        const double u = b[0];
        const double v = b[1];
        const double w = b[2];
        return f[0] * u * u * u + f[1] * v * v * v + f[2] * w * w * w + 3.0 * c210 * u * u * v +
               3.0 * c201 * u * u * w + 3.0 * c120 * u * v * v + 3.0 * c021 * v * v * w + 3.0 * c102 * u * w * w +
               3.0 * c012 * v * w * w + 6.0 * c111 * u * v * w;
    }

    std::vector<double> values_;
    DelaunayTriangulation triangulation_;
    std::vector<Point2> gradients_;
};

} // namespace fsmr
