#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fsmr/error.hpp"
#include "fsmr/geometry.hpp"

namespace fsmr {

/// Horizontal (k) and vertical (l) frequency index of a 2-D DCT basis function.
struct Frequency {
    int k = 0;
    int l = 0;

    friend constexpr bool operator==(const Frequency&, const Frequency&) = default;
};

/// The DCT dictionary of a width x height reconstruction area: all (k, l) with
/// 0 <= k < width, 0 <= l < height. Flat index is k * height + l.
struct BasisSpec {
    int width = 0;
    int height = 0;

    BasisSpec() = default;
    BasisSpec(int w, int h) : width(w), height(h) {
        if (w <= 0 || h <= 0) {
            throw InvalidArgument("basis dimensions must be positive");
        }
    }

    std::size_t size() const { return static_cast<std::size_t>(width) * static_cast<std::size_t>(height); }
    std::size_t index(Frequency f) const {
        return static_cast<std::size_t>(f.k) * static_cast<std::size_t>(height) + static_cast<std::size_t>(f.l);
    }
    Frequency frequency(std::size_t index) const {
        return {static_cast<int>(index / static_cast<std::size_t>(height)),
                static_cast<int>(index % static_cast<std::size_t>(height))};
    }

    std::vector<Frequency> frequencies() const {
        std::vector<Frequency> all;
        all.reserve(size());
        for (std::size_t i = 0; i < size(); ++i) {
            all.push_back(frequency(i));
        }
        return all;
    }
};

/// One cosine factor of the separable basis: cos(pi * k * (2x + 1) / (2 * extent)).
inline double cosine_factor(int k, double x, int extent) {
    return std::cos(std::numbers::pi * k * (2.0 * x + 1.0) / (2.0 * extent));
}

/// DCT-II basis function phi_(k,l) at a real position, with unit leading amplitude.
inline double eval_basis(int k, int l, double x, double y, int width, int height) {
    if (k < 0 || k >= width || l < 0 || l >= height) {
        throw InvalidArgument("frequency index outside the dictionary");
    }
    return cosine_factor(k, x, width) * cosine_factor(l, y, height);
}

/// Dense table of basis values: one row per point, one column per requested frequency.
class BasisTable {
public:
    BasisTable() = default;
    BasisTable(std::size_t rows, std::vector<Frequency> columns)
        : rows_(rows), columns_(std::move(columns)), values_(rows_ * columns_.size()) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return columns_.size(); }
    std::span<const Frequency> frequencies() const { return columns_; }

    double operator()(std::size_t row, std::size_t col) const { return values_[row * cols() + col]; }
    double& operator()(std::size_t row, std::size_t col) { return values_[row * cols() + col]; }

    /// Per-column sum_i w_i * phi_i^2 (weights supplied by the caller).
    std::vector<double> weighted_norms(std::span<const double> weights) const {
        std::vector<double> norms(cols(), 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t c = 0; c < cols(); ++c) {
                const double v = (*this)(i, c);
                norms[c] += weights[i] * v * v;
            }
        }
        return norms;
    }

private:
    std::size_t rows_ = 0;
    std::vector<Frequency> columns_;
    std::vector<double> values_;
};

inline BasisTable build_table(std::span<const Point2> points, std::span<const Frequency> frequencies,
                              const BasisSpec& spec) {
    BasisTable table(points.size(), {frequencies.begin(), frequencies.end()});
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t c = 0; c < frequencies.size(); ++c) {
            table(i, c) = eval_basis(frequencies[c].k, frequencies[c].l, points[i].x, points[i].y, spec.width,
                                     spec.height);
        }
    }
    return table;
}

inline BasisTable build_table(std::span<const Point2> points, const BasisSpec& spec) {
    const auto all = spec.frequencies();
    return build_table(points, all, spec);
}

/// Separable form of the full dictionary at a fixed point set: phi_(k,l)(p_i) is
/// horizontal(i, k) * vertical(i, l). This is what the model-generation loop consumes;
/// it holds (width + height) values per point instead of width * height, and turns
/// dictionary-wide projections into one small matrix product.
class SeparableBasis {
public:
    using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>;
    using RowMajorMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

    SeparableBasis() = default;
    SeparableBasis(std::span<const Point2> points, const BasisSpec& spec)
        : spec_(spec), horizontal_(points.size(), spec.width), vertical_(points.size(), spec.height) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            for (int k = 0; k < spec.width; ++k) {
                horizontal_(r, k) = cosine_factor(k, points[i].x, spec.width);
            }
            for (int l = 0; l < spec.height; ++l) {
                vertical_(r, l) = cosine_factor(l, points[i].y, spec.height);
            }
        }
    }

    const BasisSpec& spec() const { return spec_; }
    std::size_t points() const { return static_cast<std::size_t>(horizontal_.rows()); }
    const Matrix& horizontal() const { return horizontal_; }
    const Matrix& vertical() const { return vertical_; }

    /// Column vector phi_f(p_i) over all points.
    Eigen::VectorXd column(Frequency f) const { return horizontal_.col(f.k).cwiseProduct(vertical_.col(f.l)); }

    /// sum_(k,l) c(k,l) phi_(k,l)(p_i) for coefficients laid out like BasisSpec::index.
    Eigen::VectorXd synthesize(std::span<const double> coefficients) const {
        const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> c(
            coefficients.data(), spec_.width, spec_.height);
        return ((horizontal_ * c).array() * vertical_.array()).rowwise().sum();
    }

    double operator()(std::size_t i, Frequency f) const {
        const auto r = static_cast<Eigen::Index>(i);
        return horizontal_(r, f.k) * vertical_(r, f.l);
    }

    /// out[k * height + l] += sum_i scale[i] * phi_(k,l)(p_i), for all (k, l).
    void accumulate_projection(std::span<const double> scale, std::span<double> out) const {
        const Eigen::Map<const Eigen::VectorXd> s(scale.data(), static_cast<Eigen::Index>(points()));
        RowMajorMap target(out.data(), spec_.width, spec_.height);
        target.noalias() += horizontal_.transpose() * (s.asDiagonal() * vertical_);
    }

    /// out[k * height + l] += sum_i scale[i] * phi_(k,l)(p_i)^2, for all (k, l).
    void accumulate_squared(std::span<const double> scale, std::span<double> out) const {
        const Eigen::Map<const Eigen::VectorXd> s(scale.data(), static_cast<Eigen::Index>(points()));
        RowMajorMap target(out.data(), spec_.width, spec_.height);
        const Matrix h2 = horizontal_.array().square().matrix();
        const Matrix v2 = vertical_.array().square().matrix();
        target.noalias() += h2.transpose() * (s.asDiagonal() * v2);
    }

private:
    BasisSpec spec_;
    Matrix horizontal_;
    Matrix vertical_;
};

} // namespace fsmr
