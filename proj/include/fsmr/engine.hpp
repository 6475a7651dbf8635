#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "fsmr/basis.hpp"
#include "fsmr/error.hpp"
#include "fsmr/weighting.hpp"

namespace fsmr {

/// Basis functions whose weighted norm sum_i w_i phi_i^2 falls below this fraction of the
/// total weight are treated as vanishing on the sample set (all samples on nodal lines).
inline constexpr double kDegenerateNormRatio = 1e-12;

/// Samples of one reconstruction area with their weights and the precomputed basis.
struct WeightedSampleSet {
    BasisSpec spec;
    std::vector<Point2> positions;
    std::vector<double> values;
    std::vector<double> weights;
    SeparableBasis basis;
    double total_weight = 0.0;

    WeightedSampleSet() = default;

    WeightedSampleSet(const BasisSpec& area, std::vector<Point2> pos, std::vector<double> vals,
                      std::vector<double> w)
        : spec(area), positions(std::move(pos)), values(std::move(vals)), weights(std::move(w)) {
        if (positions.size() != values.size() || positions.size() != weights.size()) {
            throw InvalidArgument("positions, values and weights must have equal length");
        }
        for (double wi : weights) {
            if (!(wi >= 0.0) || !std::isfinite(wi)) {
                throw InvalidArgument("sample weights must be finite and non-negative");
            }
            total_weight += wi;
        }
        if (!positions.empty() && !(total_weight > 0.0)) {
            throw InvalidArgument("at least one sample weight must be positive");
        }
        basis = SeparableBasis(positions, spec);
    }

    std::size_t size() const { return positions.size(); }
    bool empty() const { return positions.empty(); }

    bool degenerate_norm(double norm) const { return !(norm > kDegenerateNormRatio * total_weight); }
};

/// Accumulated expansion coefficients over the full dictionary of one area.
struct SparseSpectrum {
    BasisSpec spec;
    std::vector<double> coefficients;
    int iterations_used = 0;
    double final_energy = 0.0;

    double at(Frequency f) const { return coefficients[spec.index(f)]; }
};

/// Per-iteration record of a model generation: the selected basis and the weighted
/// residual energy after applying it. energies[0] is the energy of the initial residual.
struct ModelTrace {
    std::vector<Frequency> selections;
    std::vector<double> coefficients;
    std::vector<double> energies;
};

inline double weighted_energy(std::span<const double> weights, std::span<const double> residual) {
    double e = 0.0;
    for (std::size_t i = 0; i < residual.size(); ++i) {
        e += weights[i] * residual[i] * residual[i];
    }
    return e;
}

/// Weighted least-squares amplitude sum_i r_i phi_i w_i / sum_i w_i phi_i^2 of one basis
/// against an unweighted residual. Empty when the basis vanishes on the sample set.
inline std::optional<double> estimate_coefficient(const WeightedSampleSet& set, std::span<const double> residual,
                                                  Frequency kl) {
    double numerator = 0.0;
    double denominator = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double phi = set.basis(i, kl);
        numerator += residual[i] * phi * set.weights[i];
        denominator += set.weights[i] * phi * phi;
    }
    if (set.degenerate_norm(denominator)) {
        return std::nullopt;
    }
    return numerator / denominator;
}

/// Decrease of the weighted residual energy when c_hat * phi_kl is added to the model.
inline double energy_reduction(const WeightedSampleSet& set, double c_hat, Frequency kl) {
    double norm = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double phi = set.basis(i, kl);
        norm += set.weights[i] * phi * phi;
    }
    return c_hat * c_hat * norm;
}

/// Flat dictionary indices ordered by k^2 + l^2, then k. Iterating in this order and
/// keeping only strictly better scores resolves ties towards low frequencies.
inline std::vector<std::size_t> selection_order(const BasisSpec& spec) {
    std::vector<std::size_t> order(spec.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Frequency fa = spec.frequency(a);
        const Frequency fb = spec.frequency(b);
        const int ra = fa.k * fa.k + fa.l * fa.l;
        const int rb = fb.k * fb.k + fb.l * fb.l;
        return ra != rb ? ra < rb : fa.k < fb.k;
    });
    return order;
}

inline std::vector<double> spectral_weights(const BasisSpec& spec, const WeightingConfig& cfg) {
    std::vector<double> wf(spec.size(), 1.0);
    if (cfg.spectral_enabled) {
        for (std::size_t i = 0; i < wf.size(); ++i) {
            const Frequency f = spec.frequency(i);
            wf[i] = spectral_weight(f.k, f.l, cfg.sigma);
        }
    }
    return wf;
}

namespace detail {

inline std::size_t select_index(std::span<const double> delta_e, std::span<const double> score_weight,
                                std::span<const std::size_t> order) {
    constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
    std::size_t best = kNone;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t idx : order) {
        const double de = delta_e[idx];
        if (!std::isfinite(de)) {
            continue;
        }
        const double score = de * score_weight[idx];
        if (best == kNone || score > best_score) {
            best = idx;
            best_score = score;
        }
    }
    if (best == kNone) {
        throw NoSelectableBasis();
    }
    return best;
}

} // namespace detail

/// Arg-max of delta_e (times the spectral weight when enabled). Non-finite entries mark
/// skipped frequencies. delta_e is indexed like BasisSpec::index.
inline Frequency select_basis(std::span<const double> delta_e, const BasisSpec& spec, const WeightingConfig& cfg) {
    if (delta_e.size() != spec.size()) {
        throw InvalidArgument("energy-reduction table does not match the dictionary size");
    }
    const auto order = selection_order(spec);
    const auto wf = spectral_weights(spec, cfg);
    return spec.frequency(detail::select_index(delta_e, wf, order));
}

namespace detail {

// Scratch buffers reused across blocks processed by the same thread.
struct EngineWorkspace {
    BasisSpec spec;
    std::vector<std::size_t> order;
    std::vector<double> gram;
    std::vector<char> has_column;
    std::vector<double> projection;
    std::vector<double> norms;
    std::vector<double> score_factor;

    void prepare(const BasisSpec& s) {
        if (s.width != spec.width || s.height != spec.height) {
            spec = s;
            order = selection_order(s);
            gram.assign(s.size() * s.size(), 0.0);
        }
        has_column.assign(s.size(), 0);
        projection.assign(s.size(), 0.0);
        norms.assign(s.size(), 0.0);
        score_factor.assign(s.size(), 0.0);
    }
};

inline EngineWorkspace& workspace() {
    thread_local EngineWorkspace ws;
    return ws;
}

} // namespace detail

/// Greedy model generation over the DCT dictionary.
///
/// Each iteration estimates, for every basis function, the weighted least-squares
/// coefficient against the current unweighted residual f - g and the resulting energy
/// reduction; selects one basis (spectrally weighted when enabled); adds its coefficient
/// to the spectrum. Re-selected bases accumulate. Stops after max_iterations, or when the
/// selected reduction is below min_energy_reduction or exactly zero.
///
/// The projections sum_i w_i r_i phi_kl(i) are updated incrementally through columns of
/// the weighted Gram matrix, each computed once per distinct selected basis.
inline SparseSpectrum generate_model(const WeightedSampleSet& set, const WeightingConfig& wcfg,
                                     const StoppingConfig& scfg, ModelTrace* trace = nullptr) {
    wcfg.validate();
    scfg.validate();
    if (set.empty()) {
        throw EmptyArea();
    }
    const BasisSpec& spec = set.spec;
    const std::size_t dict = spec.size();
    const auto samples = static_cast<Eigen::Index>(set.size());
    auto& ws = detail::workspace();
    ws.prepare(spec);
    const auto wf = spectral_weights(spec, wcfg);

    const Eigen::Map<const Eigen::VectorXd> weights(set.weights.data(), samples);
    const Eigen::Map<const Eigen::VectorXd> values(set.values.data(), samples);
    const Eigen::VectorXd weighted_values = weights.cwiseProduct(values);
    set.basis.accumulate_projection({weighted_values.data(), set.size()}, ws.projection);
    set.basis.accumulate_squared(set.weights, ws.norms);

    // Selection score p^2 * w_f / d; degenerate bases never score.
    bool any_selectable = false;
    for (std::size_t kl = 0; kl < dict; ++kl) {
        if (set.degenerate_norm(ws.norms[kl])) {
            ws.score_factor[kl] = std::numeric_limits<double>::quiet_NaN();
        } else {
            ws.score_factor[kl] = wf[kl] / ws.norms[kl];
            any_selectable = true;
        }
    }
    if (!any_selectable) {
        throw NoSelectableBasis();
    }

    SparseSpectrum spectrum{spec, std::vector<double>(dict, 0.0), 0, 0.0};
    Eigen::VectorXd residual;
    if (trace != nullptr) {
        *trace = {};
        residual = values;
        trace->energies.push_back(weighted_energy(set.weights, {residual.data(), set.size()}));
    }
    Eigen::VectorXd scaled(samples);

    for (int iteration = 0; iteration < scfg.max_iterations; ++iteration) {
        std::size_t chosen = dict;
        double best = -1.0;
        for (std::size_t kl : ws.order) {
            const double p = ws.projection[kl];
            const double score = p * p * ws.score_factor[kl];
            if (score > best) {
                best = score;
                chosen = kl;
            }
        }
        spectrum.iterations_used = iteration + 1;
        const double p_chosen = ws.projection[chosen];
        const double reduction = p_chosen * p_chosen / ws.norms[chosen];
        if (reduction < scfg.min_energy_reduction || reduction == 0.0) {
            break;
        }
        const double c_hat = p_chosen / ws.norms[chosen];
        spectrum.coefficients[chosen] += c_hat;

        const Frequency f = spec.frequency(chosen);
        double* column = ws.gram.data() + chosen * dict;
        if (ws.has_column[chosen] == 0) {
            scaled = weights.cwiseProduct(set.basis.column(f));
            std::fill(column, column + dict, 0.0);
            set.basis.accumulate_projection({scaled.data(), set.size()}, {column, dict});
            ws.has_column[chosen] = 1;
        }
        for (std::size_t kl = 0; kl < dict; ++kl) {
            ws.projection[kl] -= c_hat * column[kl];
        }
        if (trace != nullptr) {
            residual -= c_hat * set.basis.column(f);
            trace->selections.push_back(f);
            trace->coefficients.push_back(c_hat);
            trace->energies.push_back(weighted_energy(set.weights, {residual.data(), set.size()}));
        }
    }
    const Eigen::VectorXd final_residual = values - set.basis.synthesize(spectrum.coefficients);
    spectrum.final_energy = weighted_energy(set.weights, {final_residual.data(), set.size()});
    return spectrum;
}

/// sum_(k,l) c(k,l) phi_(k,l)(x, y) at each point; zero coefficients are skipped.
inline std::vector<double> evaluate_model(const SparseSpectrum& spectrum, std::span<const Point2> points) {
    const BasisSpec& spec = spectrum.spec;
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < spectrum.coefficients.size(); ++i) {
        if (spectrum.coefficients[i] != 0.0) {
            active.push_back(i);
        }
    }
    std::vector<double> out(points.size(), 0.0);
    std::vector<double> hx(spec.width);
    std::vector<double> vy(spec.height);
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (int k = 0; k < spec.width; ++k) {
            hx[k] = cosine_factor(k, points[p].x, spec.width);
        }
        for (int l = 0; l < spec.height; ++l) {
            vy[l] = cosine_factor(l, points[p].y, spec.height);
        }
        double sum = 0.0;
        for (std::size_t idx : active) {
            const Frequency f = spec.frequency(idx);
            sum += spectrum.coefficients[idx] * (hx[f.k] * vy[f.l]);
        }
        out[p] = sum;
    }
    return out;
}

} // namespace fsmr
