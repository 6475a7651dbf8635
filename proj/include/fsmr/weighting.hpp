#pragma once

#include <cmath>

#include "fsmr/error.hpp"

namespace fsmr {

/// Spatial decay (rho), key-point attenuation (alpha) and spectral decay (sigma).
struct WeightingConfig {
    double rho = 0.8;
    double alpha = 0.5;
    double sigma = 0.9;
    bool spectral_enabled = true;

    void validate() const {
        if (!(rho > 0.0 && rho < 1.0)) {
            throw InvalidArgument("rho must lie in ]0, 1[");
        }
        if (!(sigma > 0.0 && sigma < 1.0)) {
            throw InvalidArgument("sigma must lie in ]0, 1[");
        }
        if (!(alpha >= 0.0 && alpha <= 1.0)) {
            throw InvalidArgument("alpha must lie in [0, 1]");
        }
    }
};

struct StoppingConfig {
    int max_iterations = 1000;
    /// Absolute floor on the selected energy reduction; 0 leaves stopping to max_iterations.
    double min_energy_reduction = 0.0;

    void validate() const {
        if (max_iterations < 1) {
            throw InvalidArgument("max_iterations must be at least 1");
        }
        if (!(min_energy_reduction >= 0.0)) {
            throw InvalidArgument("min_energy_reduction must be non-negative");
        }
    }
};

/// Isotropic window rho^r, r = distance from the centre of a width x height area.
inline double spatial_weight(double x, double y, int width, int height, double rho) {
    const double dx = x - 0.5 * (width - 1);
    const double dy = y - 0.5 * (height - 1);
    return std::pow(rho, std::sqrt(dx * dx + dy * dy));
}

/// Key points are estimates, so they get alpha times the mesh weight.
inline double spatial_weight_fsmr(double x, double y, int width, int height, double rho, double alpha,
                                  bool is_key_point) {
    const double w = spatial_weight(x, y, width, height, rho);
    return is_key_point ? alpha * w : w;
}

/// sigma^sqrt(k^2 + l^2): favours low frequencies during basis selection.
inline double spectral_weight(int k, int l, double sigma) {
    return std::pow(sigma, std::sqrt(static_cast<double>(k) * k + static_cast<double>(l) * l));
}

} // namespace fsmr
