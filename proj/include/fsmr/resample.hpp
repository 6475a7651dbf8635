#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fsmr/blocks.hpp"
#include "fsmr/engine.hpp"
#include "fsmr/kernels.hpp"
#include "fsmr/parallel.hpp"
#include "fsmr/scattered.hpp"

namespace fsmr {

enum class Method { afsmr, fsmr, fsmr_no_keypoints, bilinear, bicubic, lanczos };

inline constexpr std::string_view method_name(Method m) {
    switch (m) {
    case Method::afsmr:
        return "afsmr";
    case Method::fsmr:
        return "fsmr";
    case Method::fsmr_no_keypoints:
        return "fsmr-no-keypoints";
    case Method::bilinear:
        return "bilinear";
    case Method::bicubic:
        return "bicubic";
    case Method::lanczos:
        return "lanczos";
    }
    return "?";
}

inline constexpr Method kAllMethods[] = {Method::afsmr,    Method::fsmr,    Method::fsmr_no_keypoints,
                                         Method::bilinear, Method::bicubic, Method::lanczos};

inline Method parse_method(std::string_view name) {
    for (Method m : kAllMethods) {
        if (method_name(m) == name) {
            return m;
        }
    }
    throw InvalidArgument("unknown method '" + std::string(name) + "'");
}

inline bool is_model_based(Method m) {
    return m == Method::afsmr || m == Method::fsmr || m == Method::fsmr_no_keypoints;
}

inline std::optional<Kernel> kernel_of(Method m) {
    switch (m) {
    case Method::bilinear:
        return Kernel::bilinear;
    case Method::bicubic:
        return Kernel::bicubic;
    case Method::lanczos:
        return Kernel::lanczos;
    default:
        return std::nullopt;
    }
}

/// Defaults: 8x8 blocks, 8 px support (24x24 areas), 1000 iterations, rho 0.8,
/// sigma 0.9, alpha 0.5.
struct ResamplerConfig {
    int block = 8;
    int support = 8;
    WeightingConfig weighting{};
    StoppingConfig stopping{};
    Method method = Method::afsmr;
    int threads = 1;

    void validate() const {
        if (block <= 0) {
            throw InvalidArgument("block size must be positive");
        }
        if (support < 0) {
            throw InvalidArgument("support width must be non-negative");
        }
        if (threads < 1) {
            throw InvalidArgument("thread count must be at least 1");
        }
        weighting.validate();
        stopping.validate();
    }
};

/// Estimated intensities at every integer position of one width x height area.
struct KeyPointSet {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    double at(int m, int n) const { return values[static_cast<std::size_t>(n) * width + m]; }
};

/// Interpolates the local mesh onto the area's integer grid with the scattered cubic rule;
/// fewer than three non-collinear samples fall back to the nearest sample per position.
inline KeyPointSet estimate_key_points(std::span<const MeshSample> local_mesh, int width, int height) {
    if (local_mesh.empty()) {
        throw EmptyArea();
    }
    KeyPointSet kp{width, height, std::vector<double>(static_cast<std::size_t>(width) * height)};
    const ScatteredCubicInterpolator interpolate(local_mesh);
    for (int n = 0; n < height; ++n) {
        for (int m = 0; m < width; ++m) {
            kp.values[static_cast<std::size_t>(n) * width + m] =
                interpolate({static_cast<double>(m), static_cast<double>(n)});
        }
    }
    return kp;
}

namespace detail {

struct ModelRecipe {
    bool key_points = false;
    bool spectral = false;
};

inline ModelRecipe recipe_for(Method m) {
    switch (m) {
    case Method::afsmr:
        return {false, true};
    case Method::fsmr:
        return {true, false};
    case Method::fsmr_no_keypoints:
        return {false, false};
    default:
        throw InvalidArgument("method '" + std::string(method_name(m)) + "' is not model based");
    }
}

inline WeightedSampleSet block_sample_set(const BlockContext& ctx, const ModelRecipe& recipe,
                                          const WeightingConfig& wcfg) {
    const int aw = ctx.area_width;
    const int ah = ctx.area_height;
    std::vector<Point2> positions;
    std::vector<double> values;
    std::vector<double> weights;
    const std::size_t total = ctx.local_mesh.size() + ctx.local_key_points.size();
    positions.reserve(total);
    values.reserve(total);
    weights.reserve(total);
    for (const MeshSample& s : ctx.local_mesh) {
        positions.push_back(s.position);
        values.push_back(s.value);
        weights.push_back(spatial_weight_fsmr(s.position.x, s.position.y, aw, ah, wcfg.rho, wcfg.alpha, false));
    }
    if (recipe.key_points) {
        for (const MeshSample& s : ctx.local_key_points) {
            const double w = spatial_weight_fsmr(s.position.x, s.position.y, aw, ah, wcfg.rho, wcfg.alpha, true);
            // Zero-weight samples cannot influence any coefficient (alpha == 0).
            if (w == 0.0) {
                continue;
            }
            positions.push_back(s.position);
            values.push_back(s.value);
            weights.push_back(w);
        }
    }
    return {BasisSpec(aw, ah), std::move(positions), std::move(values), std::move(weights)};
}

inline void attach_key_points(BlockContext& ctx) {
    const KeyPointSet kp = estimate_key_points(ctx.local_mesh, ctx.area_width, ctx.area_height);
    ctx.local_key_points.clear();
    ctx.local_key_points.reserve(kp.values.size());
    for (int n = 0; n < kp.height; ++n) {
        for (int m = 0; m < kp.width; ++m) {
            ctx.local_key_points.push_back({{static_cast<double>(m), static_cast<double>(n)}, kp.at(m, n)});
        }
    }
}

/// Reconstructs one block into `out`. Only the block's own pixels are written.
inline void reconstruct_block(BlockContext& ctx, const ModelRecipe& recipe, const ResamplerConfig& cfg,
                              const NearestSampleIndex& nearest, Image& out) {
    if (ctx.local_mesh.empty()) {
        for (int n = 0; n < ctx.block_height; ++n) {
            for (int m = 0; m < ctx.block_width; ++m) {
                const int gx = ctx.block_origin.x + m;
                const int gy = ctx.block_origin.y + n;
                out.at(gx, gy) = nearest.nearest_value({static_cast<double>(gx), static_cast<double>(gy)});
            }
        }
        return;
    }
    if (recipe.key_points) {
        attach_key_points(ctx);
    }
    WeightingConfig wcfg = cfg.weighting;
    wcfg.spectral_enabled = recipe.spectral;
    const WeightedSampleSet set = block_sample_set(ctx, recipe, wcfg);
    const SparseSpectrum spectrum = generate_model(set, wcfg, cfg.stopping);

    std::vector<Point2> grid;
    grid.reserve(static_cast<std::size_t>(ctx.block_width) * ctx.block_height);
    for (int n = 0; n < ctx.block_height; ++n) {
        for (int m = 0; m < ctx.block_width; ++m) {
            grid.push_back({static_cast<double>(ctx.block_origin.x - ctx.area_origin.x + m),
                            static_cast<double>(ctx.block_origin.y - ctx.area_origin.y + n)});
        }
    }
    const auto values = evaluate_model(spectrum, grid);
    std::size_t i = 0;
    for (int n = 0; n < ctx.block_height; ++n) {
        for (int m = 0; m < ctx.block_width; ++m) {
            out.at(ctx.block_origin.x + m, ctx.block_origin.y + n) = values[i++];
        }
    }
}

inline Image model_resample(const MeshSampleSet& mesh, int width, int height, const ResamplerConfig& cfg,
                            const ModelRecipe& recipe) {
    cfg.validate();
    if (mesh.width != width || mesh.height != height) {
        throw InvalidArgument("mesh bounds do not match the target grid");
    }
    if (mesh.samples.empty()) {
        throw EmptyArea();
    }
    auto blocks = partition_blocks(width, height, cfg.block, cfg.support);
    gather_all_local_samples(mesh, blocks, cfg.block);
    const NearestSampleIndex nearest(mesh);
    Image out(width, height);
    parallel_for(blocks.size(), cfg.threads,
                 [&](std::size_t b) { reconstruct_block(blocks[b], recipe, cfg, nearest, out); });
    return out;
}

} // namespace detail

/// Key-point agnostic reconstruction: each area's model is fitted to the mesh samples
/// alone with spatial weighting, and basis selection is spectrally weighted. Grid values
/// always come from the model, also where a mesh sample sits on a grid position.
inline Image afsmr_resample(const MeshSampleSet& mesh, int width, int height, const ResamplerConfig& cfg) {
    return detail::model_resample(mesh, width, height, cfg, detail::recipe_for(Method::afsmr));
}

/// Key-point based reconstruction: each area's samples are the mesh plus cubic-interpolated
/// key points on every integer position (weighted by alpha), without spectral weighting.
/// With cfg.method == fsmr_no_keypoints the key points are left out.
inline Image fsmr_resample(const MeshSampleSet& mesh, int width, int height, const ResamplerConfig& cfg) {
    const Method m = cfg.method == Method::fsmr_no_keypoints ? Method::fsmr_no_keypoints : Method::fsmr;
    return detail::model_resample(mesh, width, height, cfg, detail::recipe_for(m));
}

/// Dispatches a model-based method on cfg.method.
inline Image resample_mesh(const MeshSampleSet& mesh, int width, int height, const ResamplerConfig& cfg) {
    return detail::model_resample(mesh, width, height, cfg, detail::recipe_for(cfg.method));
}

} // namespace fsmr
