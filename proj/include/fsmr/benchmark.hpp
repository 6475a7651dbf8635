#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "fsmr/geometry.hpp"
#include "fsmr/image.hpp"
#include "fsmr/resample.hpp"

namespace fsmr {

/// Ordered linear maps whose product is the identity. Steps act about the image centre.
struct TransformSequence {
    std::string name;
    std::vector<AffineTransform> steps;
};

/// Product of all steps, last step outermost.
inline AffineTransform sequence_product(const TransformSequence& seq) {
    AffineTransform total = AffineTransform::identity();
    for (const AffineTransform& step : seq.steps) {
        total = compose(step, total);
    }
    return total;
}

namespace detail {

inline std::string format_angle(double degrees) {
    std::string s = std::to_string(degrees);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') {
        s.pop_back();
    }
    return s;
}

} // namespace detail

inline TransformSequence rotation_sequence(double degrees) {
    return {"rot" + detail::format_angle(degrees),
            {AffineTransform::rotation_degrees(degrees), AffineTransform::rotation_degrees(-degrees)}};
}

inline TransformSequence zoom15_sequence() {
    const AffineTransform zoom = AffineTransform::linear(1.15, 0.0, 0.0, 1.15);
    return {"zoom15", {zoom, invert_affine(zoom)}};
}

inline TransformSequence affine4_sequence() {
    const AffineTransform t1 = AffineTransform::linear(1.2, 0.1954, 0.0, 1.0);
    const AffineTransform t2 = AffineTransform::linear(1.0, 0.0, 0.1954, 1.2);
    return {"affine4", {invert_affine(t2), t1, invert_affine(t1), t2}};
}

/// Accepts "zoom15", "affine4", "identity" and "rot<degrees>" (e.g. "rot15", "rot12.5").
inline TransformSequence build_sequence(std::string_view name) {
    if (name == "zoom15") {
        return zoom15_sequence();
    }
    if (name == "affine4") {
        return affine4_sequence();
    }
    if (name == "identity") {
        return {"identity", {AffineTransform::identity()}};
    }
    if (name.starts_with("rot") && name.size() > 3) {
        const std::string digits(name.substr(3));
        char* end = nullptr;
        const double degrees = std::strtod(digits.c_str(), &end);
        if (end != nullptr && *end == '\0' && std::isfinite(degrees)) {
            return rotation_sequence(degrees);
        }
    }
    throw InvalidArgument("unknown sequence '" + std::string(name) + "'");
}

/// Rotations from 10 to 40 degrees in 2.5 degree steps.
inline std::vector<TransformSequence> rotation_sweep() {
    std::vector<TransformSequence> out;
    for (int i = 0; i <= 12; ++i) {
        out.push_back(rotation_sequence(10.0 + 2.5 * i));
    }
    return out;
}

/// Expands names, where "rotation-sweep" stands for the whole rotation sweep.
inline std::vector<TransformSequence> expand_sequences(const std::vector<std::string>& names) {
    std::vector<TransformSequence> out;
    for (const auto& n : names) {
        if (n == "rotation-sweep") {
            const auto sweep = rotation_sweep();
            out.insert(out.end(), sweep.begin(), sweep.end());
        } else {
            out.push_back(build_sequence(n));
        }
    }
    return out;
}

/// Moves every source pixel (m, n) to a(m, n) as a mesh sample for a width x height target
/// grid. Samples farther than `padding` outside the target are dropped.
inline MeshSampleSet forward_warp(const Image& image, const AffineTransform& a, int width, int height,
                                  double padding = 8.0) {
    MeshSampleSet mesh{{}, width, height};
    mesh.samples.reserve(image.pixels().size());
    for (int n = 0; n < image.height(); ++n) {
        for (int m = 0; m < image.width(); ++m) {
            const Point2 p = apply_affine(a, {static_cast<double>(m), static_cast<double>(n)});
            if (p.x >= -padding && p.x <= width - 1 + padding && p.y >= -padding && p.y <= height - 1 + padding) {
                mesh.samples.push_back({p, image.at(m, n)});
            }
        }
    }
    return mesh;
}

inline MeshSampleSet forward_warp(const Image& image, const AffineTransform& a) {
    return forward_warp(image, a, image.width(), image.height());
}

struct SequenceResult {
    Image output;
    double reconstruction_seconds = 0.0;
    std::size_t blocks = 0;

    double block_ms() const { return blocks == 0 ? 0.0 : 1e3 * reconstruction_seconds / static_cast<double>(blocks); }
};

/// Reconstructs `source` (in frame coordinates `source_origin`) onto a width x height grid
/// at `target_origin` after applying `step` (frame coordinates). Returns the reconstruction
/// and adds its wall-clock time to `result`.
inline Image warp_and_reconstruct(const Image& source, PixelOrigin source_origin, const AffineTransform& step,
                                  PixelOrigin target_origin, int width, int height, const ResamplerConfig& cfg,
                                  SequenceResult& result) {
    const AffineTransform effective =
        compose(AffineTransform::translate(-target_origin.x, -target_origin.y),
                compose(step, AffineTransform::translate(source_origin.x, source_origin.y)));
    using Clock = std::chrono::steady_clock;
    Image out;
    if (const auto kernel = kernel_of(cfg.method)) {
        const AffineTransform inverse = invert_affine(effective);
        const auto t0 = Clock::now();
        out = kernel_warp(source, inverse, *kernel, width, height);
        result.reconstruction_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
    } else {
        const MeshSampleSet mesh = forward_warp(source, effective, width, height, cfg.support);
        const auto t0 = Clock::now();
        out = resample_mesh(mesh, width, height, cfg);
        result.reconstruction_seconds += std::chrono::duration<double>(Clock::now() - t0).count();
    }
    const auto bx = static_cast<std::size_t>((width + cfg.block - 1) / cfg.block);
    const auto by = static_cast<std::size_t>((height + cfg.block - 1) / cfg.block);
    result.blocks += bx * by;
    return out;
}

/// Runs a mutually canceling sequence: each step warps the current image forward and
/// reconstructs it on a regular grid with cfg.method. Steps act about the centre of the
/// input frame. Intermediate grids are enlarged to the bounding box of the warped frame
/// so no content is lost; the last step reconstructs on the input frame itself. The
/// output is the 8-bit export of the final reconstruction. Only reconstruction calls
/// are timed.
inline SequenceResult run_sequence(const Image& image, const TransformSequence& seq, const ResamplerConfig& cfg) {
    cfg.validate();
    if (seq.steps.empty()) {
        throw InvalidArgument("transform sequence has no steps");
    }
    const Point2 center{0.5 * (image.width() - 1), 0.5 * (image.height() - 1)};
    std::vector<Point2> frame = {{0.0, 0.0},
                                 {image.width() - 1.0, 0.0},
                                 {0.0, image.height() - 1.0},
                                 {image.width() - 1.0, image.height() - 1.0}};
    SequenceResult result;
    Image current = image;
    PixelOrigin origin{0, 0};
    for (std::size_t s = 0; s < seq.steps.size(); ++s) {
        const AffineTransform step = about_point(seq.steps[s], center);
        PixelOrigin target{0, 0};
        int width = image.width();
        int height = image.height();
        for (Point2& p : frame) {
            p = apply_affine(step, p);
        }
        if (s + 1 < seq.steps.size()) {
            double x0 = std::numeric_limits<double>::infinity();
            double y0 = x0;
            double x1 = -x0;
            double y1 = -x0;
            for (const Point2& p : frame) {
                x0 = std::min(x0, p.x);
                y0 = std::min(y0, p.y);
                x1 = std::max(x1, p.x);
                y1 = std::max(y1, p.y);
            }
            target = {static_cast<int>(std::floor(x0)), static_cast<int>(std::floor(y0))};
            width = static_cast<int>(std::ceil(x1)) - target.x + 1;
            height = static_cast<int>(std::ceil(y1)) - target.y + 1;
        }
        current = warp_and_reconstruct(current, origin, step, target, width, height, cfg, result);
        origin = target;
    }
    result.output = current.quantized();
    return result;
}

} // namespace fsmr
