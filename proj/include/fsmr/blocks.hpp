#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "fsmr/error.hpp"
#include "fsmr/image.hpp"

namespace fsmr {

struct PixelOrigin {
    int x = 0;
    int y = 0;

    friend constexpr bool operator==(const PixelOrigin&, const PixelOrigin&) = default;
};

/// One output block together with its reconstruction area (the block dilated by the
/// support width, clipped to the grid) and the samples that fall inside that area.
/// Sample coordinates are relative to `area_origin`.
struct BlockContext {
    PixelOrigin block_origin;
    int block_width = 0;
    int block_height = 0;
    PixelOrigin area_origin;
    int area_width = 0;
    int area_height = 0;
    std::vector<MeshSample> local_mesh;
    std::vector<MeshSample> local_key_points;

    bool contains_area_point(Point2 global) const {
        return global.x >= area_origin.x && global.x < area_origin.x + area_width && global.y >= area_origin.y &&
               global.y < area_origin.y + area_height;
    }
};

/// Tiles a width x height grid into blocks in row-major order. Blocks on the right and
/// bottom edges shrink when the grid is not a multiple of the block size.
inline std::vector<BlockContext> partition_blocks(int width, int height, int block, int support) {
    if (width <= 0 || height <= 0) {
        throw InvalidArgument("grid dimensions must be positive");
    }
    if (block <= 0) {
        throw InvalidArgument("block size must be positive");
    }
    if (support < 0) {
        throw InvalidArgument("support width must be non-negative");
    }
    std::vector<BlockContext> blocks;
    const int bx = (width + block - 1) / block;
    const int by = (height + block - 1) / block;
    blocks.reserve(static_cast<std::size_t>(bx) * static_cast<std::size_t>(by));
    for (int j = 0; j < by; ++j) {
        for (int i = 0; i < bx; ++i) {
            BlockContext ctx;
            ctx.block_origin = {i * block, j * block};
            ctx.block_width = std::min(block, width - ctx.block_origin.x);
            ctx.block_height = std::min(block, height - ctx.block_origin.y);
            const int x0 = std::max(0, ctx.block_origin.x - support);
            const int y0 = std::max(0, ctx.block_origin.y - support);
            const int x1 = std::min(width, ctx.block_origin.x + ctx.block_width + support);
            const int y1 = std::min(height, ctx.block_origin.y + ctx.block_height + support);
            ctx.area_origin = {x0, y0};
            ctx.area_width = x1 - x0;
            ctx.area_height = y1 - y0;
            blocks.push_back(std::move(ctx));
        }
    }
    return blocks;
}

/// Attaches every sample with area_origin <= position < area_origin + area_dims,
/// rebased to the area. Samples keep their order in `mesh`.
inline BlockContext gather_local_samples(const MeshSampleSet& mesh, BlockContext ctx) {
    ctx.local_mesh.clear();
    for (const MeshSample& s : mesh.samples) {
        if (ctx.contains_area_point(s.position)) {
            ctx.local_mesh.push_back(
                {{s.position.x - ctx.area_origin.x, s.position.y - ctx.area_origin.y}, s.value});
        }
    }
    return ctx;
}

/// Bulk variant of gather_local_samples using a bucket grid; the per-area sample order is
/// bucket row-major, then mesh order within a bucket.
inline void gather_all_local_samples(const MeshSampleSet& mesh, std::vector<BlockContext>& blocks, int cell = 8) {
    if (mesh.width <= 0 || mesh.height <= 0) {
        throw InvalidArgument("mesh bounds must be positive");
    }
    const int cols = (mesh.width + cell - 1) / cell;
    const int rows = (mesh.height + cell - 1) / cell;
    std::vector<std::vector<std::size_t>> buckets(static_cast<std::size_t>(cols) * static_cast<std::size_t>(rows));
    for (std::size_t i = 0; i < mesh.samples.size(); ++i) {
        const Point2 p = mesh.samples[i].position;
        if (!(p.x >= 0.0 && p.x < mesh.width && p.y >= 0.0 && p.y < mesh.height)) {
            continue;
        }
        const int cx = std::min(cols - 1, static_cast<int>(p.x) / cell);
        const int cy = std::min(rows - 1, static_cast<int>(p.y) / cell);
        buckets[static_cast<std::size_t>(cy) * cols + cx].push_back(i);
    }
    for (BlockContext& ctx : blocks) {
        ctx.local_mesh.clear();
        const int cx0 = ctx.area_origin.x / cell;
        const int cy0 = ctx.area_origin.y / cell;
        const int cx1 = std::min(cols - 1, (ctx.area_origin.x + ctx.area_width - 1) / cell);
        const int cy1 = std::min(rows - 1, (ctx.area_origin.y + ctx.area_height - 1) / cell);
        for (int cy = cy0; cy <= cy1; ++cy) {
            for (int cx = cx0; cx <= cx1; ++cx) {
                for (std::size_t i : buckets[static_cast<std::size_t>(cy) * cols + cx]) {
                    const MeshSample& s = mesh.samples[i];
                    if (ctx.contains_area_point(s.position)) {
                        ctx.local_mesh.push_back(
                            {{s.position.x - ctx.area_origin.x, s.position.y - ctx.area_origin.y}, s.value});
                    }
                }
            }
        }
    }
}

/// Nearest-sample lookup over a whole mesh, used where an area has no samples at all.
class NearestSampleIndex {
public:
    explicit NearestSampleIndex(const MeshSampleSet& mesh, double cell = 8.0) : mesh_(&mesh), cell_(cell) {
        if (mesh.samples.empty()) {
            return;
        }
        min_ = max_ = mesh.samples.front().position;
        for (const auto& s : mesh.samples) {
            min_.x = std::min(min_.x, s.position.x);
            min_.y = std::min(min_.y, s.position.y);
            max_.x = std::max(max_.x, s.position.x);
            max_.y = std::max(max_.y, s.position.y);
        }
        cols_ = static_cast<int>((max_.x - min_.x) / cell_) + 1;
        rows_ = static_cast<int>((max_.y - min_.y) / cell_) + 1;
        buckets_.resize(static_cast<std::size_t>(cols_) * static_cast<std::size_t>(rows_));
        for (std::size_t i = 0; i < mesh.samples.size(); ++i) {
            const auto [cx, cy] = cell_of(mesh.samples[i].position);
            buckets_[static_cast<std::size_t>(cy) * cols_ + cx].push_back(i);
        }
    }

    bool empty() const { return buckets_.empty(); }

    /// Value of the closest sample; ties resolve to the lowest mesh index.
    double nearest_value(Point2 p) const {
        if (empty()) {
            throw EmptyArea();
        }
        const int px = std::clamp(static_cast<int>(std::floor((p.x - min_.x) / cell_)), 0, cols_ - 1);
        const int py = std::clamp(static_cast<int>(std::floor((p.y - min_.y) / cell_)), 0, rows_ - 1);
        double best = std::numeric_limits<double>::infinity();
        std::size_t best_index = 0;
        const int max_ring = std::max(cols_, rows_);
        for (int ring = 0; ring <= max_ring; ++ring) {
            for (int cy = py - ring; cy <= py + ring; ++cy) {
                if (cy < 0 || cy >= rows_) {
                    continue;
                }
                for (int cx = px - ring; cx <= px + ring; ++cx) {
                    if (cx < 0 || cx >= cols_) {
                        continue;
                    }
                    if (std::max(std::abs(cx - px), std::abs(cy - py)) != ring) {
                        continue;
                    }
                    for (std::size_t i : buckets_[static_cast<std::size_t>(cy) * cols_ + cx]) {
                        const Point2 q = mesh_->samples[i].position;
                        const double d = (q.x - p.x) * (q.x - p.x) + (q.y - p.y) * (q.y - p.y);
                        if (d < best || (d == best && i < best_index)) {
                            best = d;
                            best_index = i;
                        }
                    }
                }
            }
            // Cells beyond this ring are at least `ring * cell` away from p's cell.
            if (best < std::numeric_limits<double>::infinity()) {
                const double reach = ring * cell_;
                if (best <= reach * reach) {
                    break;
                }
            }
        }
        return mesh_->samples[best_index].value;
    }

private:
    std::pair<int, int> cell_of(Point2 p) const {
        return {std::min(cols_ - 1, static_cast<int>((p.x - min_.x) / cell_)),
                std::min(rows_ - 1, static_cast<int>((p.y - min_.y) / cell_))};
    }

    const MeshSampleSet* mesh_;
    double cell_;
    Point2 min_{};
    Point2 max_{};
    int cols_ = 0;
    int rows_ = 0;
    std::vector<std::vector<std::size_t>> buckets_;
};

} // namespace fsmr
