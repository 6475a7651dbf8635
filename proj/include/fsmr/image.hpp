#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fsmr/error.hpp"
#include "fsmr/geometry.hpp"

namespace fsmr {

/// Grayscale raster with a real-valued working buffer. Pixel (m, n) is column m, row n
/// and sits at integer coordinates (m, n).
class Image {
public:
    Image() = default;

    Image(int width, int height, double fill = 0.0) : width_(width), height_(height) {
        if (width <= 0 || height <= 0) {
            throw InvalidArgument("image dimensions must be positive");
        }
        pixels_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    bool empty() const { return pixels_.empty(); }

    double& at(int m, int n) { return pixels_[index(m, n)]; }
    double at(int m, int n) const { return pixels_[index(m, n)]; }

    std::span<double> pixels() { return pixels_; }
    std::span<const double> pixels() const { return pixels_; }

    /// Values as they would be exported: clamped to [0, 255], rounded half away from zero.
    std::vector<std::uint8_t> to_bytes() const {
        std::vector<std::uint8_t> out(pixels_.size());
        std::transform(pixels_.begin(), pixels_.end(), out.begin(), [](double v) {
            return static_cast<std::uint8_t>(std::round(std::clamp(v, 0.0, 255.0)));
        });
        return out;
    }

    /// Round-trips through the 8-bit export representation.
    Image quantized() const {
        Image q = *this;
        const auto bytes = to_bytes();
        std::copy(bytes.begin(), bytes.end(), q.pixels_.begin());
        return q;
    }

    static Image from_bytes(int width, int height, std::span<const std::uint8_t> bytes) {
        Image img(width, height);
        if (bytes.size() != img.pixels_.size()) {
            throw InvalidArgument("byte buffer size does not match image dimensions");
        }
        std::copy(bytes.begin(), bytes.end(), img.pixels_.begin());
        return img;
    }

    friend bool operator==(const Image&, const Image&) = default;

private:
    std::size_t index(int m, int n) const {
        return static_cast<std::size_t>(n) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(m);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> pixels_;
};

struct MeshSample {
    Point2 position;
    double value = 0.0;
};

/// Scattered samples destined for a `width` x `height` grid.
struct MeshSampleSet {
    std::vector<MeshSample> samples;
    int width = 0;
    int height = 0;
};

/// Every pixel of `image` as a sample at its own integer position.
inline MeshSampleSet grid_samples(const Image& image) {
    MeshSampleSet mesh{{}, image.width(), image.height()};
    mesh.samples.reserve(image.pixels().size());
    for (int n = 0; n < image.height(); ++n) {
        for (int m = 0; m < image.width(); ++m) {
            mesh.samples.push_back({{static_cast<double>(m), static_cast<double>(n)}, image.at(m, n)});
        }
    }
    return mesh;
}

} // namespace fsmr
