#pragma once

#include <neuroseg/errors.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace neuroseg {

/// 8-bit raster, row-major, interleaved channels (1 = gray, 3 = RGB).
struct RasterImage {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> samples; // width*height*channels

    RasterImage() = default;
    RasterImage(int w, int h, int c, std::uint8_t fill = 0)
        : width(w), height(h), channels(c),
          samples(static_cast<std::size_t>(w) * h * c, fill) {
        if (w < 1 || h < 1 || (c != 1 && c != 3))
            throw DimensionError("RasterImage: invalid dimensions " + std::to_string(w) + "x" +
                                 std::to_string(h) + "x" + std::to_string(c));
    }

    std::size_t index(int x, int y, int c = 0) const {
        return (static_cast<std::size_t>(y) * width + x) * channels + c;
    }
    std::uint8_t at(int x, int y, int c = 0) const { return samples[index(x, y, c)]; }
    std::uint8_t& at(int x, int y, int c = 0) { return samples[index(x, y, c)]; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

/// Per-pixel real values, row-major. Classifier outputs live in [0,1].
struct ProbabilityMap {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    ProbabilityMap() = default;
    ProbabilityMap(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    double at(int x, int y) const { return values[index(x, y)]; }
    double& at(int x, int y) { return values[index(x, y)]; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

/// Per-pixel boolean foreground mask (stored as 0/1 bytes).
struct SemanticMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    SemanticMask() = default;
    SemanticMask(int w, int h, bool fill = false)
        : width(w), height(h), bits(static_cast<std::size_t>(w) * h, fill ? 1 : 0) {}

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    bool at(int x, int y) const { return bits[index(x, y)] != 0; }
    void set(int x, int y, bool v) { bits[index(x, y)] = v ? 1 : 0; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    std::size_t foreground_count() const {
        std::size_t n = 0;
        for (auto b : bits) n += b != 0;
        return n;
    }
};

/// Per-pixel instance identifiers; 0 = background. Ids need not be contiguous.
struct InstanceLabelMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint32_t> labels;

    InstanceLabelMap() = default;
    InstanceLabelMap(int w, int h, std::uint32_t fill = 0)
        : width(w), height(h), labels(static_cast<std::size_t>(w) * h, fill) {}

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    std::uint32_t at(int x, int y) const { return labels[index(x, y)]; }
    std::uint32_t& at(int x, int y) { return labels[index(x, y)]; }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }

    /// Distinct nonzero ids, ascending.
    std::vector<std::uint32_t> ids() const;

    /// Foreground mask (label != 0).
    SemanticMask foreground() const {
        SemanticMask m(width, height);
        for (std::size_t i = 0; i < labels.size(); ++i) m.bits[i] = labels[i] != 0;
        return m;
    }
};

enum class PixelClass : std::uint8_t { Background = 0, Interior = 1, Contour = 2 };

/// Per-pixel three-way class map: background / cell interior / inter-cell contour.
struct ThreeClassMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> classes; // values 0,1,2

    ThreeClassMask() = default;
    ThreeClassMask(int w, int h)
        : width(w), height(h), classes(static_cast<std::size_t>(w) * h, 0) {}

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    PixelClass at(int x, int y) const { return static_cast<PixelClass>(classes[index(x, y)]); }
    void set(int x, int y, PixelClass c) { classes[index(x, y)] = static_cast<std::uint8_t>(c); }
    std::size_t pixel_count() const { return static_cast<std::size_t>(width) * height; }
};

inline bool same_dims(int w1, int h1, int w2, int h2) { return w1 == w2 && h1 == h2; }

template <class A, class B>
void require_same_dims(const A& a, const B& b, const char* what) {
    if (a.width != b.width || a.height != b.height)
        throw DimensionError(std::string(what) + ": dimension mismatch " +
                             std::to_string(a.width) + "x" + std::to_string(a.height) + " vs " +
                             std::to_string(b.width) + "x" + std::to_string(b.height));
}

} // namespace neuroseg
