#pragma once

#include <neuroseg/raster.hpp>

#include <array>
#include <cstdint>

namespace neuroseg {

/// One pixel's classifier inputs, all 8-bit.
struct PixelFeatures {
    std::uint8_t h = 0;
    std::uint8_t s = 0;
    std::uint8_t v = 0;
    std::uint8_t local_intensity = 0;

    std::uint8_t operator[](std::size_t i) const {
        return i == 0 ? h : i == 1 ? s : i == 2 ? v : local_intensity;
    }
};

constexpr std::size_t kFeatureCount = 4;
extern const std::array<const char*, kFeatureCount> kFeatureNames;

/// Per-pixel feature planes for a whole image (H, S, V, local intensity).
struct FeaturePlanes {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> h, s, v, local;

    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
    PixelFeatures at(int x, int y) const {
        const std::size_t i = index(x, y);
        return {h[i], s[i], v[i], local[i]};
    }
    std::size_t pixel_count() const { return static_cast<std::size_t>(w_times_h()); }

private:
    std::size_t w_times_h() const { return static_cast<std::size_t>(width) * height; }
};

/// H, S, V planes plus local intensity: the rounded mean over a
/// (2*window_radius+1)^2 border-replicated window of the gray value
/// (R+G+B)/3. The mean is computed as one exact rational
/// round(sum(R+G+B) / (3 * window_area)), so window_radius 0 reduces to the
/// per-pixel gray.
FeaturePlanes extract_pixel_features(const RasterImage& image, int window_radius);

} // namespace neuroseg
