#include <neuroseg/features.hpp>
#include <neuroseg/raster_ops.hpp>

#include <algorithm>

namespace neuroseg {

const std::array<const char*, kFeatureCount> kFeatureNames = {"h", "s", "v", "local_intensity"};

FeaturePlanes extract_pixel_features(const RasterImage& image, int window_radius) {
    if (image.channels != 3)
        throw DimensionError("extract_pixel_features: expected 3-channel image");
    if (window_radius < 0) throw InputError("extract_pixel_features: negative window radius");

    const int w = image.width, h = image.height, r = window_radius;
    FeaturePlanes planes;
    planes.width = w;
    planes.height = h;
    const std::size_t n = image.pixel_count();
    planes.h.resize(n);
    planes.s.resize(n);
    planes.v.resize(n);
    planes.local.resize(n);

    for (std::size_t i = 0; i < n; ++i)
        rgb_pixel_to_hsv(image.samples[3 * i], image.samples[3 * i + 1], image.samples[3 * i + 2],
                         planes.h[i], planes.s[i], planes.v[i]);

    // Summed-area table over the border-replicated R+G+B sum image.
    // Padding by r realizes replication exactly.
    const int pw = w + 2 * r, ph = h + 2 * r;
    std::vector<std::int64_t> sat(static_cast<std::size_t>(pw + 1) * (ph + 1), 0);
    for (int py = 0; py < ph; ++py) {
        const int sy = std::clamp(py - r, 0, h - 1);
        std::int64_t row = 0;
        for (int px = 0; px < pw; ++px) {
            const int sx = std::clamp(px - r, 0, w - 1);
            const std::size_t si = image.index(sx, sy);
            row += image.samples[si] + image.samples[si + 1] + image.samples[si + 2];
            sat[static_cast<std::size_t>(py + 1) * (pw + 1) + px + 1] =
                sat[static_cast<std::size_t>(py) * (pw + 1) + px + 1] + row;
        }
    }

    const std::int64_t den = 3LL * (2 * r + 1) * (2 * r + 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            // Window [x, x+2r] x [y, y+2r] in padded coordinates.
            const std::size_t x0 = x, y0 = y, x1 = x + 2 * r + 1, y1 = y + 2 * r + 1;
            const std::int64_t sum = sat[y1 * (pw + 1) + x1] - sat[y0 * (pw + 1) + x1] -
                                     sat[y1 * (pw + 1) + x0] + sat[y0 * (pw + 1) + x0];
            planes.local[planes.index(x, y)] =
                static_cast<std::uint8_t>((2 * sum + den) / (2 * den));
        }
    }
    return planes;
}

} // namespace neuroseg
