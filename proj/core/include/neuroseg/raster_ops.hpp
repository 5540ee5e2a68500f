#pragma once

#include <neuroseg/raster.hpp>

#include <cstdint>
#include <vector>

namespace neuroseg {

/// RGB -> HSV with all three planes quantized to 8 bits.
///
/// Conventions (fixed; the oracle tests depend on them):
///   V = max(R,G,B)
///   S = round(255 * (V - min) / V), 0 when V = 0
///   H = round(255 * h_deg / 360) with h_deg in [0,360) from the standard
///       piecewise hexagonal formula.
/// Rounding is exact rational round-half-up, so results are bit-stable.
/// Output is a 3-channel image with H,S,V planes interleaved.
RasterImage rgb_to_hsv(const RasterImage& image);

/// Per-pixel HSV of a single RGB triple (same quantization as rgb_to_hsv).
void rgb_pixel_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b,
                      std::uint8_t& h, std::uint8_t& s, std::uint8_t& v);

/// Gray plane: round((R+G+B)/3), exact rational rounding. 1-channel input
/// passes through unchanged.
RasterImage rgb_to_gray(const RasterImage& image);

enum class Connectivity : int { Four = 4, Eight = 8 };

/// Label connected foreground components. Labels start at 1 and are assigned
/// in row-major order of each component's first pixel.
InstanceLabelMap connected_components(const SemanticMask& mask, Connectivity conn);

/// Number of distinct nonzero labels in a map.
std::size_t component_count(const InstanceLabelMap& map);

/// Morphological dilation with a Euclidean disk of the given radius
/// (offsets dx*dx + dy*dy <= radius*radius). Pixels outside the image are
/// background. dilate(m, 0) == m.
SemanticMask dilate(const SemanticMask& mask, int radius);

/// Erosion, dual of dilate under the same disk and border policy.
SemanticMask erode(const SemanticMask& mask, int radius);

/// Exact squared Euclidean distance to the nearest background pixel.
/// Background pixels map to 0. Everything outside the image border counts
/// as background, so an all-foreground image still has finite distances:
/// a single foreground pixel gets 1, the center of an all-foreground 5x5
/// gets 9 (= 3^2, three steps to the nearest outside pixel).
std::vector<std::int64_t> squared_distance_transform(const SemanticMask& mask);

/// sqrt of squared_distance_transform, as a real-valued map.
ProbabilityMap distance_transform(const SemanticMask& mask);

} // namespace neuroseg
