#pragma once

#include <neuroseg/raster.hpp>
#include <neuroseg/raster_ops.hpp>

#include <array>
#include <cstdint>
#include <vector>

namespace neuroseg {

/// Expert point annotations: one (x, y, id) per cell centroid.
struct PointAnnotation {
    int x = 0;
    int y = 0;
    std::uint32_t id = 0;
};

struct PointAnnotationSet {
    int width = 0;  // image bounds the points live in
    int height = 0;
    std::vector<PointAnnotation> points;

    /// Throws InputError on out-of-bounds points or duplicate ids.
    void validate() const;
};

/// Stamp each point as a filled disk (dx^2+dy^2 <= r^2) of its id. Later
/// points overwrite earlier ones where disks overlap; disks are clipped at
/// the image border.
InstanceLabelMap rasterize_point_labels(const PointAnnotationSet& points, int radius);

enum class GrowPriority {
    GeodesicDistance, // cost = steps from the seed region through foreground
    IntensityDelta    // cost = max |gray - seed mean gray| along the path
};

struct GrowConfig {
    Connectivity connectivity = Connectivity::Eight;
    int seed_disk_radius = 5;
    GrowPriority priority = GrowPriority::GeodesicDistance;
};

struct GrowResult {
    InstanceLabelMap labels;
    /// Seed ids that had no pixel on constraint foreground and were dropped.
    std::vector<std::uint32_t> dropped_seed_ids;
    /// True when no seed survived clipping; the label map is all zero.
    bool no_active_seeds = false;
};

/// Competitive region growing. Seeds are clipped to the constraint
/// foreground, then expand simultaneously over it; each foreground pixel
/// reachable from a seed is claimed exactly once at minimum cumulative cost.
/// Queue pops are ordered by (cost, seed id, y, x), which makes the result
/// deterministic and independent of seed insertion order. Background pixels
/// are never labeled; seed pixels keep their original id.
///
/// `intensity` is only read for the IntensityDelta priority; pass an empty
/// image for geodesic growth.
GrowResult competitive_region_growing(const InstanceLabelMap& seeds,
                                      const SemanticMask& constraint,
                                      const RasterImage& intensity, const GrowConfig& config);

/// Build the {background, interior, contour} training mask. The contour
/// class covers a band of `border_thickness` total pixels centered on every
/// interface between two different instances; borders against background are
/// not contour. Interior = labeled pixels outside the band.
ThreeClassMask synthesize_three_class_mask(const InstanceLabelMap& instances,
                                           int border_thickness = 4);

/// Recolor the 1-px inner boundary of every instance for visual QA.
RasterImage overlay_contours(const RasterImage& image, const InstanceLabelMap& instances,
                             std::array<std::uint8_t, 3> color = {255, 0, 0});

} // namespace neuroseg
