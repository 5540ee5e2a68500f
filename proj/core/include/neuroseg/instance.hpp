#pragma once

#include <neuroseg/forest.hpp>
#include <neuroseg/labelsynth.hpp>
#include <neuroseg/raster.hpp>

#include <string>
#include <vector>

namespace neuroseg {

/// Per-pixel class probabilities for {background, interior, contour}.
/// `normalized` records whether the maps came from a normalized source (the
/// per-pixel sum is ~1) or are independent scores.
struct ClassProbMaps {
    ProbabilityMap background;
    ProbabilityMap interior;
    ProbabilityMap contour;
    bool normalized = true;

    int width() const { return interior.width; }
    int height() const { return interior.height; }
    void require_consistent() const;
};

struct BoundingBox {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0; // inclusive
    int width() const { return x1 - x0 + 1; }
    int height() const { return y1 - y0 + 1; }
};

struct CandidateRecord {
    std::uint32_t id = 0;
    std::size_t area = 0;
    BoundingBox bbox;
    double centroid_x = 0.0;
    double centroid_y = 0.0;
    /// Filled by the post-filter; negative until predicted.
    double predicted_iou = -1.0;
};

/// Instance candidates: a label map plus one record per id present in it.
struct CandidateSet {
    InstanceLabelMap instances;
    std::vector<CandidateRecord> records; // ascending by id, matching instances.ids()

    std::string to_json() const;
};

/// Build records from a label map, discarding instances smaller than
/// min_area (their pixels are zeroed).
CandidateSet make_candidate_set(InstanceLabelMap labels, std::size_t min_area = 0);

/// Pixelwise weighted arithmetic mean across model outputs, per class.
ClassProbMaps fuse_probability_maps(const std::vector<ClassProbMaps>& maps,
                                    const std::vector<double>& weights);

struct InstanceConfig {
    double interior_threshold = 0.5;
    std::size_t min_area = 20;
    Connectivity connectivity = Connectivity::Eight;
};

/// Markers = connected components of (interior >= t) & (contour < t),
/// filtered by min_area; each marker grows competitively (geodesic priority)
/// over the (interior + contour >= t) foreground.
CandidateSet instances_from_three_class(const ClassProbMaps& maps,
                                        const InstanceConfig& config = {});

/// Deterministic peak picking on a real-valued map: a pixel survives when no
/// strictly greater value exists within Chebyshev distance min_distance and
/// no equal value at a lexicographically smaller (y,x). Peaks below
/// min_value are dropped. Returned as a label map with ids 1..k in scan
/// order.
InstanceLabelMap find_seed_peaks(const ProbabilityMap& map, int min_distance, double min_value);

struct BaselineConfig {
    int feature_window_radius = 5;
    double rf_threshold = 0.5;
    int min_peak_distance = 7;
    double min_peak_value = 1.5;
    InstanceConfig instance;
};

/// Classical end-to-end segmenter: RF semantic mask -> markers at regional
/// maxima of the distance transform -> competitive region growing ->
/// candidates. Fully deterministic.
CandidateSet baseline_segment(const RasterImage& image, const ForestModel& rf,
                              const BaselineConfig& config = {});

/// Per-patch class probabilities from the classical baseline: the RF
/// foreground probability is routed into the interior/contour planes
/// according to the baseline's own three-class mask, and background takes
/// the rest, so the three planes sum to 1.
ClassProbMaps baseline_class_probs(const RasterImage& image, const ForestModel& rf,
                                   const BaselineConfig& config = {});

} // namespace neuroseg
