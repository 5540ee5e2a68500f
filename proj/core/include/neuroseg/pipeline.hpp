#pragma once

#include <neuroseg/instance.hpp>
#include <neuroseg/postfilter.hpp>
#include <neuroseg/tiling.hpp>

#include <cstddef>
#include <optional>

namespace neuroseg {

struct SegmentConfig {
    int window = kDefaultWindow;
    int stride = kDefaultStride;
    double min_weight = 0.01;
    BaselineConfig baseline;
    double filter_threshold = 0.3;
    /// Refuses to run when the estimated working set exceeds this budget.
    std::size_t memory_budget_mb = 8192;
    /// Tile workers; 0 = process tiles sequentially.
    int workers = 0;
};

struct SegmentOutput {
    CandidateSet candidates;
    std::vector<CandidateFeatureVector> features; // matching candidates.records
    ClassProbMaps assembled;
    std::size_t tile_count = 0;
    bool filtered = false;
};

/// Full segmentation pipeline: tiling plan -> per-patch baseline class
/// probabilities -> weighted assembly -> instances -> optional IoU filter.
/// With a single-tile plan the patch maps are used directly, so a window
/// equal to the image size is bit-identical to the untiled path.
/// Deterministic for fixed inputs regardless of `workers`.
SegmentOutput run_segmentation(const RasterImage& image, const ForestModel& rf,
                               const GbtModel* filter, const SegmentConfig& config);

/// Untiled equivalent (same composition minus tiling).
SegmentOutput segment_untiled(const RasterImage& image, const ForestModel& rf,
                              const GbtModel* filter, const SegmentConfig& config);

struct LabelSynthesisConfig {
    int feature_window_radius = 5;
    double rf_threshold = 0.5;
    GrowConfig grow;
    int border_thickness = 4;
};

struct LabelSynthesisOutput {
    SemanticMask semantic;
    InstanceLabelMap instances;
    ThreeClassMask mask;
    RasterImage overlay;
    std::vector<std::uint32_t> dropped_seed_ids;
    bool no_active_seeds = false;
};

/// Point-annotation label synthesis: RF semantic segmentation, seed-disk
/// rasterization, competitive region growing, three-class mask, QA overlay.
LabelSynthesisOutput run_label_synthesis(const RasterImage& image,
                                         const PointAnnotationSet& centroids,
                                         const ForestModel& rf,
                                         const LabelSynthesisConfig& config);

} // namespace neuroseg
