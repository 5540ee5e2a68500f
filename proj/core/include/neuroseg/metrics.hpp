#pragma once

#include <neuroseg/labelsynth.hpp>
#include <neuroseg/raster.hpp>

#include <string>

namespace neuroseg {

struct EvalCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;

    bool operator==(const EvalCounts&) const = default;
};

struct Scores {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvalReport {
    Scores det;        // centroid-containment detection
    Scores seg;        // IoU > 0.5 instance segmentation
    double dice = 0.0; // semantic overlap
    double rce = 0.0;  // relative count error
    std::size_t n_detected = 0; // N_a
    std::size_t n_expert = 0;   // N_e

    std::string to_json() const;
    /// Aligned table with det-F1 / seg-F1 / Dice / RCE columns.
    std::string to_table(const std::string& name = "baseline") const;
};

/// Detection matching: a predicted instance is a TP when it contains exactly
/// one expert centroid (the pixel at the centroid coordinate). Instances
/// containing zero or two-plus centroids are FP; centroids not inside any TP
/// instance are FN.
EvalCounts match_detections(const InstanceLabelMap& pred, const PointAnnotationSet& centroids);

/// Instance matching: pairs with IoU strictly greater than `iou_thresh` are
/// TPs. At 0.5 the matching is automatically one-to-one.
EvalCounts match_instances_iou(const InstanceLabelMap& pred, const InstanceLabelMap& gt,
                               double iou_thresh = 0.5);

/// P = TP/(TP+FP), R = TP/(TP+FN), F = harmonic mean.
/// Degenerate conventions: with no TP, a zero denominator scores 1 only if
/// the opposing error count is also zero (so TP=FP=FN=0 gives all 1).
Scores precision_recall_f1(const EvalCounts& counts);

/// 2|A∩B| / (|A|+|B|); both empty -> 1.
double dice(const SemanticMask& pred, const SemanticMask& gt);

/// |N_a - N_e| / N_e. Throws InputError when n_expert = 0.
double rce(std::size_t n_detected, std::size_t n_expert);

/// Full report for one image: detection vs centroids, segmentation vs GT
/// instances, Dice on foreground masks, RCE on counts.
EvalReport evaluate(const InstanceLabelMap& pred, const InstanceLabelMap& gt,
                    const PointAnnotationSet& centroids, double iou_thresh = 0.5);

} // namespace neuroseg
