#pragma once

#include <neuroseg/instance.hpp>

#include <array>
#include <string>
#include <vector>

namespace neuroseg {

/// Shape/appearance descriptors of one candidate instance.
struct CandidateFeatureVector {
    double area = 0.0;          // px^2
    double perimeter = 0.0;     // boundary pixel count (4-connected exterior)
    double circularity = 0.0;   // 4*pi*A/P^2, clamped to (0, 1.2]
    double mean_interior = 0.0; // mean interior probability over the candidate
    double mean_contour = 0.0;  // mean contour probability over the candidate
    double contact_ratio = 0.0; // boundary fraction touching another candidate
    double bbox_fill = 0.0;     // area / bbox area

    static constexpr std::size_t size() { return 7; }
    double operator[](std::size_t i) const {
        const std::array<double, 7> v{area,         perimeter,     circularity, mean_interior,
                                      mean_contour, contact_ratio, bbox_fill};
        return v[i];
    }
};

extern const std::array<const char*, 7> kCandidateFeatureNames;

/// One vector per record in `cands`, in record order.
std::vector<CandidateFeatureVector> extract_candidate_features(const CandidateSet& cands,
                                                               const ClassProbMaps& maps);

struct GbtParams {
    int n_rounds = 100;
    int max_depth = 3;
    double shrinkage = 0.1;
    int min_leaf = 1;
    std::uint64_t seed = 0; // recorded for provenance; training is deterministic

    bool operator==(const GbtParams&) const = default;
};

/// One node of a regression tree, flattened.
struct GbtNode {
    std::int16_t feature = -1; // < 0 marks a leaf
    double threshold = 0.0;    // x[feature] <= threshold goes left
    std::int32_t left = -1;
    std::int32_t right = -1;
    double value = 0.0; // leaf output
};

struct GbtTree {
    std::vector<GbtNode> nodes;
    double predict(const CandidateFeatureVector& f) const;
};

/// Least-squares gradient-boosted trees predicting per-candidate IoU.
struct GbtModel {
    GbtParams params;
    double base_prediction = 0.0;
    std::vector<GbtTree> trees;
    /// Training MSE after the base prediction and after each round
    /// (n_rounds+1 entries); non-increasing by construction.
    std::vector<double> training_mse;

    bool trained() const { return !trees.empty(); }

    /// Clamped to [0,1].
    double predict(const CandidateFeatureVector& f) const;
};

/// base = mean target; each round fits a depth-limited regression tree to the
/// residuals and adds it scaled by `shrinkage`. Throws InputError for fewer
/// than 2 samples or targets outside [0,1].
GbtModel train_iou_regressor(const std::vector<CandidateFeatureVector>& features,
                             const std::vector<double>& targets, const GbtParams& params);

struct FilterResult {
    CandidateSet candidates;
    std::vector<CandidateFeatureVector> features; // survivors, matching records
};

/// Keep exactly the candidates with predicted IoU >= threshold; removed ids
/// are zeroed out of the label map. Features are carried through unchanged,
/// which makes the filter idempotent. Survivor records carry their
/// predicted IoU.
FilterResult filter_candidates(const CandidateSet& cands,
                               const std::vector<CandidateFeatureVector>& features,
                               const GbtModel& model, double threshold = 0.3);

/// True-IoU training targets: per candidate, the IoU with the ground-truth
/// instance maximizing overlap; 0 when no GT instance overlaps.
std::vector<double> best_overlap_iou(const CandidateSet& cands, const InstanceLabelMap& gt);

std::string gbt_to_json(const GbtModel& model);
GbtModel gbt_from_json(const std::string& text);
void save_gbt(const std::string& path, const GbtModel& model);
GbtModel load_gbt(const std::string& path);

} // namespace neuroseg
