#pragma once

#include <neuroseg/features.hpp>
#include <neuroseg/raster.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace neuroseg {

/// Flattened decision-tree node. feature < 0 marks a leaf.
struct TreeNode {
    std::int16_t feature = -1;
    std::uint8_t threshold = 0; // x[feature] <= threshold goes left
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint64_t count_bg = 0; // training sample counts at leaves
    std::uint64_t count_fg = 0;

    bool is_leaf() const { return feature < 0; }
};

struct DecisionTree {
    std::vector<TreeNode> nodes; // root at index 0

    const TreeNode& leaf_for(const PixelFeatures& f) const;
    /// Majority vote; ties go to foreground.
    bool vote_foreground(const PixelFeatures& f) const;
};

struct RfParams {
    int n_trees = 100;
    int max_depth = 16;
    int min_leaf = 5;
    int features_per_split = 2; // ~sqrt(4)
    bool bootstrap = true;
    std::uint64_t seed = 0;

    bool operator==(const RfParams&) const = default;
};

/// Breiman-style random forest over the 4 pixel features.
struct ForestModel {
    RfParams params;
    std::vector<DecisionTree> trees;

    bool trained() const { return !trees.empty(); }

    /// Fraction of trees voting foreground; always a multiple of 1/n_trees.
    double predict_probability(const PixelFeatures& f) const;
};

/// Grow `params.n_trees` trees by recursive Gini splits on bootstrap
/// resamples, drawing `features_per_split` random features per node.
/// Split thresholds are floor midpoints between consecutive observed
/// feature values. Deterministic given (sample order, seed): each tree uses
/// an RNG substream derived from (seed, tree index), so the result does not
/// depend on thread scheduling.
///
/// Throws InputError unless both classes are present.
ForestModel train_random_forest(const std::vector<PixelFeatures>& samples,
                                const std::vector<std::uint8_t>& labels, const RfParams& params);

/// Per-pixel foreground probability and thresholded mask
/// (mask = probability >= threshold).
std::pair<SemanticMask, ProbabilityMap> predict_semantic(const ForestModel& model,
                                                         const FeaturePlanes& planes,
                                                         double threshold = 0.5);

/// Versioned JSON model document (schema: params + per-tree flattened node
/// arrays). Round-trips bit-identically.
std::string forest_to_json(const ForestModel& model);
ForestModel forest_from_json(const std::string& text);
void save_forest(const std::string& path, const ForestModel& model);
ForestModel load_forest(const std::string& path);

} // namespace neuroseg
