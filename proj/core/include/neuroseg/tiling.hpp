#pragma once

#include <neuroseg/raster.hpp>

#include <string>
#include <utility>
#include <vector>

namespace neuroseg {

struct TileOrigin {
    int x = 0;
    int y = 0;
    bool operator==(const TileOrigin&) const = default;
};

/// Sliding-window coverage of an image. Origins step by `stride`; the last
/// window on each axis is clamped so it ends exactly at the image edge.
struct TilingPlan {
    int image_width = 0;
    int image_height = 0;
    int window = 0;
    int stride = 0;
    std::vector<int> xs; // per-axis origins, ascending
    std::vector<int> ys;

    std::size_t tile_count() const { return xs.size() * ys.size(); }
    int overlap() const { return window - stride; }
    std::vector<TileOrigin> origins() const;

    std::string to_json() const;
};

/// Defaults follow the processing of 5000x5000 images: a 1340-px window with
/// stride 1220 gives 16 tiles overlapping by 120 px.
constexpr int kDefaultWindow = 1340;
constexpr int kDefaultStride = 1220;

/// Throws InputError if window > min(width, height) or stride outside
/// [1, window].
TilingPlan plan_tiling(int width, int height, int window = kDefaultWindow,
                       int stride = kDefaultStride);

/// Exact crop of the window at `origin`.
RasterImage extract_patch(const RasterImage& image, TileOrigin origin, int window);
ProbabilityMap extract_patch(const ProbabilityMap& map, TileOrigin origin, int window);

/// All patches of a plan, in row-major origin order.
std::vector<std::pair<TileOrigin, RasterImage>> extract_patches(const RasterImage& image,
                                                                const TilingPlan& plan);

/// Separable edge-ramp weights: along each axis the weight rises linearly
/// from min_weight at the border to 1 at `overlap` pixels in, then stays 1;
/// the 2-D weight is the product. All weights are strictly positive and the
/// map is symmetric under horizontal/vertical flips.
struct WeightMap {
    int window = 0;
    std::vector<double> weights; // window*window, row-major

    double at(int x, int y) const { return weights[static_cast<std::size_t>(y) * window + x]; }
};

WeightMap make_weight_map(int window, int overlap, double min_weight = 0.01);

/// Streaming weighted accumulator: output(p) = sum(w*v) / sum(w) over all
/// patches covering p. Accumulation is in double precision and commutative,
/// so the result does not depend on the order patches are added.
class Assembler {
public:
    Assembler(const TilingPlan& plan, const WeightMap& weight_map);

    void add(TileOrigin origin, const ProbabilityMap& patch);

    /// Throws InvariantError if any pixel is uncovered.
    ProbabilityMap finish() const;

private:
    TilingPlan plan_;
    WeightMap wmap_;
    std::vector<double> value_sum_;
    std::vector<double> weight_sum_;
};

/// One-shot convenience over Assembler.
ProbabilityMap assemble(const std::vector<std::pair<TileOrigin, ProbabilityMap>>& patches,
                        const TilingPlan& plan, const WeightMap& weight_map);

} // namespace neuroseg
