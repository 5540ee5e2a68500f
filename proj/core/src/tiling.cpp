#include <neuroseg/tiling.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>

namespace neuroseg {

std::vector<TileOrigin> TilingPlan::origins() const {
    std::vector<TileOrigin> out;
    out.reserve(tile_count());
    for (int y : ys)
        for (int x : xs) out.push_back({x, y});
    return out;
}

std::string TilingPlan::to_json() const {
    nlohmann::json doc;
    doc["image_width"] = image_width;
    doc["image_height"] = image_height;
    doc["window"] = window;
    doc["stride"] = stride;
    doc["overlap"] = overlap();
    doc["tile_count"] = tile_count();
    doc["edge_policy"] = "clamp_last";
    doc["origins_x"] = xs;
    doc["origins_y"] = ys;
    nlohmann::json positions = nlohmann::json::array();
    for (const auto o : origins()) positions.push_back({{"x", o.x}, {"y", o.y}});
    doc["origins"] = std::move(positions);
    return doc.dump(2);
}

namespace {

std::vector<int> axis_origins(int dim, int window, int stride) {
    std::vector<int> out;
    for (int o = 0; o + window <= dim; o += stride) out.push_back(o);
    const int last = dim - window;
    if (out.empty() || out.back() != last) out.push_back(last);
    return out;
}

} // namespace

TilingPlan plan_tiling(int width, int height, int window, int stride) {
    if (width < 1 || height < 1) throw InputError("plan_tiling: empty image");
    if (window < 1 || window > std::min(width, height))
        throw InputError("plan_tiling: window " + std::to_string(window) +
                         " exceeds image " + std::to_string(width) + "x" +
                         std::to_string(height));
    if (stride < 1 || stride > window)
        throw InputError("plan_tiling: stride must be in [1, window]");

    TilingPlan plan;
    plan.image_width = width;
    plan.image_height = height;
    plan.window = window;
    plan.stride = stride;
    plan.xs = axis_origins(width, window, stride);
    plan.ys = axis_origins(height, window, stride);
    return plan;
}

RasterImage extract_patch(const RasterImage& image, TileOrigin origin, int window) {
    RasterImage patch(window, window, image.channels);
    const std::size_t row_bytes = static_cast<std::size_t>(window) * image.channels;
    for (int y = 0; y < window; ++y)
        std::copy_n(image.samples.data() + image.index(origin.x, origin.y + y), row_bytes,
                    patch.samples.data() + patch.index(0, y));
    return patch;
}

ProbabilityMap extract_patch(const ProbabilityMap& map, TileOrigin origin, int window) {
    ProbabilityMap patch(window, window);
    for (int y = 0; y < window; ++y)
        std::copy_n(map.values.data() + map.index(origin.x, origin.y + y),
                    static_cast<std::size_t>(window), patch.values.data() + patch.index(0, y));
    return patch;
}

std::vector<std::pair<TileOrigin, RasterImage>> extract_patches(const RasterImage& image,
                                                                const TilingPlan& plan) {
    if (image.width != plan.image_width || image.height != plan.image_height)
        throw DimensionError("extract_patches: plan does not match image");
    std::vector<std::pair<TileOrigin, RasterImage>> out;
    out.reserve(plan.tile_count());
    for (const auto o : plan.origins()) out.emplace_back(o, extract_patch(image, o, plan.window));
    return out;
}

WeightMap make_weight_map(int window, int overlap, double min_weight) {
    if (window < 1) throw InputError("make_weight_map: window must be >= 1");
    if (overlap < 0 || overlap >= window)
        throw InputError("make_weight_map: overlap must be in [0, window)");
    if (!(min_weight > 0.0) || min_weight > 1.0)
        throw InputError("make_weight_map: min_weight must be in (0, 1]");

    std::vector<double> axis(static_cast<std::size_t>(window), 1.0);
    if (overlap > 0) {
        for (int i = 0; i < window; ++i) {
            const int d = std::min(i, window - 1 - i);
            if (d < overlap)
                axis[static_cast<std::size_t>(i)] =
                    min_weight + (1.0 - min_weight) * static_cast<double>(d) / overlap;
        }
    }

    WeightMap map;
    map.window = window;
    map.weights.resize(static_cast<std::size_t>(window) * window);
    for (int y = 0; y < window; ++y)
        for (int x = 0; x < window; ++x)
            map.weights[static_cast<std::size_t>(y) * window + x] =
                axis[static_cast<std::size_t>(y)] * axis[static_cast<std::size_t>(x)];
    return map;
}

Assembler::Assembler(const TilingPlan& plan, const WeightMap& weight_map)
    : plan_(plan),
      wmap_(weight_map),
      value_sum_(static_cast<std::size_t>(plan.image_width) * plan.image_height, 0.0),
      weight_sum_(static_cast<std::size_t>(plan.image_width) * plan.image_height, 0.0) {
    if (weight_map.window != plan.window)
        throw DimensionError("Assembler: weight map window does not match plan");
}

void Assembler::add(TileOrigin origin, const ProbabilityMap& patch) {
    if (patch.width != plan_.window || patch.height != plan_.window)
        throw DimensionError("Assembler::add: patch dims must equal plan window");
    const int w = plan_.window;
    for (int y = 0; y < w; ++y) {
        const std::size_t out_row =
            static_cast<std::size_t>(origin.y + y) * plan_.image_width + origin.x;
        const std::size_t in_row = static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            const double wt = wmap_.weights[in_row + x];
            value_sum_[out_row + x] += wt * patch.values[in_row + x];
            weight_sum_[out_row + x] += wt;
        }
    }
}

ProbabilityMap Assembler::finish() const {
    ProbabilityMap out(plan_.image_width, plan_.image_height);
    for (std::size_t i = 0; i < out.values.size(); ++i) {
        if (weight_sum_[i] <= 0.0)
            throw InvariantError("Assembler::finish: uncovered pixel at index " +
                                 std::to_string(i));
        out.values[i] = value_sum_[i] / weight_sum_[i];
    }
    return out;
}

ProbabilityMap assemble(const std::vector<std::pair<TileOrigin, ProbabilityMap>>& patches,
                        const TilingPlan& plan, const WeightMap& weight_map) {
    // Single-tile plans pass the patch through untouched.
    if (plan.tile_count() == 1 && patches.size() == 1 &&
        patches.front().first == TileOrigin{0, 0} &&
        patches.front().second.width == plan.window &&
        patches.front().second.height == plan.window && plan.window == plan.image_width &&
        plan.window == plan.image_height)
        return patches.front().second;
    Assembler acc(plan, weight_map);
    for (const auto& [origin, patch] : patches) acc.add(origin, patch);
    return acc.finish();
}

} // namespace neuroseg
