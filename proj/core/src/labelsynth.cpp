#include <neuroseg/labelsynth.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <tuple>
#include <unordered_map>

namespace neuroseg {

void PointAnnotationSet::validate() const {
    std::set<std::uint32_t> seen;
    for (const auto& p : points) {
        if (p.x < 0 || p.y < 0 || p.x >= width || p.y >= height)
            throw InputError("point annotation (" + std::to_string(p.x) + "," +
                             std::to_string(p.y) + ") outside image bounds");
        if (p.id == 0) throw InputError("point annotation id must be positive");
        if (!seen.insert(p.id).second)
            throw InputError("duplicate point annotation id " + std::to_string(p.id));
    }
}

InstanceLabelMap rasterize_point_labels(const PointAnnotationSet& points, int radius) {
    if (radius < 0) throw InputError("rasterize_point_labels: negative radius");
    points.validate();
    InstanceLabelMap map(points.width, points.height);
    const int r2 = radius * radius;
    for (const auto& p : points.points) {
        for (int dy = -radius; dy <= radius; ++dy) {
            const int y = p.y + dy;
            if (y < 0 || y >= map.height) continue;
            for (int dx = -radius; dx <= radius; ++dx) {
                if (dx * dx + dy * dy > r2) continue;
                const int x = p.x + dx;
                if (x < 0 || x >= map.width) continue;
                map.at(x, y) = p.id;
            }
        }
    }
    return map;
}

namespace {

struct QueueEntry {
    double cost;
    std::uint32_t id;
    int y;
    int x;

    bool operator>(const QueueEntry& o) const {
        return std::tie(cost, id, y, x) > std::tie(o.cost, o.id, o.y, o.x);
    }
};

constexpr int kDx8[8] = {1, -1, 0, 0, 1, 1, -1, -1};
constexpr int kDy8[8] = {0, 0, 1, -1, 1, -1, 1, -1};

} // namespace

GrowResult competitive_region_growing(const InstanceLabelMap& seeds,
                                      const SemanticMask& constraint,
                                      const RasterImage& intensity, const GrowConfig& config) {
    require_same_dims(seeds, constraint, "competitive_region_growing");
    const bool use_intensity = config.priority == GrowPriority::IntensityDelta;
    if (use_intensity) {
        require_same_dims(seeds, intensity, "competitive_region_growing");
        if (intensity.channels != 1)
            throw DimensionError("competitive_region_growing: intensity plane must be 1-channel");
    }

    const int w = seeds.width, h = seeds.height;
    GrowResult result;
    result.labels = InstanceLabelMap(w, h);

    // Clip seeds to foreground; track which ids survive.
    std::set<std::uint32_t> all_ids, active_ids;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::uint32_t id = seeds.at(x, y);
            if (id == 0) continue;
            all_ids.insert(id);
            if (constraint.at(x, y)) {
                result.labels.at(x, y) = id;
                active_ids.insert(id);
            }
        }
    }
    for (auto id : all_ids)
        if (!active_ids.count(id)) result.dropped_seed_ids.push_back(id);
    if (active_ids.empty()) {
        result.no_active_seeds = true;
        return result;
    }

    // Mean gray of each clipped seed region, for the IntensityDelta cost.
    std::unordered_map<std::uint32_t, double> seed_mean;
    if (use_intensity) {
        std::unordered_map<std::uint32_t, std::pair<double, std::size_t>> acc;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x)
                if (const auto id = result.labels.at(x, y)) {
                    auto& a = acc[id];
                    a.first += intensity.at(x, y);
                    a.second += 1;
                }
        for (const auto& [id, a] : acc) seed_mean[id] = a.first / static_cast<double>(a.second);
    }

    const int ndirs = config.connectivity == Connectivity::Eight ? 8 : 4;

    // Pops ordered by (cost, id, y, x): ties go to the lower seed id, then
    // scan order. A pixel is claimed by its first pop.
    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>> queue;
    std::vector<double> best_cost(static_cast<std::size_t>(w) * h,
                                  std::numeric_limits<double>::infinity());
    std::vector<std::uint32_t> best_id(static_cast<std::size_t>(w) * h, 0);

    auto push_neighbors = [&](int x, int y, double cost, std::uint32_t id) {
        for (int d = 0; d < ndirs; ++d) {
            const int nx = x + kDx8[d], ny = y + kDy8[d];
            if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
            const std::size_t ni = result.labels.index(nx, ny);
            if (result.labels.labels[ni] != 0 || !constraint.bits[ni]) continue;
            double ncost;
            if (use_intensity) {
                const double delta = std::abs(intensity.samples[ni] - seed_mean[id]);
                ncost = std::max(cost, delta);
            } else {
                ncost = cost + 1.0;
            }
            if (ncost < best_cost[ni] || (ncost == best_cost[ni] && id < best_id[ni])) {
                best_cost[ni] = ncost;
                best_id[ni] = id;
                queue.push({ncost, id, ny, nx});
            }
        }
    };

    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (const auto id = result.labels.at(x, y)) push_neighbors(x, y, 0.0, id);

    while (!queue.empty()) {
        const QueueEntry e = queue.top();
        queue.pop();
        const std::size_t i = result.labels.index(e.x, e.y);
        if (result.labels.labels[i] != 0) continue;
        result.labels.labels[i] = e.id;
        push_neighbors(e.x, e.y, e.cost, e.id);
    }
    return result;
}

ThreeClassMask synthesize_three_class_mask(const InstanceLabelMap& instances,
                                           int border_thickness) {
    if (border_thickness < 1)
        throw InputError("synthesize_three_class_mask: thickness must be >= 1");
    const int w = instances.width, h = instances.height;

    // Interface pixels: labeled, with an 8-neighbor carrying a different
    // nonzero label.
    SemanticMask interface_px(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::uint32_t id = instances.at(x, y);
            if (id == 0) continue;
            bool hit = false;
            for (int d = 0; d < 8 && !hit; ++d) {
                const int nx = x + kDx8[d], ny = y + kDy8[d];
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                const std::uint32_t nid = instances.at(nx, ny);
                hit = nid != 0 && nid != id;
            }
            if (hit) interface_px.set(x, y, true);
        }
    }

    // The interface set is already 2 px thick (one pixel on each side), so a
    // band of total thickness t needs a dilation by ceil(t/2) - 1.
    const int band_radius = (border_thickness + 1) / 2 - 1;
    const SemanticMask contour = dilate(interface_px, band_radius);

    ThreeClassMask mask(w, h);
    for (std::size_t i = 0; i < mask.classes.size(); ++i) {
        if (contour.bits[i])
            mask.classes[i] = static_cast<std::uint8_t>(PixelClass::Contour);
        else if (instances.labels[i] != 0)
            mask.classes[i] = static_cast<std::uint8_t>(PixelClass::Interior);
    }
    return mask;
}

RasterImage overlay_contours(const RasterImage& image, const InstanceLabelMap& instances,
                             std::array<std::uint8_t, 3> color) {
    require_same_dims(image, instances, "overlay_contours");
    RasterImage out(image.width, image.height, 3);
    if (image.channels == 3) {
        out.samples = image.samples;
    } else {
        for (std::size_t i = 0; i < image.pixel_count(); ++i) {
            out.samples[3 * i] = image.samples[i];
            out.samples[3 * i + 1] = image.samples[i];
            out.samples[3 * i + 2] = image.samples[i];
        }
    }
    const int w = image.width, h = image.height;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::uint32_t id = instances.at(x, y);
            if (id == 0) continue;
            bool boundary = false;
            for (int d = 0; d < 4 && !boundary; ++d) {
                const int nx = x + kDx8[d], ny = y + kDy8[d];
                boundary = nx < 0 || ny < 0 || nx >= w || ny >= h || instances.at(nx, ny) != id;
            }
            if (boundary) {
                out.at(x, y, 0) = color[0];
                out.at(x, y, 1) = color[1];
                out.at(x, y, 2) = color[2];
            }
        }
    }
    return out;
}

} // namespace neuroseg
