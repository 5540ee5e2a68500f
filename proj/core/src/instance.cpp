#include <neuroseg/instance.hpp>

#include <neuroseg/raster_ops.hpp>

#include <json.hpp>

#include <algorithm>
#include <map>
#include <unordered_map>

namespace neuroseg {

void ClassProbMaps::require_consistent() const {
    require_same_dims(background, interior, "ClassProbMaps");
    require_same_dims(background, contour, "ClassProbMaps");
}

std::string CandidateSet::to_json() const {
    nlohmann::json doc;
    doc["count"] = records.size();
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json jr;
        jr["id"] = r.id;
        jr["area"] = r.area;
        jr["bbox"] = {{"x0", r.bbox.x0}, {"y0", r.bbox.y0}, {"x1", r.bbox.x1}, {"y1", r.bbox.y1}};
        jr["centroid"] = {{"x", r.centroid_x}, {"y", r.centroid_y}};
        if (r.predicted_iou >= 0.0) jr["predicted_iou"] = r.predicted_iou;
        arr.push_back(std::move(jr));
    }
    doc["candidates"] = std::move(arr);
    return doc.dump(2);
}

CandidateSet make_candidate_set(InstanceLabelMap labels, std::size_t min_area) {
    struct Acc {
        std::size_t area = 0;
        std::int64_t sum_x = 0, sum_y = 0;
        int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    };
    std::map<std::uint32_t, Acc> accs;
    for (int y = 0; y < labels.height; ++y) {
        for (int x = 0; x < labels.width; ++x) {
            const std::uint32_t id = labels.at(x, y);
            if (id == 0) continue;
            auto [it, inserted] = accs.try_emplace(id);
            Acc& a = it->second;
            if (inserted) {
                a.x0 = a.x1 = x;
                a.y0 = a.y1 = y;
            } else {
                a.x0 = std::min(a.x0, x);
                a.x1 = std::max(a.x1, x);
                a.y0 = std::min(a.y0, y);
                a.y1 = std::max(a.y1, y);
            }
            ++a.area;
            a.sum_x += x;
            a.sum_y += y;
        }
    }

    CandidateSet set;
    std::unordered_map<std::uint32_t, bool> keep;
    for (const auto& [id, a] : accs) {
        if (a.area < min_area) {
            keep[id] = false;
            continue;
        }
        keep[id] = true;
        CandidateRecord r;
        r.id = id;
        r.area = a.area;
        r.bbox = {a.x0, a.y0, a.x1, a.y1};
        r.centroid_x = static_cast<double>(a.sum_x) / static_cast<double>(a.area);
        r.centroid_y = static_cast<double>(a.sum_y) / static_cast<double>(a.area);
        set.records.push_back(r);
    }
    for (auto& l : labels.labels)
        if (l != 0 && !keep[l]) l = 0;
    set.instances = std::move(labels);
    return set;
}

ClassProbMaps fuse_probability_maps(const std::vector<ClassProbMaps>& maps,
                                    const std::vector<double>& weights) {
    if (maps.empty()) throw InputError("fuse_probability_maps: no maps");
    if (maps.size() != weights.size())
        throw InputError("fuse_probability_maps: weights size mismatch");
    double total = 0.0;
    for (const double w : weights) {
        if (w < 0.0) throw InputError("fuse_probability_maps: negative weight");
        total += w;
    }
    if (total <= 0.0) throw InputError("fuse_probability_maps: weights are all zero");
    for (const auto& m : maps) {
        m.require_consistent();
        require_same_dims(m.interior, maps.front().interior, "fuse_probability_maps");
    }

    const int w = maps.front().width(), h = maps.front().height();
    ClassProbMaps out;
    out.background = ProbabilityMap(w, h);
    out.interior = ProbabilityMap(w, h);
    out.contour = ProbabilityMap(w, h);
    out.normalized = std::all_of(maps.begin(), maps.end(),
                                 [](const ClassProbMaps& m) { return m.normalized; });
    const std::size_t n = out.interior.values.size();
    for (std::size_t k = 0; k < maps.size(); ++k) {
        const double wk = weights[k];
        if (wk == 0.0) continue;
        for (std::size_t i = 0; i < n; ++i) {
            out.background.values[i] += wk * maps[k].background.values[i];
            out.interior.values[i] += wk * maps[k].interior.values[i];
            out.contour.values[i] += wk * maps[k].contour.values[i];
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        out.background.values[i] /= total;
        out.interior.values[i] /= total;
        out.contour.values[i] /= total;
    }
    return out;
}

CandidateSet instances_from_three_class(const ClassProbMaps& maps, const InstanceConfig& config) {
    maps.require_consistent();
    if (config.interior_threshold < 0.0 || config.interior_threshold > 1.0)
        throw InputError("instances_from_three_class: threshold outside [0,1]");

    const int w = maps.width(), h = maps.height();
    const double t = config.interior_threshold;

    SemanticMask marker_mask(w, h), foreground(w, h);
    for (std::size_t i = 0; i < maps.interior.values.size(); ++i) {
        const double pi = maps.interior.values[i], pc = maps.contour.values[i];
        marker_mask.bits[i] = pi >= t && pc < t;
        foreground.bits[i] = pi + pc >= t;
    }

    InstanceLabelMap markers = connected_components(marker_mask, config.connectivity);

    // Drop undersized markers before growth.
    std::unordered_map<std::uint32_t, std::size_t> marker_area;
    for (const auto l : markers.labels)
        if (l != 0) ++marker_area[l];
    for (auto& l : markers.labels)
        if (l != 0 && marker_area[l] < config.min_area) l = 0;

    GrowConfig grow;
    grow.connectivity = config.connectivity;
    grow.priority = GrowPriority::GeodesicDistance;
    GrowResult grown = competitive_region_growing(markers, foreground, RasterImage(), grow);

    return make_candidate_set(std::move(grown.labels), config.min_area);
}

InstanceLabelMap find_seed_peaks(const ProbabilityMap& map, int min_distance, double min_value) {
    if (min_distance < 0) throw InputError("find_seed_peaks: negative min_distance");
    const int w = map.width, h = map.height, r = min_distance;
    InstanceLabelMap peaks(w, h);
    std::uint32_t next = 1;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double v = map.at(x, y);
            if (v < min_value) continue;
            bool suppressed = false;
            for (int dy = -r; dy <= r && !suppressed; ++dy) {
                const int ny = y + dy;
                if (ny < 0 || ny >= h) continue;
                for (int dx = -r; dx <= r; ++dx) {
                    const int nx = x + dx;
                    if (nx < 0 || nx >= w || (dx == 0 && dy == 0)) continue;
                    const double nv = map.at(nx, ny);
                    // Equal values yield to the lexicographically first pixel.
                    if (nv > v || (nv == v && (ny < y || (ny == y && nx < x)))) {
                        suppressed = true;
                        break;
                    }
                }
            }
            if (!suppressed) peaks.at(x, y) = next++;
        }
    }
    return peaks;
}

namespace {

// RF mask -> distance-transform peaks -> competitive growth.
struct BaselineStage {
    SemanticMask mask;
    ProbabilityMap rf_prob;
    InstanceLabelMap labels;
};

BaselineStage run_baseline_stage(const RasterImage& image, const ForestModel& rf,
                                 const BaselineConfig& config) {
    if (!rf.trained()) throw InputError("baseline: model is not trained");

    const FeaturePlanes planes = extract_pixel_features(image, config.feature_window_radius);
    auto [mask, prob] = predict_semantic(rf, planes, config.rf_threshold);

    const ProbabilityMap dist = distance_transform(mask);
    const InstanceLabelMap seeds =
        find_seed_peaks(dist, config.min_peak_distance, config.min_peak_value);

    GrowConfig grow;
    grow.connectivity = config.instance.connectivity;
    grow.priority = GrowPriority::GeodesicDistance;
    GrowResult grown = competitive_region_growing(seeds, mask, RasterImage(), grow);
    return {std::move(mask), std::move(prob), std::move(grown.labels)};
}

} // namespace

CandidateSet baseline_segment(const RasterImage& image, const ForestModel& rf,
                              const BaselineConfig& config) {
    BaselineStage stage = run_baseline_stage(image, rf, config);
    return make_candidate_set(std::move(stage.labels), config.instance.min_area);
}

ClassProbMaps baseline_class_probs(const RasterImage& image, const ForestModel& rf,
                                   const BaselineConfig& config) {
    const BaselineStage stage = run_baseline_stage(image, rf, config);
    const ThreeClassMask tcm = synthesize_three_class_mask(stage.labels);

    ClassProbMaps maps;
    maps.background = ProbabilityMap(image.width, image.height);
    maps.interior = ProbabilityMap(image.width, image.height);
    maps.contour = ProbabilityMap(image.width, image.height);
    maps.normalized = true;
    for (std::size_t i = 0; i < stage.rf_prob.values.size(); ++i) {
        const double q = std::clamp(stage.rf_prob.values[i], 0.0, 1.0);
        const auto cls = static_cast<PixelClass>(tcm.classes[i]);
        double pi = 0.0, pc = 0.0;
        if (cls == PixelClass::Interior)
            pi = q;
        else if (cls == PixelClass::Contour)
            pc = q;
        maps.interior.values[i] = pi;
        maps.contour.values[i] = pc;
        maps.background.values[i] = 1.0 - pi - pc;
    }
    return maps;
}

} // namespace neuroseg
