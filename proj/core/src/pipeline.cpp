#include <neuroseg/pipeline.hpp>

#include <neuroseg/raster_ops.hpp>

#include <algorithm>
#include <future>
#include <utility>
#include <vector>

namespace neuroseg {

namespace {

void check_memory_budget(const RasterImage& image, const SegmentConfig& cfg) {
    // Rough working-set model: per-tile class maps and features plus the
    // full-image accumulators.
    const std::size_t tile_bytes = static_cast<std::size_t>(cfg.window) * cfg.window * 64;
    const std::size_t image_bytes = image.pixel_count() * 72;
    const std::size_t workers = static_cast<std::size_t>(std::max(1, cfg.workers));
    const std::size_t budget = cfg.memory_budget_mb * (std::size_t{1} << 20);
    if (tile_bytes * workers + image_bytes > budget)
        throw ResourceGuardError(
            "run_segmentation: estimated working set exceeds memory budget of " +
            std::to_string(cfg.memory_budget_mb) + " MiB; reduce --window or raise the budget");
}

SegmentOutput finish_from_maps(ClassProbMaps assembled, const GbtModel* filter,
                               const SegmentConfig& cfg, std::size_t tile_count) {
    SegmentOutput out;
    out.assembled = std::move(assembled);
    out.tile_count = tile_count;
    out.candidates = instances_from_three_class(out.assembled, cfg.baseline.instance);
    out.features = extract_candidate_features(out.candidates, out.assembled);
    if (filter != nullptr) {
        FilterResult fr =
            filter_candidates(out.candidates, out.features, *filter, cfg.filter_threshold);
        out.candidates = std::move(fr.candidates);
        out.features = std::move(fr.features);
        out.filtered = true;
    }
    return out;
}

} // namespace

SegmentOutput run_segmentation(const RasterImage& image, const ForestModel& rf,
                               const GbtModel* filter, const SegmentConfig& cfg) {
    check_memory_budget(image, cfg);
    const TilingPlan plan = plan_tiling(image.width, image.height, cfg.window, cfg.stride);

    if (plan.tile_count() == 1) {
        ClassProbMaps maps = baseline_class_probs(image, rf, cfg.baseline);
        return finish_from_maps(std::move(maps), filter, cfg, 1);
    }

    const WeightMap wmap = make_weight_map(cfg.window, plan.overlap(), cfg.min_weight);
    Assembler bg(plan, wmap), interior(plan, wmap), contour(plan, wmap);
    const auto origins = plan.origins();

    auto process_tile = [&](TileOrigin o) {
        const RasterImage patch = extract_patch(image, o, cfg.window);
        return baseline_class_probs(patch, rf, cfg.baseline);
    };
    auto add_tile = [&](TileOrigin o, ClassProbMaps&& maps) {
        bg.add(o, maps.background);
        interior.add(o, maps.interior);
        contour.add(o, maps.contour);
    };

    if (cfg.workers <= 1) {
        for (const auto o : origins) add_tile(o, process_tile(o));
    } else {
        // Batched workers with an ordered reduction keep the accumulation
        // order fixed, so sums are identical to the sequential run.
        const std::size_t batch = static_cast<std::size_t>(cfg.workers);
        for (std::size_t base = 0; base < origins.size(); base += batch) {
            const std::size_t end = std::min(origins.size(), base + batch);
            std::vector<std::future<ClassProbMaps>> futs;
            for (std::size_t i = base; i < end; ++i)
                futs.push_back(
                    std::async(std::launch::async, process_tile, origins[i]));
            for (std::size_t i = base; i < end; ++i)
                add_tile(origins[i], futs[i - base].get());
        }
    }

    ClassProbMaps assembled;
    assembled.background = bg.finish();
    assembled.interior = interior.finish();
    assembled.contour = contour.finish();
    assembled.normalized = true;
    return finish_from_maps(std::move(assembled), filter, cfg, plan.tile_count());
}

SegmentOutput segment_untiled(const RasterImage& image, const ForestModel& rf,
                              const GbtModel* filter, const SegmentConfig& cfg) {
    ClassProbMaps maps = baseline_class_probs(image, rf, cfg.baseline);
    return finish_from_maps(std::move(maps), filter, cfg, 1);
}

LabelSynthesisOutput run_label_synthesis(const RasterImage& image,
                                         const PointAnnotationSet& centroids,
                                         const ForestModel& rf,
                                         const LabelSynthesisConfig& cfg) {
    LabelSynthesisOutput out;

    const FeaturePlanes planes = extract_pixel_features(image, cfg.feature_window_radius);
    auto [mask, prob] = predict_semantic(rf, planes, cfg.rf_threshold);
    out.semantic = std::move(mask);

    const InstanceLabelMap seeds =
        rasterize_point_labels(centroids, cfg.grow.seed_disk_radius);
    const RasterImage gray = cfg.grow.priority == GrowPriority::IntensityDelta
                                 ? rgb_to_gray(image)
                                 : RasterImage();
    GrowResult grown = competitive_region_growing(seeds, out.semantic, gray, cfg.grow);
    out.dropped_seed_ids = std::move(grown.dropped_seed_ids);
    out.no_active_seeds = grown.no_active_seeds;
    out.instances = std::move(grown.labels);

    out.mask = synthesize_three_class_mask(out.instances, cfg.border_thickness);
    out.overlay = overlay_contours(image, out.instances);
    return out;
}

} // namespace neuroseg
