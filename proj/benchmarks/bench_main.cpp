#include <neuroseg/labelsynth.hpp>
#include <neuroseg/raster_ops.hpp>
#include <neuroseg/synthgen.hpp>
#include <neuroseg/tiling.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace neuroseg;

namespace {

SemanticMask bench_mask(int side) {
    std::mt19937 rng(4);
    SemanticMask mask(side, side);
    std::uniform_int_distribution<int> xd(8, side - 9), rd(4, 12);
    for (int k = 0; k < side / 4; ++k) {
        const int cx = xd(rng), cy = xd(rng), r = rd(rng);
        for (int y = cy - r; y <= cy + r; ++y)
            for (int x = cx - r; x <= cx + r; ++x)
                if ((x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r) mask.set(x, y, true);
    }
    return mask;
}

RasterImage bench_image(int side) {
    SceneConfig cfg;
    cfg.width = side;
    cfg.height = side;
    cfg.n_cells = side / 6;
    cfg.seed = 9;
    return generate_scene(cfg).image;
}

void BM_RgbToHsv(benchmark::State& state) {
    const auto img = bench_image(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(rgb_to_hsv(img));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.pixel_count()));
}
BENCHMARK(BM_RgbToHsv)->Arg(256)->Arg(1024);

void BM_DistanceTransform(benchmark::State& state) {
    const auto mask = bench_mask(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(squared_distance_transform(mask));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(mask.pixel_count()));
}
BENCHMARK(BM_DistanceTransform)->Arg(256)->Arg(1024);

void BM_Dilate(benchmark::State& state) {
    const auto mask = bench_mask(512);
    for (auto _ : state) benchmark::DoNotOptimize(dilate(mask, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_Dilate)->Arg(1)->Arg(5)->Arg(15);

void BM_ConnectedComponents(benchmark::State& state) {
    const auto mask = bench_mask(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(connected_components(mask, Connectivity::Eight));
}
BENCHMARK(BM_ConnectedComponents)->Arg(256)->Arg(1024);

void BM_RegionGrowing(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const auto mask = bench_mask(side);
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> coord(0, side - 1);
    InstanceLabelMap seeds(side, side);
    for (std::uint32_t id = 1; id <= static_cast<std::uint32_t>(side / 8); ++id)
        seeds.at(coord(rng), coord(rng)) = id;
    for (auto _ : state)
        benchmark::DoNotOptimize(
            competitive_region_growing(seeds, mask, RasterImage(), GrowConfig{}));
}
BENCHMARK(BM_RegionGrowing)->Arg(256)->Arg(512);

void BM_WeightedAssembly(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const auto plan = plan_tiling(side, side, side / 2, side * 3 / 8);
    const auto wmap = make_weight_map(side / 2, plan.overlap(), 0.01);
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<std::pair<TileOrigin, ProbabilityMap>> patches;
    for (const auto o : plan.origins()) {
        ProbabilityMap patch(side / 2, side / 2);
        for (auto& v : patch.values) v = unit(rng);
        patches.emplace_back(o, patch);
    }
    for (auto _ : state) benchmark::DoNotOptimize(assemble(patches, plan, wmap));
}
BENCHMARK(BM_WeightedAssembly)->Arg(512)->Arg(2048);

void BM_SceneGeneration(benchmark::State& state) {
    SceneConfig cfg;
    cfg.width = static_cast<int>(state.range(0));
    cfg.height = cfg.width;
    cfg.n_cells = cfg.width / 4;
    cfg.seed = 21;
    for (auto _ : state) benchmark::DoNotOptimize(generate_scene(cfg));
}
BENCHMARK(BM_SceneGeneration)->Arg(256)->Arg(512);

} // namespace

BENCHMARK_MAIN();
