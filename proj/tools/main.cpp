// neuroseg CLI: synthetic data generation, RF training, point-annotation
// label synthesis, tiled segmentation, IoU filter training and evaluation.

#include <neuroseg/checksum.hpp>
#include <neuroseg/csv_io.hpp>
#include <neuroseg/metrics.hpp>
#include <neuroseg/pipeline.hpp>
#include <neuroseg/png_io.hpp>
#include <neuroseg/synthgen.hpp>
#include <neuroseg/version.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

using namespace neuroseg;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitInvariantError = 3;
constexpr int kExitResourceGuard = 4;

class StageTimer {
public:
    void start(const std::string& name) {
        name_ = name;
        t0_ = std::chrono::steady_clock::now();
    }
    void stop() {
        const double ms =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0_)
                .count();
        timings_[name_] = ms;
    }
    const std::map<std::string, double>& timings() const { return timings_; }

private:
    std::string name_;
    std::chrono::steady_clock::time_point t0_;
    std::map<std::string, double> timings_;
};

// Run log: version, a hash of the effective configuration, stage timings.
// Not part of the data artifacts, so reruns stay byte-identical elsewhere.
void write_log(const fs::path& out_dir, const std::string& subcommand,
               const std::string& config_dump, const StageTimer& timer,
               const nlohmann::json& extra = {}) {
    nlohmann::json log;
    log["tool"] = "neuroseg";
    log["version"] = kVersion;
    log["subcommand"] = subcommand;
    log["config_hash"] = crc32_hex(crc32_bytes(config_dump.data(), config_dump.size()));
    log["timings_ms"] = timer.timings();
    if (!extra.is_null() && !extra.empty()) log["run"] = extra;
    std::ofstream out(out_dir / "log.json");
    out << log.dump(2) << "\n";
}

std::vector<fs::path> list_scene_dirs(const fs::path& root) {
    if (!fs::is_directory(root)) throw InputError("not a directory: " + root.string());
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(root))
        if (entry.is_directory() && fs::exists(entry.path() / "image.png"))
            dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    if (dirs.empty()) throw InputError("no scene directories under " + root.string());
    return dirs;
}

InstanceLabelMap load_scene_labels(const fs::path& scene_dir) {
    return load_label_map((scene_dir / "labels.png").string());
}

// --- gen -------------------------------------------------------------------

struct GenOptions {
    std::string out;
    std::string densities = "sparse,dense,very-dense";
    int scenes_per_density = 1;
    int width = 512;
    int height = 512;
    std::uint64_t seed = 1;
};

int cmd_gen(const GenOptions& opt, const std::string& dump) {
    StageTimer timer;
    timer.start("generate");

    std::vector<DatasetScene> grid;
    std::vector<std::string> names;
    {
        std::stringstream ss(opt.densities);
        std::string token;
        while (std::getline(ss, token, ',')) names.push_back(token);
    }
    int k = 0;
    for (const auto& name : names) {
        const Density density = density_from_name(name);
        for (int i = 0; i < opt.scenes_per_density; ++i) {
            DatasetScene ds;
            ds.name = "scene_" + std::to_string(k);
            ds.config =
                preset_scene(density, opt.width, opt.height, opt.seed + static_cast<std::uint64_t>(k));
            grid.push_back(ds);
            ++k;
        }
    }
    generate_dataset(grid, opt.out);
    timer.stop();
    write_log(opt.out, "gen", dump, timer, {{"scenes", grid.size()}});
    std::cout << "wrote " << grid.size() << " scenes under " << opt.out << "\n";
    return kExitOk;
}

// --- train-rf ---------------------------------------------------------------

struct TrainRfOptions {
    std::string scenes;
    std::string samples_csv;
    std::string out;
    std::string dump_samples;
    int sample_stride = 2;
    int window_radius = 5;
    RfParams params;
};

int cmd_train_rf(const TrainRfOptions& opt, const std::string& dump) {
    StageTimer timer;
    std::vector<PixelFeatures> features;
    std::vector<std::uint8_t> labels;

    timer.start("load");
    if (!opt.samples_csv.empty()) {
        std::tie(features, labels) = read_rf_samples_csv(opt.samples_csv);
    } else if (!opt.scenes.empty()) {
        for (const auto& dir : list_scene_dirs(opt.scenes)) {
            const auto image = read_png((dir / "image.png").string());
            const auto gt = load_scene_labels(dir);
            const auto planes = extract_pixel_features(image, opt.window_radius);
            for (int y = 0; y < image.height; y += opt.sample_stride)
                for (int x = 0; x < image.width; x += opt.sample_stride) {
                    features.push_back(planes.at(x, y));
                    labels.push_back(gt.at(x, y) != 0);
                }
        }
    } else {
        throw InputError("train-rf: provide --scenes or --samples");
    }
    timer.stop();

    if (!opt.dump_samples.empty()) write_rf_samples_csv(opt.dump_samples, features, labels);

    timer.start("train");
    const auto model = train_random_forest(features, labels, opt.params);
    timer.stop();
    save_forest(opt.out, model);

    const fs::path out_dir = fs::path(opt.out).parent_path();
    write_log(out_dir.empty() ? "." : out_dir, "train-rf", dump, timer,
              {{"samples", features.size()}, {"trees", opt.params.n_trees}});
    std::cout << "trained " << opt.params.n_trees << " trees on " << features.size()
              << " samples -> " << opt.out << "\n";
    return kExitOk;
}

// --- synth-labels ------------------------------------------------------------

struct SynthLabelsOptions {
    std::string image;
    std::string centroids;
    std::string rf_model;
    std::string rf_samples;
    std::string out;
    LabelSynthesisConfig config;
    std::string priority = "geodesic";
    int connectivity = 8;
    RfParams rf_params;
};

int cmd_synth_labels(SynthLabelsOptions opt, const std::string& dump) {
    StageTimer timer;
    timer.start("load");
    const auto image = read_png(opt.image);
    const auto centroids = read_centroids_csv(opt.centroids, image.width, image.height);
    ForestModel rf;
    if (!opt.rf_model.empty()) {
        rf = load_forest(opt.rf_model);
    } else if (!opt.rf_samples.empty()) {
        const auto [features, labels] = read_rf_samples_csv(opt.rf_samples);
        rf = train_random_forest(features, labels, opt.rf_params);
    } else {
        throw InputError("synth-labels: provide --rf-model or --rf-samples");
    }
    timer.stop();

    opt.config.grow.priority = opt.priority == "intensity" ? GrowPriority::IntensityDelta
                                                           : GrowPriority::GeodesicDistance;
    opt.config.grow.connectivity =
        opt.connectivity == 4 ? Connectivity::Four : Connectivity::Eight;

    timer.start("synthesize");
    const auto result = run_label_synthesis(image, centroids, rf, opt.config);
    timer.stop();

    fs::create_directories(opt.out);
    timer.start("write");
    save_three_class_mask((fs::path(opt.out) / "three_class.png").string(), result.mask);
    write_png((fs::path(opt.out) / "overlay.png").string(), result.overlay);
    save_label_map((fs::path(opt.out) / "instances.png").string(), result.instances);
    timer.stop();

    nlohmann::json extra;
    extra["dropped_seed_ids"] = result.dropped_seed_ids;
    extra["no_active_seeds"] = result.no_active_seeds;
    write_log(opt.out, "synth-labels", dump, timer, extra);

    if (result.no_active_seeds)
        std::cerr << "warning: no seeds on RF foreground, mask is all background\n";
    else if (!result.dropped_seed_ids.empty())
        std::cerr << "warning: dropped " << result.dropped_seed_ids.size()
                  << " seed(s) outside RF foreground\n";
    std::cout << "label synthesis artifacts in " << opt.out << "\n";
    return kExitOk;
}

// --- segment ------------------------------------------------------------------

struct SegmentOptions {
    std::string image;
    std::string rf_model;
    std::string filter_model;
    std::string out;
    SegmentConfig config;
};

int cmd_segment(const SegmentOptions& opt, const std::string& dump) {
    StageTimer timer;
    timer.start("load");
    const auto image = read_png(opt.image);
    const auto rf = load_forest(opt.rf_model);
    GbtModel gbt;
    const bool filtered = !opt.filter_model.empty();
    if (filtered) gbt = load_gbt(opt.filter_model);
    timer.stop();

    timer.start("segment");
    const auto result = run_segmentation(image, rf, filtered ? &gbt : nullptr, opt.config);
    timer.stop();

    fs::create_directories(opt.out);
    timer.start("write");
    save_label_map((fs::path(opt.out) / "labels.png").string(), result.candidates.instances);
    {
        std::ofstream cj(fs::path(opt.out) / "candidates.json");
        cj << result.candidates.to_json() << "\n";
    }
    timer.stop();

    write_log(opt.out, "segment", dump, timer,
              {{"tile_count", result.tile_count},
               {"candidates", result.candidates.records.size()},
               {"filtered", result.filtered}});
    std::cout << "segmented " << result.tile_count << " tile(s), "
              << result.candidates.records.size() << " candidate(s) -> " << opt.out << "\n";
    return kExitOk;
}

// --- train-filter ---------------------------------------------------------------

struct TrainFilterOptions {
    std::string scenes;
    std::string rf_model;
    std::string out;
    std::string dump_table;
    GbtParams params;
    SegmentConfig segment;
};

int cmd_train_filter(const TrainFilterOptions& opt, const std::string& dump) {
    StageTimer timer;
    timer.start("load");
    const auto rf = load_forest(opt.rf_model);
    timer.stop();

    std::vector<CandidateFeatureVector> features;
    std::vector<double> targets;
    timer.start("segment-scenes");
    for (const auto& dir : list_scene_dirs(opt.scenes)) {
        const auto image = read_png((dir / "image.png").string());
        const auto gt = load_scene_labels(dir);
        const auto out = segment_untiled(image, rf, nullptr, opt.segment);
        const auto ious = best_overlap_iou(out.candidates, gt);
        features.insert(features.end(), out.features.begin(), out.features.end());
        targets.insert(targets.end(), ious.begin(), ious.end());
    }
    timer.stop();

    if (!opt.dump_table.empty()) write_gbt_table_csv(opt.dump_table, features, targets);

    timer.start("train");
    const auto model = train_iou_regressor(features, targets, opt.params);
    timer.stop();
    save_gbt(opt.out, model);

    const fs::path out_dir = fs::path(opt.out).parent_path();
    write_log(out_dir.empty() ? "." : out_dir, "train-filter", dump, timer,
              {{"candidates", features.size()}});
    std::cout << "trained IoU regressor on " << features.size() << " candidates -> " << opt.out
              << "\n";
    return kExitOk;
}

// --- evaluate --------------------------------------------------------------------

struct EvaluateOptions {
    std::string pred;
    std::string gt;
    std::string centroids;
    std::string pred_dir;
    std::string scenes;
    std::string out;
    std::string name = "baseline";
    double iou_threshold = 0.5;
};

int cmd_evaluate(const EvaluateOptions& opt, const std::string& dump) {
    StageTimer timer;
    fs::create_directories(opt.out);

    struct Item {
        std::string name;
        EvalReport report;
    };
    std::vector<Item> items;

    timer.start("evaluate");
    if (!opt.pred_dir.empty() || !opt.scenes.empty()) {
        if (opt.pred_dir.empty() || opt.scenes.empty())
            throw InputError("evaluate: batch mode needs both --pred-dir and --scenes");
        for (const auto& dir : list_scene_dirs(opt.scenes)) {
            const auto name = dir.filename().string();
            const auto gt = load_scene_labels(dir);
            const auto centroids =
                read_centroids_csv((dir / "centroids.csv").string(), gt.width, gt.height);
            const auto pred = load_label_map((fs::path(opt.pred_dir) / name / "labels.png").string());
            items.push_back({name, evaluate(pred, gt, centroids, opt.iou_threshold)});
        }
    } else {
        if (opt.pred.empty() || opt.gt.empty() || opt.centroids.empty())
            throw InputError("evaluate: need --pred, --gt and --centroids (or batch flags)");
        const auto pred = load_label_map(opt.pred);
        const auto gt = load_label_map(opt.gt);
        const auto centroids = read_centroids_csv(opt.centroids, gt.width, gt.height);
        items.push_back({opt.name, evaluate(pred, gt, centroids, opt.iou_threshold)});
    }
    timer.stop();

    timer.start("write");
    nlohmann::json all = nlohmann::json::array();
    std::vector<std::pair<std::string, double>> det_rows;
    std::ostringstream table;
    for (std::size_t i = 0; i < items.size(); ++i) {
        nlohmann::json entry = nlohmann::json::parse(items[i].report.to_json());
        entry["name"] = items[i].name;
        all.push_back(std::move(entry));
        det_rows.emplace_back(items[i].name, items[i].report.det.f1);
        const auto t = items[i].report.to_table(items[i].name);
        table << (i == 0 ? t : t.substr(t.find('\n') + 1));
    }
    {
        std::ofstream rj(fs::path(opt.out) / "report.json");
        rj << (items.size() == 1 ? nlohmann::json::parse(items[0].report.to_json()).dump(2)
                                 : all.dump(2))
           << "\n";
    }
    {
        std::ofstream rt(fs::path(opt.out) / "report.txt");
        rt << table.str();
    }
    write_det_f1_csv((fs::path(opt.out) / "det_f1.csv").string(), det_rows);
    timer.stop();

    write_log(opt.out, "evaluate", dump, timer, {{"images", items.size()}});
    std::cout << table.str();
    return kExitOk;
}

// --- plan ------------------------------------------------------------------------

struct PlanOptions {
    int width = 5000;
    int height = 5000;
    int window = kDefaultWindow;
    int stride = kDefaultStride;
    std::string out;
};

int cmd_plan(const PlanOptions& opt) {
    const auto plan = plan_tiling(opt.width, opt.height, opt.window, opt.stride);
    const auto text = plan.to_json();
    if (opt.out.empty()) {
        std::cout << text << "\n";
    } else {
        std::ofstream out(opt.out);
        if (!out) throw InputError("plan: cannot open " + opt.out);
        out << text << "\n";
        std::cout << "plan with " << plan.tile_count() << " tiles -> " << opt.out << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"neuroseg: weakly supervised neuron instance segmentation toolkit"};
    app.set_version_flag("--version", kVersion);
    app.set_config("--config", "", "Read options from a TOML-style key=value file");
    app.allow_config_extras(CLI::config_extras_mode::error); // unknown keys are rejected
    app.require_subcommand(1);

    GenOptions gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic NeuN-like dataset");
    gen_cmd->configurable();
    gen_cmd->add_option("--out", gen.out, "Output dataset directory")->required();
    gen_cmd->add_option("--densities", gen.densities,
                        "Comma list of sparse|dense|very-dense presets");
    gen_cmd->add_option("--scenes-per-density", gen.scenes_per_density)->check(CLI::Range(1, 64));
    gen_cmd->add_option("--width", gen.width)->check(CLI::Range(64, 16384));
    gen_cmd->add_option("--height", gen.height)->check(CLI::Range(64, 16384));
    gen_cmd->add_option("--seed", gen.seed, "Base seed; scene k uses seed+k");

    TrainRfOptions train_rf;
    auto* train_rf_cmd = app.add_subcommand("train-rf", "Train the pixel random forest");
    train_rf_cmd->configurable();
    train_rf_cmd->add_option("--scenes", train_rf.scenes, "Dataset directory from `gen`");
    train_rf_cmd->add_option("--samples", train_rf.samples_csv, "Training samples CSV");
    train_rf_cmd->add_option("--out", train_rf.out, "Model JSON path")->required();
    train_rf_cmd->add_option("--dump-samples", train_rf.dump_samples,
                             "Also write the sample table CSV");
    train_rf_cmd->add_option("--sample-stride", train_rf.sample_stride)->check(CLI::Range(1, 64));
    train_rf_cmd->add_option("--window-radius", train_rf.window_radius)->check(CLI::Range(0, 64));
    train_rf_cmd->add_option("--trees", train_rf.params.n_trees)->check(CLI::Range(1, 4096));
    train_rf_cmd->add_option("--max-depth", train_rf.params.max_depth)->check(CLI::Range(1, 64));
    train_rf_cmd->add_option("--min-leaf", train_rf.params.min_leaf)->check(CLI::Range(1, 1 << 20));
    train_rf_cmd->add_option("--features-per-split", train_rf.params.features_per_split)
        ->check(CLI::Range(1, 4));
    train_rf_cmd->add_flag_function(
        "--no-bootstrap", [&](std::int64_t) { train_rf.params.bootstrap = false; },
        "Train every tree on the full sample set");
    train_rf_cmd->add_option("--seed", train_rf.params.seed);

    SynthLabelsOptions synth;
    auto* synth_cmd =
        app.add_subcommand("synth-labels", "Synthesize three-class masks from point labels");
    synth_cmd->configurable();
    synth_cmd->add_option("--image", synth.image)->required();
    synth_cmd->add_option("--centroids", synth.centroids, "CSV with header id,x,y")->required();
    synth_cmd->add_option("--rf-model", synth.rf_model, "Trained forest JSON");
    synth_cmd->add_option("--rf-samples", synth.rf_samples,
                          "Training samples CSV; trains a forest on the fly");
    synth_cmd->add_option("--rf-trees", synth.rf_params.n_trees)->check(CLI::Range(1, 4096));
    synth_cmd->add_option("--rf-seed", synth.rf_params.seed);
    synth_cmd->add_option("--out", synth.out, "Output directory")->required();
    synth_cmd->add_option("--window-radius", synth.config.feature_window_radius)
        ->check(CLI::Range(0, 64));
    synth_cmd->add_option("--rf-threshold", synth.config.rf_threshold)
        ->check(CLI::Range(0.0, 1.0));
    synth_cmd->add_option("--seed-radius", synth.config.grow.seed_disk_radius)
        ->check(CLI::Range(0, 64));
    synth_cmd->add_option("--priority", synth.priority)
        ->check(CLI::IsMember({"geodesic", "intensity"}));
    synth_cmd->add_option("--connectivity", synth.connectivity)->check(CLI::IsMember({4, 8}));
    synth_cmd->add_option("--thickness", synth.config.border_thickness)->check(CLI::Range(1, 32));

    SegmentOptions seg;
    auto* seg_cmd = app.add_subcommand("segment", "Tiled baseline instance segmentation");
    seg_cmd->configurable();
    seg_cmd->add_option("--image", seg.image)->required();
    seg_cmd->add_option("--rf-model", seg.rf_model)->required();
    seg_cmd->add_option("--filter-model", seg.filter_model, "Optional IoU regressor JSON");
    seg_cmd->add_option("--out", seg.out, "Output directory")->required();
    seg_cmd->add_option("--window", seg.config.window)->check(CLI::Range(16, 16384));
    seg_cmd->add_option("--stride", seg.config.stride)->check(CLI::Range(1, 16384));
    seg_cmd->add_option("--min-weight", seg.config.min_weight)
        ->check(CLI::Range(1e-9, 1.0));
    seg_cmd->add_option("--filter-threshold", seg.config.filter_threshold)
        ->check(CLI::Range(0.0, 1.0));
    seg_cmd->add_option("--interior-threshold", seg.config.baseline.instance.interior_threshold)
        ->check(CLI::Range(0.0, 1.0));
    seg_cmd->add_option("--min-area", seg.config.baseline.instance.min_area);
    seg_cmd->add_option("--min-peak-dist", seg.config.baseline.min_peak_distance)
        ->check(CLI::Range(0, 256));
    seg_cmd->add_option("--window-radius", seg.config.baseline.feature_window_radius)
        ->check(CLI::Range(0, 64));
    seg_cmd->add_option("--workers", seg.config.workers)->check(CLI::Range(0, 256));
    seg_cmd->add_option("--memory-budget-mb", seg.config.memory_budget_mb);

    TrainFilterOptions train_filter;
    auto* train_filter_cmd =
        app.add_subcommand("train-filter", "Train the candidate IoU regressor");
    train_filter_cmd->configurable();
    train_filter_cmd->add_option("--scenes", train_filter.scenes)->required();
    train_filter_cmd->add_option("--rf-model", train_filter.rf_model)->required();
    train_filter_cmd->add_option("--out", train_filter.out)->required();
    train_filter_cmd->add_option("--dump-table", train_filter.dump_table,
                                 "Also write the regression table CSV");
    train_filter_cmd->add_option("--rounds", train_filter.params.n_rounds)
        ->check(CLI::Range(1, 4096));
    train_filter_cmd->add_option("--depth", train_filter.params.max_depth)
        ->check(CLI::Range(1, 16));
    train_filter_cmd->add_option("--shrinkage", train_filter.params.shrinkage)
        ->check(CLI::Range(1e-6, 1.0));
    train_filter_cmd->add_option("--seed", train_filter.params.seed);

    EvaluateOptions eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
    eval_cmd->configurable();
    eval_cmd->add_option("--pred", eval.pred, "Predicted label map (PNG or .rle)");
    eval_cmd->add_option("--gt", eval.gt, "Ground-truth label map");
    eval_cmd->add_option("--centroids", eval.centroids, "Expert centroids CSV");
    eval_cmd->add_option("--pred-dir", eval.pred_dir, "Batch: segment outputs per scene");
    eval_cmd->add_option("--scenes", eval.scenes, "Batch: dataset directory");
    eval_cmd->add_option("--out", eval.out, "Report directory")->required();
    eval_cmd->add_option("--name", eval.name);
    eval_cmd->add_option("--iou-threshold", eval.iou_threshold)->check(CLI::Range(0.0, 1.0));

    PlanOptions plan;
    auto* plan_cmd = app.add_subcommand("plan", "Dump a tiling plan as JSON");
    plan_cmd->configurable();
    plan_cmd->add_option("--width", plan.width)->required()->check(CLI::Range(1, 1 << 20));
    plan_cmd->add_option("--height", plan.height)->required()->check(CLI::Range(1, 1 << 20));
    plan_cmd->add_option("--window", plan.window)->check(CLI::Range(1, 1 << 20));
    plan_cmd->add_option("--stride", plan.stride)->check(CLI::Range(1, 1 << 20));
    plan_cmd->add_option("--out", plan.out, "Write to a file instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputError;
    }

    try {
        const std::string dump = app.config_to_str(true, false);
        if (gen_cmd->parsed()) return cmd_gen(gen, dump);
        if (train_rf_cmd->parsed()) return cmd_train_rf(train_rf, dump);
        if (synth_cmd->parsed()) return cmd_synth_labels(synth, dump);
        if (seg_cmd->parsed()) return cmd_segment(seg, dump);
        if (train_filter_cmd->parsed()) return cmd_train_filter(train_filter, dump);
        if (eval_cmd->parsed()) return cmd_evaluate(eval, dump);
        if (plan_cmd->parsed()) return cmd_plan(plan);
        return kExitInputError;
    } catch (const ResourceGuardError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitResourceGuard;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const InvariantError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariantError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvariantError;
    }
}
