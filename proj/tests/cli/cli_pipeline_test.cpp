// End-to-end exercise of the CLI binary: gen -> train-rf -> synth-labels ->
// segment -> train-filter -> evaluate -> plan, checking exit codes, artifact
// presence and byte-identical reruns. The binary path arrives as argv[1].

#include <neuroseg/checksum.hpp>
#include <neuroseg/png_io.hpp>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using neuroseg::crc32_file;

namespace {

int g_failures = 0;
std::string g_cli;
fs::path g_root;

void check(bool cond, const std::string& what) {
    if (!cond) {
        std::cerr << "FAILED: " << what << "\n";
        ++g_failures;
    }
}

int run(const std::string& args, bool expect_ok = true) {
    const std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    if (expect_ok) check(code == 0, "command exited " + std::to_string(code) + ": " + args);
    return code;
}

std::string path(const std::string& rel) { return (g_root / rel).string(); }

nlohmann::json read_json(const std::string& file) {
    std::ifstream in(file);
    check(static_cast<bool>(in), "missing file " + file);
    if (!in) return {};
    nlohmann::json j;
    in >> j;
    return j;
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: cli_tests <path-to-neuroseg-binary>\n";
        return 2;
    }
    g_cli = argv[1];
    g_root = fs::temp_directory_path() / "neuroseg_cli_test";
    fs::remove_all(g_root);
    fs::create_directories(g_root);

    // plan: JSON on stdout / to a file; the canonical parameters.
    run("plan --width 5000 --height 5000 --out " + path("plan.json"));
    {
        const auto plan = read_json(path("plan.json"));
        check(plan["tile_count"] == 16, "plan tile_count != 16");
        check(plan["overlap"] == 120, "plan overlap != 120");
    }

    // Oversized window is an input error (exit 2).
    check(run("plan --width 100 --height 100 --window 1340", false) == 2,
          "plan should exit 2 for window > image");

    // gen: small mixed dataset.
    run("gen --out " + path("data") + " --densities sparse,dense --scenes-per-density 2 "
        "--width 192 --height 192 --seed 41");
    check(fs::exists(path("data/manifest.json")), "gen manifest missing");
    check(fs::exists(path("data/scene_0/image.png")), "gen scene_0 image missing");
    check(fs::exists(path("data/scene_3/centroids.csv")), "gen scene_3 centroids missing");

    // Determinism: regenerate into a second directory, compare artifact hashes.
    run("gen --out " + path("data_rerun") + " --densities sparse,dense --scenes-per-density 2 "
        "--width 192 --height 192 --seed 41");
    for (const std::string f :
         {"scene_0/image.png", "scene_1/labels.png", "scene_2/centroids.csv"})
        check(crc32_file(path("data/" + f)) == crc32_file(path("data_rerun/" + f)),
              "gen rerun differs: " + f);

    // train-rf on the dataset.
    run("train-rf --scenes " + path("data") + " --out " + path("rf.json") +
        " --trees 30 --seed 5 --sample-stride 2");
    check(fs::exists(path("rf.json")), "rf model missing");
    run("train-rf --scenes " + path("data") + " --out " + path("rf_rerun.json") +
        " --trees 30 --seed 5 --sample-stride 2");
    check(crc32_file(path("rf.json")) == crc32_file(path("rf_rerun.json")),
          "train-rf rerun differs");

    // synth-labels on scene_0 with its generator centroids.
    run("synth-labels --image " + path("data/scene_0/image.png") + " --centroids " +
        path("data/scene_0/centroids.csv") + " --rf-model " + path("rf.json") + " --out " +
        path("synth"));
    check(fs::exists(path("synth/three_class.png")), "three-class mask missing");
    check(fs::exists(path("synth/overlay.png")), "overlay missing");
    check(fs::exists(path("synth/log.json")), "synth log missing");
    {
        const auto mask = neuroseg::load_three_class_mask(path("synth/three_class.png"));
        bool has_interior = false;
        for (const auto c : mask.classes) has_interior |= c == 1;
        check(has_interior, "three-class mask has no interior pixels");
    }

    // Empty centroids: still exit 0, all-background mask, warning in log.
    {
        std::ofstream empty(path("empty.csv"));
        empty << "id,x,y\n";
    }
    run("synth-labels --image " + path("data/scene_0/image.png") + " --centroids " +
        path("empty.csv") + " --rf-model " + path("rf.json") + " --out " + path("synth_empty"));
    {
        const auto mask = neuroseg::load_three_class_mask(path("synth_empty/three_class.png"));
        for (const auto c : mask.classes) {
            if (c != 0) {
                check(false, "empty-centroid mask not all background");
                break;
            }
        }
        check(read_json(path("synth_empty/log.json"))["run"]["no_active_seeds"] == true,
              "missing no_active_seeds warning");
    }

    // synth-labels can also train its forest from a samples CSV on the fly.
    run("train-rf --scenes " + path("data") + " --out " + path("rf_dump.json") +
        " --trees 10 --sample-stride 4 --dump-samples " + path("samples.csv"));
    run("synth-labels --image " + path("data/scene_0/image.png") + " --centroids " +
        path("data/scene_0/centroids.csv") + " --rf-samples " + path("samples.csv") +
        " --rf-trees 10 --out " + path("synth_from_samples"));
    check(fs::exists(path("synth_from_samples/three_class.png")),
          "samples-trained synth-labels output missing");

    // train-filter over the dataset.
    run("train-filter --scenes " + path("data") + " --rf-model " + path("rf.json") + " --out " +
        path("gbt.json") + " --rounds 40");
    check(fs::exists(path("gbt.json")), "gbt model missing");

    // segment: tiled run with the filter.
    run("segment --image " + path("data/scene_0/image.png") + " --rf-model " + path("rf.json") +
        " --filter-model " + path("gbt.json") + " --out " + path("seg") +
        " --window 128 --stride 96 --workers 2");
    check(fs::exists(path("seg/labels.png")), "segment labels missing");
    check(fs::exists(path("seg/candidates.json")), "segment candidates missing");
    {
        const auto log = read_json(path("seg/log.json"));
        check(log["run"]["tile_count"] == 4, "expected 4 tiles for 192/128/96");
    }

    // Single-tile window equals the image: still fine.
    run("segment --image " + path("data/scene_0/image.png") + " --rf-model " + path("rf.json") +
        " --out " + path("seg_single") + " --window 192 --stride 192");
    check(read_json(path("seg_single/log.json"))["run"]["tile_count"] == 1,
          "expected single tile");

    // Rerun determinism of segment artifacts.
    run("segment --image " + path("data/scene_0/image.png") + " --rf-model " + path("rf.json") +
        " --filter-model " + path("gbt.json") + " --out " + path("seg_rerun") +
        " --window 128 --stride 96 --workers 2");
    check(crc32_file(path("seg/labels.png")) == crc32_file(path("seg_rerun/labels.png")),
          "segment labels differ across reruns");
    check(crc32_file(path("seg/candidates.json")) ==
              crc32_file(path("seg_rerun/candidates.json")),
          "segment candidates differ across reruns");

    // Memory guard: tiny budget refuses with exit 4.
    check(run("segment --image " + path("data/scene_0/image.png") + " --rf-model " +
                  path("rf.json") + " --out " + path("seg_guard") +
                  " --window 192 --stride 192 --memory-budget-mb 1",
              false) == 4,
          "memory guard should exit 4");

    // evaluate single pair: prediction vs ground truth.
    run("evaluate --pred " + path("seg/labels.png") + " --gt " + path("data/scene_0/labels.png") +
        " --centroids " + path("data/scene_0/centroids.csv") + " --out " + path("eval"));
    check(fs::exists(path("eval/report.json")), "report.json missing");
    check(fs::exists(path("eval/report.txt")), "report.txt missing");
    check(fs::exists(path("eval/det_f1.csv")), "det_f1.csv missing");
    {
        const auto report = read_json(path("eval/report.json"));
        check(report.contains("det") && report.contains("seg") && report.contains("dice") &&
                  report.contains("rce"),
              "report fields missing");
    }

    // Perfect prediction scores 1 / 0.
    run("evaluate --pred " + path("data/scene_0/labels.png") + " --gt " +
        path("data/scene_0/labels.png") + " --centroids " + path("data/scene_0/centroids.csv") +
        " --out " + path("eval_perfect"));
    {
        const auto report = read_json(path("eval_perfect/report.json"));
        check(report["det"]["f1"] == 1.0, "perfect det-F1 != 1");
        check(report["seg"]["f1"] == 1.0, "perfect seg-F1 != 1");
        check(report["dice"] == 1.0, "perfect dice != 1");
        check(report["rce"] == 0.0, "perfect rce != 0");
    }

    // Batch evaluation: one report row and one det-F1 CSV line per scene.
    run("segment --image " + path("data/scene_1/image.png") + " --rf-model " + path("rf.json") +
        " --out " + path("segout/scene_1") + " --window 192 --stride 192");
    fs::create_directories(path("segout/scene_0"));
    fs::copy_file(path("seg_single/labels.png"), path("segout/scene_0/labels.png"));
    fs::create_directories(path("segout/scene_2"));
    fs::copy_file(path("seg_single/labels.png"), path("segout/scene_2/labels.png"));
    fs::create_directories(path("segout/scene_3"));
    fs::copy_file(path("seg_single/labels.png"), path("segout/scene_3/labels.png"));
    run("evaluate --pred-dir " + path("segout") + " --scenes " + path("data") + " --out " +
        path("eval_batch"));
    {
        std::ifstream in(path("eval_batch/det_f1.csv"));
        std::string line;
        int rows = 0;
        std::getline(in, line);
        check(line == "image,det_f1", "batch det_f1.csv header");
        while (std::getline(in, line))
            if (!line.empty()) ++rows;
        check(rows == 4, "expected 4 rows in batch det_f1.csv, got " + std::to_string(rows));
        const auto reports = read_json(path("eval_batch/report.json"));
        check(reports.is_array() && reports.size() == 4, "batch report.json should list 4 scenes");
    }

    // Missing inputs exit 2.
    check(run("segment --image " + path("nope.png") + " --rf-model " + path("rf.json") +
                  " --out " + path("x"),
              false) == 2,
          "missing image should exit 2");
    check(run("evaluate --out " + path("x"), false) == 2, "evaluate without inputs exits 2");

    // Config file: flags can come from a TOML-style document. The --config
    // option precedes the subcommand; command-line flags override the file.
    {
        std::ofstream cfg(path("plan.toml"));
        cfg << "[plan]\nwidth=5000\nheight=5000\nwindow=1340\nstride=1220\n";
    }
    run("--config " + path("plan.toml") + " plan --out " + path("plan_cfg.json"));
    check(read_json(path("plan_cfg.json"))["tile_count"] == 16, "config-file plan mismatch");

    run("--config " + path("plan.toml") + " plan --window 2500 --stride 2500 --out " +
        path("plan_cfg2.json"));
    check(read_json(path("plan_cfg2.json"))["tile_count"] == 4,
          "command line should override the config file");

    // Unknown config keys are rejected.
    {
        std::ofstream cfg(path("bad.toml"));
        cfg << "[plan]\nwidth=100\nheight=100\nbogus_key=1\n";
    }
    check(run("--config " + path("bad.toml") + " plan", false) == 2,
          "unknown config key should exit 2");

    if (g_failures == 0) {
        std::cout << "cli pipeline test passed\n";
        fs::remove_all(g_root);
        return 0;
    }
    std::cout << g_failures << " CLI check(s) failed; artifacts kept in " << g_root << "\n";
    return 1;
}
