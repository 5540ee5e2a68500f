#include <neuroseg/synthgen.hpp>

#include <neuroseg/checksum.hpp>

#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <map>

using namespace neuroseg;

TEST_CASE("zero cells gives a blank scene") {
    SceneConfig cfg;
    cfg.width = 96;
    cfg.height = 64;
    cfg.n_cells = 0;
    cfg.seed = 1;
    const Scene scene = generate_scene(cfg);
    CHECK(scene.placed_cells == 0);
    CHECK(scene.centroids.points.empty());
    for (const auto l : scene.labels.labels) CHECK(l == 0);
    CHECK(scene.image.width == 96);
    CHECK(scene.image.height == 64);
}

TEST_CASE("the same seed reproduces the scene bit-identically") {
    SceneConfig cfg;
    cfg.width = 160;
    cfg.height = 120;
    cfg.n_cells = 18;
    cfg.seed = 20240517;
    const Scene a = generate_scene(cfg);
    const Scene b = generate_scene(cfg);
    CHECK(a.image.samples == b.image.samples);
    CHECK(a.labels.labels == b.labels.labels);
    REQUIRE(a.centroids.points.size() == b.centroids.points.size());
    for (std::size_t i = 0; i < a.centroids.points.size(); ++i) {
        CHECK(a.centroids.points[i].x == b.centroids.points[i].x);
        CHECK(a.centroids.points[i].y == b.centroids.points[i].y);
        CHECK(a.centroids.points[i].id == b.centroids.points[i].id);
    }

    cfg.seed = 20240518;
    const Scene c = generate_scene(cfg);
    CHECK(a.image.samples != c.image.samples);
}

TEST_CASE("centroid ids recount to the label map ids") {
    SceneConfig cfg;
    cfg.width = 256;
    cfg.height = 256;
    cfg.n_cells = 40;
    cfg.touch_probability = 0.5;
    cfg.seed = 99;
    const Scene scene = generate_scene(cfg);

    std::vector<std::uint32_t> centroid_ids;
    for (const auto& p : scene.centroids.points) centroid_ids.push_back(p.id);
    CHECK(centroid_ids == scene.labels.ids());
    CHECK(scene.centroids.points.size() == static_cast<std::size_t>(scene.placed_cells));
}

TEST_CASE("every centroid sits on its own instance") {
    SceneConfig cfg;
    cfg.width = 224;
    cfg.height = 224;
    cfg.n_cells = 42;
    cfg.touch_probability = 0.7;
    cfg.seed = 7;
    const Scene scene = generate_scene(cfg);
    for (const auto& p : scene.centroids.points) CHECK(scene.labels.at(p.x, p.y) == p.id);
}

TEST_CASE("cells keep at least half of their unoccluded area visible") {
    SceneConfig cfg;
    cfg.width = 224;
    cfg.height = 224;
    cfg.n_cells = 60;
    cfg.touch_probability = 0.8; // force heavy crowding
    cfg.seed = 1234;
    const Scene scene = generate_scene(cfg);

    std::map<std::uint32_t, std::size_t> visible;
    for (const auto l : scene.labels.labels)
        if (l != 0) ++visible[l];

    REQUIRE(scene.cells.size() == static_cast<std::size_t>(scene.placed_cells));
    for (const auto& cell : scene.cells) {
        CHECK(cell.unoccluded_area > 0);
        CHECK(static_cast<double>(visible[cell.id]) >=
              cfg.min_visible_fraction * static_cast<double>(cell.unoccluded_area));

        // The recorded unoccluded area matches the ellipse rasterization.
        std::size_t recount = 0;
        for (int y = 0; y < cfg.height; ++y)
            for (int x = 0; x < cfg.width; ++x) {
                const double dx = x - cell.center_x, dy = y - cell.center_y;
                const double u = (dx * cell.angle_cos + dy * cell.angle_sin) / cell.semi_major;
                const double v = (-dx * cell.angle_sin + dy * cell.angle_cos) / cell.semi_minor;
                if (u * u + v * v <= 1.0) ++recount;
            }
        CHECK(recount == cell.unoccluded_area);
    }
}

TEST_CASE("density presets order the cell counts") {
    const auto sparse = preset_scene(Density::Sparse, 512, 512, 1);
    const auto dense = preset_scene(Density::Dense, 512, 512, 1);
    const auto very = preset_scene(Density::VeryDense, 512, 512, 1);
    CHECK(sparse.n_cells < dense.n_cells);
    CHECK(dense.n_cells < very.n_cells);
    CHECK(sparse.touch_probability < very.touch_probability);
    CHECK(density_from_name("sparse") == Density::Sparse);
    CHECK(density_from_name(density_name(Density::VeryDense)) == Density::VeryDense);
    CHECK_THROWS_AS(density_from_name("medium"), InputError);
}

TEST_CASE("scene config round-trips through JSON") {
    SceneConfig cfg;
    cfg.width = 123;
    cfg.n_cells = 7;
    cfg.touch_probability = 0.33;
    cfg.seed = 42;
    const auto back = SceneConfig::from_json(cfg.to_json());
    CHECK(back.width == cfg.width);
    CHECK(back.n_cells == cfg.n_cells);
    CHECK(back.touch_probability == doctest::Approx(cfg.touch_probability));
    CHECK(back.seed == cfg.seed);
}

TEST_CASE("generate_dataset writes scenes, manifest and matching checksums") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "neuroseg_dataset_test";
    fs::remove_all(dir);

    std::vector<DatasetScene> scenes;
    int k = 0;
    for (const auto density : {Density::Sparse, Density::Dense, Density::VeryDense})
        for (const std::uint64_t seed : {11ull, 22ull})
            scenes.push_back(
                {"scene_" + std::to_string(k++), preset_scene(density, 160, 160, seed)});

    const auto manifest_text = generate_dataset(scenes, dir.string());
    const auto manifest = nlohmann::json::parse(manifest_text);
    REQUIRE(manifest["scenes"].size() == 6);

    for (const auto& entry : manifest["scenes"]) {
        const fs::path scene_dir = dir / entry["name"].get<std::string>();
        for (const auto& [file, crc] : entry["files"].items()) {
            const fs::path p = scene_dir / file;
            REQUIRE(fs::exists(p));
            CHECK(crc32_hex(crc32_file(p.string())) == crc.get<std::string>());
        }
    }
    CHECK(fs::exists(dir / "manifest.json"));
    fs::remove_all(dir);
}
