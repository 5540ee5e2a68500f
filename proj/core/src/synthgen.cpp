#include <neuroseg/synthgen.hpp>

#include <neuroseg/checksum.hpp>
#include <neuroseg/csv_io.hpp>
#include <neuroseg/png_io.hpp>
#include <neuroseg/rng.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <unordered_map>

namespace neuroseg {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Ellipse {
    double cx = 0.0, cy = 0.0;
    double a = 1.0, b = 1.0; // semi axes
    double cos_t = 1.0, sin_t = 0.0;

    // Normalized squared elliptical radius; <= 1 inside.
    double rho2(double x, double y) const {
        const double dx = x - cx, dy = y - cy;
        const double u = (dx * cos_t + dy * sin_t) / a;
        const double v = (-dx * sin_t + dy * cos_t) / b;
        return u * u + v * v;
    }
};

std::vector<std::size_t> ellipse_pixels(const Ellipse& e, int w, int h) {
    std::vector<std::size_t> out;
    const int x0 = std::max(0, static_cast<int>(std::floor(e.cx - e.a - 1)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(e.cx + e.a + 1)));
    const int y0 = std::max(0, static_cast<int>(std::floor(e.cy - e.a - 1)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(e.cy + e.a + 1)));
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x)
            if (e.rho2(x, y) <= 1.0) out.push_back(static_cast<std::size_t>(y) * w + x);
    return out;
}

std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
}

} // namespace

Scene generate_scene(const SceneConfig& cfg) {
    if (cfg.width < 1 || cfg.height < 1) throw InputError("generate_scene: empty scene");
    if (cfg.n_cells < 0) throw InputError("generate_scene: negative cell count");
    if (cfg.min_radius <= 0 || cfg.max_radius < cfg.min_radius)
        throw InputError("generate_scene: invalid radius range");
    if (cfg.min_aspect <= 0 || cfg.max_aspect < cfg.min_aspect || cfg.max_aspect > 1.0)
        throw InputError("generate_scene: invalid aspect range");
    const int margin = static_cast<int>(std::ceil(cfg.max_radius)) + 2;
    if (cfg.n_cells > 0 && (cfg.width <= 2 * margin || cfg.height <= 2 * margin))
        throw InputError("generate_scene: scene too small for the radius range");

    Rng rng(cfg.seed);
    const int w = cfg.width, h = cfg.height;

    Scene scene;
    scene.requested_cells = cfg.n_cells;
    scene.labels = InstanceLabelMap(w, h);
    scene.centroids.width = w;
    scene.centroids.height = h;

    struct Placed {
        Ellipse shape;
        std::size_t unoccluded = 0;
        std::size_t visible = 0;
        int cx = 0, cy = 0;
    };
    std::vector<Placed> placed; // index i holds cell id i+1

    for (int k = 0; k < cfg.n_cells; ++k) {
        bool accepted = false;
        for (int attempt = 0; attempt < cfg.max_placement_retries && !accepted; ++attempt) {
            Ellipse e;
            e.a = rng.uniform(cfg.min_radius, cfg.max_radius);
            e.b = e.a * rng.uniform(cfg.min_aspect, cfg.max_aspect);
            const double theta = rng.uniform(0.0, kPi);
            e.cos_t = std::cos(theta);
            e.sin_t = std::sin(theta);

            const bool touch = !placed.empty() && rng.bernoulli(cfg.touch_probability);
            if (touch) {
                // Abutting somas: centers close to the sum of the semi-major
                // axes. Clamping into the margin box would drag the pair
                // toward concentric, so such attempts are retried instead.
                const std::size_t j = rng.uniform_index(placed.size());
                const double phi = rng.uniform(0.0, 2.0 * kPi);
                const double dist = (placed[j].shape.a + e.a) * rng.uniform(0.85, 1.0);
                e.cx = placed[j].shape.cx + dist * std::cos(phi);
                e.cy = placed[j].shape.cy + dist * std::sin(phi);
                if (e.cx < margin || e.cx > w - 1 - margin || e.cy < margin ||
                    e.cy > h - 1 - margin)
                    continue;
            } else {
                e.cx = rng.uniform(double(margin), double(w - 1 - margin));
                e.cy = rng.uniform(double(margin), double(h - 1 - margin));
            }

            // Somas are solid: reject deep interpenetration anywhere.
            bool too_close = false;
            for (const auto& p : placed) {
                const double dx = e.cx - p.shape.cx, dy = e.cy - p.shape.cy;
                const double min_dist = 0.82 * (p.shape.a + e.a);
                if (dx * dx + dy * dy < min_dist * min_dist) {
                    too_close = true;
                    break;
                }
            }
            if (too_close) continue;

            const auto pixels = ellipse_pixels(e, w, h);
            if (pixels.empty()) continue;

            // Occlusion bookkeeping against already placed cells.
            std::unordered_map<std::uint32_t, std::size_t> overlap;
            for (const auto i : pixels) {
                const std::uint32_t id = scene.labels.labels[i];
                if (id != 0) ++overlap[id];
            }
            bool ok = true;
            for (const auto& [id, cnt] : overlap) {
                const Placed& p = placed[id - 1];
                if (static_cast<double>(p.visible - cnt) <
                    cfg.min_visible_fraction * static_cast<double>(p.unoccluded)) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                // Never paint over an existing centroid (2-px protection disk).
                for (const auto& p : placed) {
                    for (int dy = -2; dy <= 2 && ok; ++dy)
                        for (int dx = -2; dx <= 2; ++dx) {
                            if (dx * dx + dy * dy > 4) continue;
                            const int px = p.cx + dx, py = p.cy + dy;
                            if (px < 0 || py < 0 || px >= w || py >= h) continue;
                            if (e.rho2(px, py) <= 1.0) {
                                ok = false;
                                break;
                            }
                        }
                    if (!ok) break;
                }
            }
            if (!ok) continue;

            const std::uint32_t id = static_cast<std::uint32_t>(placed.size() + 1);
            for (const auto& [oid, cnt] : overlap) placed[oid - 1].visible -= cnt;
            for (const auto i : pixels) scene.labels.labels[i] = id;

            Placed p;
            p.shape = e;
            p.unoccluded = pixels.size();
            p.visible = pixels.size();
            p.cx = static_cast<int>(std::lround(e.cx));
            p.cy = static_cast<int>(std::lround(e.cy));
            placed.push_back(p);
            accepted = true;
        }
    }
    scene.placed_cells = static_cast<int>(placed.size());
    for (std::size_t i = 0; i < placed.size(); ++i) {
        scene.centroids.points.push_back(
            {placed[i].cx, placed[i].cy, static_cast<std::uint32_t>(i + 1)});
        CellInfo info;
        info.id = static_cast<std::uint32_t>(i + 1);
        info.center_x = placed[i].shape.cx;
        info.center_y = placed[i].shape.cy;
        info.semi_major = placed[i].shape.a;
        info.semi_minor = placed[i].shape.b;
        info.angle_cos = placed[i].shape.cos_t;
        info.angle_sin = placed[i].shape.sin_t;
        info.unoccluded_area = placed[i].unoccluded;
        scene.cells.push_back(info);
    }

    // Render: tissue background with a soft illumination wave, then cells
    // with rim falloff toward the local background tone.
    scene.image = RasterImage(w, h, 3);
    std::array<double, 3> bg_tone;
    for (int c = 0; c < 3; ++c)
        bg_tone[c] = cfg.background_color_mean[c] + rng.normal(0.0, cfg.background_color_sigma);
    const double wave_phase = rng.uniform(0.0, 2.0 * kPi);
    const double wave_fx = rng.uniform(0.5, 1.5) / std::max(1, w);
    const double wave_fy = rng.uniform(0.5, 1.5) / std::max(1, h);

    std::vector<std::array<double, 3>> cell_color(placed.size());
    for (auto& col : cell_color)
        for (int c = 0; c < 3; ++c)
            col[c] = cfg.cell_color_mean[c] + rng.normal(0.0, cfg.cell_color_sigma);

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double wave =
                4.0 * std::sin(2.0 * kPi * (x * wave_fx + y * wave_fy) + wave_phase);
            const std::uint32_t id = scene.labels.at(x, y);
            for (int c = 0; c < 3; ++c) {
                double value = bg_tone[c] + wave;
                if (id != 0) {
                    const Placed& p = placed[id - 1];
                    const double rho = std::sqrt(std::max(0.0, p.shape.rho2(x, y)));
                    // Solid soma core, blending toward tissue near the rim.
                    double mix = 0.0;
                    if (rho > 0.62) mix = std::min(1.0, (rho - 0.62) / 0.38) * 0.55;
                    value = cell_color[id - 1][c] * (1.0 - mix) + value * mix;
                }
                value += rng.normal(0.0, cfg.noise_sigma);
                scene.image.at(x, y, c) = clamp_u8(value);
            }
        }
    }
    return scene;
}

const char* density_name(Density d) {
    switch (d) {
        case Density::Sparse: return "sparse";
        case Density::Dense: return "dense";
        default: return "very-dense";
    }
}

Density density_from_name(const std::string& name) {
    if (name == "sparse") return Density::Sparse;
    if (name == "dense") return Density::Dense;
    if (name == "very-dense" || name == "very_dense") return Density::VeryDense;
    throw InputError("unknown density '" + name + "' (sparse|dense|very-dense)");
}

SceneConfig preset_scene(Density density, int width, int height, std::uint64_t seed) {
    SceneConfig cfg;
    cfg.width = width;
    cfg.height = height;
    cfg.seed = seed;
    const double px = static_cast<double>(width) * height;
    switch (density) {
        case Density::Sparse:
            cfg.n_cells = static_cast<int>(px / 7000.0);
            cfg.touch_probability = 0.10;
            break;
        case Density::Dense:
            cfg.n_cells = static_cast<int>(px / 3200.0);
            cfg.touch_probability = 0.45;
            break;
        case Density::VeryDense:
            cfg.n_cells = static_cast<int>(px / 1800.0);
            cfg.touch_probability = 0.75;
            break;
    }
    return cfg;
}

std::string SceneConfig::to_json() const {
    nlohmann::json j;
    j["width"] = width;
    j["height"] = height;
    j["n_cells"] = n_cells;
    j["min_radius"] = min_radius;
    j["max_radius"] = max_radius;
    j["min_aspect"] = min_aspect;
    j["max_aspect"] = max_aspect;
    j["touch_probability"] = touch_probability;
    j["cell_color_mean"] = cell_color_mean;
    j["cell_color_sigma"] = cell_color_sigma;
    j["background_color_mean"] = background_color_mean;
    j["background_color_sigma"] = background_color_sigma;
    j["noise_sigma"] = noise_sigma;
    j["min_visible_fraction"] = min_visible_fraction;
    j["max_placement_retries"] = max_placement_retries;
    j["seed"] = seed;
    return j.dump();
}

SceneConfig SceneConfig::from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("SceneConfig: parse error: ") + e.what());
    }
    SceneConfig cfg;
    cfg.width = j.at("width").get<int>();
    cfg.height = j.at("height").get<int>();
    cfg.n_cells = j.at("n_cells").get<int>();
    cfg.min_radius = j.at("min_radius").get<double>();
    cfg.max_radius = j.at("max_radius").get<double>();
    cfg.min_aspect = j.at("min_aspect").get<double>();
    cfg.max_aspect = j.at("max_aspect").get<double>();
    cfg.touch_probability = j.at("touch_probability").get<double>();
    cfg.cell_color_mean = j.at("cell_color_mean").get<std::array<std::uint8_t, 3>>();
    cfg.cell_color_sigma = j.at("cell_color_sigma").get<double>();
    cfg.background_color_mean = j.at("background_color_mean").get<std::array<std::uint8_t, 3>>();
    cfg.background_color_sigma = j.at("background_color_sigma").get<double>();
    cfg.noise_sigma = j.at("noise_sigma").get<double>();
    cfg.min_visible_fraction = j.at("min_visible_fraction").get<double>();
    cfg.max_placement_retries = j.at("max_placement_retries").get<int>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    return cfg;
}

std::string generate_dataset(const std::vector<DatasetScene>& scenes,
                             const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    nlohmann::json manifest;
    manifest["generator"] = "neuroseg-synthgen";
    manifest["version"] = 1;
    nlohmann::json entries = nlohmann::json::array();

    for (const auto& ds : scenes) {
        const fs::path dir = fs::path(out_dir) / ds.name;
        fs::create_directories(dir);
        const Scene scene = generate_scene(ds.config);

        const std::string image_path = (dir / "image.png").string();
        const std::string labels_path = (dir / "labels.png").string();
        const std::string centroids_path = (dir / "centroids.csv").string();
        write_png(image_path, scene.image);
        const std::string labels_written = save_label_map(labels_path, scene.labels);
        write_centroids_csv(centroids_path, scene.centroids);

        nlohmann::json entry;
        entry["name"] = ds.name;
        entry["seed"] = ds.config.seed;
        entry["config"] = nlohmann::json::parse(ds.config.to_json());
        entry["cells_requested"] = scene.requested_cells;
        entry["cells_placed"] = scene.placed_cells;
        nlohmann::json files;
        files[fs::path(image_path).filename().string()] = crc32_hex(crc32_file(image_path));
        files[fs::path(labels_written).filename().string()] =
            crc32_hex(crc32_file(labels_written));
        files[fs::path(centroids_path).filename().string()] =
            crc32_hex(crc32_file(centroids_path));
        entry["files"] = std::move(files);
        entries.push_back(std::move(entry));
    }
    manifest["scenes"] = std::move(entries);

    const std::string text = manifest.dump(2);
    std::ofstream out(fs::path(out_dir) / "manifest.json");
    if (!out) throw InputError("generate_dataset: cannot write manifest in " + out_dir);
    out << text << "\n";
    return text;
}

} // namespace neuroseg
