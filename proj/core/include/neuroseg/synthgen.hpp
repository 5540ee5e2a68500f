#pragma once

#include <neuroseg/labelsynth.hpp>
#include <neuroseg/raster.hpp>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace neuroseg {

/// Parameters of one synthetic NeuN-like scene: brown elliptical somas on a
/// pale tissue background. The seed fixes everything.
struct SceneConfig {
    int width = 512;
    int height = 512;
    int n_cells = 60;
    double min_radius = 7.0;  // semi-major axis, px
    double max_radius = 14.0;
    double min_aspect = 0.55; // semi-minor / semi-major
    double max_aspect = 1.0;
    double touch_probability = 0.25;
    std::array<std::uint8_t, 3> cell_color_mean = {123, 79, 46};
    double cell_color_sigma = 12.0;
    std::array<std::uint8_t, 3> background_color_mean = {232, 221, 205};
    double background_color_sigma = 4.0;
    double noise_sigma = 6.0;
    double min_visible_fraction = 0.5; // occlusion guarantee per cell
    int max_placement_retries = 40;
    std::uint64_t seed = 0;

    std::string to_json() const;
    static SceneConfig from_json(const std::string& text);
};

/// Geometry of one placed cell, kept for validation and debugging.
struct CellInfo {
    std::uint32_t id = 0;
    double center_x = 0.0;
    double center_y = 0.0;
    double semi_major = 0.0;
    double semi_minor = 0.0;
    double angle_cos = 1.0;
    double angle_sin = 0.0;
    std::size_t unoccluded_area = 0; // ellipse pixel count before occlusion
};

struct Scene {
    RasterImage image;
    InstanceLabelMap labels;
    PointAnnotationSet centroids;
    std::vector<CellInfo> cells; // index i holds cell id i+1
    int requested_cells = 0;
    int placed_cells = 0; // < requested_cells when placement gave up
};

/// Deterministic scene synthesis. Cells are rotated ellipses with a smooth
/// intensity falloff toward the rim. Later cells may partially occlude
/// earlier ones but every placed cell keeps at least min_visible_fraction of
/// its unoccluded area, and no existing centroid is ever painted over.
/// Centroids are the ellipse centers of placed cells.
Scene generate_scene(const SceneConfig& config);

enum class Density { Sparse, Dense, VeryDense };

const char* density_name(Density d);
Density density_from_name(const std::string& name);

/// Preset emulating sparse / dense / very dense anatomical regions.
SceneConfig preset_scene(Density density, int width, int height, std::uint64_t seed);

/// A named scene of a dataset grid.
struct DatasetScene {
    std::string name; // directory name, e.g. "scene_0"
    SceneConfig config;
};

/// Generate scenes under out_dir/<name>/{image.png,labels.png,centroids.csv}
/// and write a manifest.json recording configs, seeds, placed counts and
/// CRC-32 checksums of every artifact. Returns the manifest JSON text.
std::string generate_dataset(const std::vector<DatasetScene>& scenes, const std::string& out_dir);

} // namespace neuroseg
