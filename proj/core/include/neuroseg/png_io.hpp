#pragma once

#include <neuroseg/raster.hpp>

#include <string>

namespace neuroseg {

/// Write an 8-bit gray or RGB image.
void write_png(const std::string& path, const RasterImage& image);

/// Read an 8-bit PNG. Gray stays 1-channel; RGB/RGBA/palette become 3-channel
/// (alpha stripped); 16-bit input is rejected here, use load_label_map.
RasterImage read_png(const std::string& path);

/// Label maps: 16-bit gray PNG when all ids fit in 65535, otherwise a
/// run-length-encoded text sidecar with one `label x y runlength` line per
/// horizontal run. `path` should end in ".png"; the sidecar replaces the
/// extension with ".rle". Returns the path actually written.
std::string save_label_map(const std::string& path, const InstanceLabelMap& map);

/// Load from either representation. Pass the ".png" path; falls back to the
/// ".rle" sidecar if the PNG does not exist.
InstanceLabelMap load_label_map(const std::string& path);

/// Three-class masks as 8-bit gray PNG with values {0 background, 1 interior,
/// 2 contour}.
void save_three_class_mask(const std::string& path, const ThreeClassMask& mask);
ThreeClassMask load_three_class_mask(const std::string& path);

/// Semantic masks as 8-bit gray PNG, 0/255.
void save_mask(const std::string& path, const SemanticMask& mask);
SemanticMask load_mask(const std::string& path);

} // namespace neuroseg
