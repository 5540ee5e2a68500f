#pragma once

#include <neuroseg/features.hpp>
#include <neuroseg/labelsynth.hpp>
#include <neuroseg/postfilter.hpp>

#include <string>
#include <vector>

namespace neuroseg {

/// Centroids file: header `id,x,y`, one row per point.
void write_centroids_csv(const std::string& path, const PointAnnotationSet& points);
/// `width`/`height` set the bounds the points are validated against.
PointAnnotationSet read_centroids_csv(const std::string& path, int width, int height);

/// Pixel training samples: header `h,s,v,local_intensity,label`.
void write_rf_samples_csv(const std::string& path, const std::vector<PixelFeatures>& features,
                          const std::vector<std::uint8_t>& labels);
std::pair<std::vector<PixelFeatures>, std::vector<std::uint8_t>> read_rf_samples_csv(
    const std::string& path);

/// Candidate regression table: feature columns plus `iou` target.
void write_gbt_table_csv(const std::string& path,
                         const std::vector<CandidateFeatureVector>& features,
                         const std::vector<double>& targets);
std::pair<std::vector<CandidateFeatureVector>, std::vector<double>> read_gbt_table_csv(
    const std::string& path);

/// Per-image detection score export: header `image,det_f1`.
void write_det_f1_csv(const std::string& path,
                      const std::vector<std::pair<std::string, double>>& rows);

} // namespace neuroseg
