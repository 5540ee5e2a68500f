#include <neuroseg/csv_io.hpp>

#include <charconv>
#include <fstream>
#include <sstream>

namespace neuroseg {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    return out;
}

std::ifstream open_or_throw(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw InputError(std::string(what) + ": cannot open " + path);
    return in;
}

long parse_long(const std::string& s, const std::string& path) {
    long v = 0;
    const auto* first = s.data();
    const auto* last = s.data() + s.size();
    while (first != last && *first == ' ') ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{}) throw InputError("malformed integer '" + s + "' in " + path);
    return v;
}

double parse_double(const std::string& s, const std::string& path) {
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw InputError("malformed number '" + s + "' in " + path);
    }
}

} // namespace

void write_centroids_csv(const std::string& path, const PointAnnotationSet& points) {
    std::ofstream out(path);
    if (!out) throw InputError("write_centroids_csv: cannot open " + path);
    out << "id,x,y\n";
    for (const auto& p : points.points) out << p.id << "," << p.x << "," << p.y << "\n";
    if (!out) throw InputError("write_centroids_csv: write failed " + path);
}

PointAnnotationSet read_centroids_csv(const std::string& path, int width, int height) {
    auto in = open_or_throw(path, "read_centroids_csv");
    PointAnnotationSet set;
    set.width = width;
    set.height = height;
    std::string line;
    if (!std::getline(in, line)) throw InputError("read_centroids_csv: empty file " + path);
    if (line.rfind("id,x,y", 0) != 0)
        throw InputError("read_centroids_csv: expected header 'id,x,y' in " + path);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 3)
            throw InputError("read_centroids_csv: expected 3 columns in " + path);
        PointAnnotation p;
        p.id = static_cast<std::uint32_t>(parse_long(fields[0], path));
        p.x = static_cast<int>(parse_long(fields[1], path));
        p.y = static_cast<int>(parse_long(fields[2], path));
        set.points.push_back(p);
    }
    set.validate();
    return set;
}

void write_rf_samples_csv(const std::string& path, const std::vector<PixelFeatures>& features,
                          const std::vector<std::uint8_t>& labels) {
    if (features.size() != labels.size())
        throw InputError("write_rf_samples_csv: features/labels size mismatch");
    std::ofstream out(path);
    if (!out) throw InputError("write_rf_samples_csv: cannot open " + path);
    out << "h,s,v,local_intensity,label\n";
    for (std::size_t i = 0; i < features.size(); ++i) {
        const auto& f = features[i];
        out << int(f.h) << "," << int(f.s) << "," << int(f.v) << "," << int(f.local_intensity)
            << "," << int(labels[i] ? 1 : 0) << "\n";
    }
    if (!out) throw InputError("write_rf_samples_csv: write failed " + path);
}

std::pair<std::vector<PixelFeatures>, std::vector<std::uint8_t>> read_rf_samples_csv(
    const std::string& path) {
    auto in = open_or_throw(path, "read_rf_samples_csv");
    std::string line;
    if (!std::getline(in, line)) throw InputError("read_rf_samples_csv: empty file " + path);
    if (line.rfind("h,s,v,local_intensity,label", 0) != 0)
        throw InputError("read_rf_samples_csv: unexpected header in " + path);
    std::vector<PixelFeatures> features;
    std::vector<std::uint8_t> labels;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != 5)
            throw InputError("read_rf_samples_csv: expected 5 columns in " + path);
        auto u8 = [&](const std::string& s) {
            const long v = parse_long(s, path);
            if (v < 0 || v > 255) throw InputError("read_rf_samples_csv: value out of [0,255]");
            return static_cast<std::uint8_t>(v);
        };
        features.push_back({u8(fields[0]), u8(fields[1]), u8(fields[2]), u8(fields[3])});
        labels.push_back(parse_long(fields[4], path) != 0 ? 1 : 0);
    }
    return {std::move(features), std::move(labels)};
}

void write_gbt_table_csv(const std::string& path,
                         const std::vector<CandidateFeatureVector>& features,
                         const std::vector<double>& targets) {
    if (features.size() != targets.size())
        throw InputError("write_gbt_table_csv: features/targets size mismatch");
    std::ofstream out(path);
    if (!out) throw InputError("write_gbt_table_csv: cannot open " + path);
    for (std::size_t i = 0; i < kCandidateFeatureNames.size(); ++i)
        out << kCandidateFeatureNames[i] << ",";
    out << "iou\n";
    out.precision(17);
    for (std::size_t i = 0; i < features.size(); ++i) {
        for (std::size_t f = 0; f < CandidateFeatureVector::size(); ++f)
            out << features[i][f] << ",";
        out << targets[i] << "\n";
    }
    if (!out) throw InputError("write_gbt_table_csv: write failed " + path);
}

std::pair<std::vector<CandidateFeatureVector>, std::vector<double>> read_gbt_table_csv(
    const std::string& path) {
    auto in = open_or_throw(path, "read_gbt_table_csv");
    std::string line;
    if (!std::getline(in, line)) throw InputError("read_gbt_table_csv: empty file " + path);
    std::vector<CandidateFeatureVector> features;
    std::vector<double> targets;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != CandidateFeatureVector::size() + 1)
            throw InputError("read_gbt_table_csv: wrong column count in " + path);
        CandidateFeatureVector f;
        f.area = parse_double(fields[0], path);
        f.perimeter = parse_double(fields[1], path);
        f.circularity = parse_double(fields[2], path);
        f.mean_interior = parse_double(fields[3], path);
        f.mean_contour = parse_double(fields[4], path);
        f.contact_ratio = parse_double(fields[5], path);
        f.bbox_fill = parse_double(fields[6], path);
        features.push_back(f);
        targets.push_back(parse_double(fields[7], path));
    }
    return {std::move(features), std::move(targets)};
}

void write_det_f1_csv(const std::string& path,
                      const std::vector<std::pair<std::string, double>>& rows) {
    std::ofstream out(path);
    if (!out) throw InputError("write_det_f1_csv: cannot open " + path);
    out << "image,det_f1\n";
    out.precision(17);
    for (const auto& [name, f1] : rows) out << name << "," << f1 << "\n";
    if (!out) throw InputError("write_det_f1_csv: write failed " + path);
}

} // namespace neuroseg
