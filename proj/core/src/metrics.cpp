#include <neuroseg/metrics.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace neuroseg {

EvalCounts match_detections(const InstanceLabelMap& pred, const PointAnnotationSet& centroids) {
    if (centroids.width > pred.width || centroids.height > pred.height)
        throw DimensionError("match_detections: centroid bounds exceed prediction map");
    centroids.validate();

    // Count centroids per predicted instance.
    std::unordered_map<std::uint32_t, std::size_t> hits;
    std::vector<std::uint32_t> centroid_instance(centroids.points.size());
    for (std::size_t i = 0; i < centroids.points.size(); ++i) {
        const auto& p = centroids.points[i];
        const std::uint32_t label = pred.at(p.x, p.y);
        centroid_instance[i] = label;
        if (label != 0) ++hits[label];
    }

    EvalCounts counts;
    std::unordered_set<std::uint32_t> tp_instances;
    for (const auto id : pred.ids()) {
        const auto it = hits.find(id);
        const std::size_t k = it == hits.end() ? 0 : it->second;
        if (k == 1) {
            ++counts.tp;
            tp_instances.insert(id);
        } else {
            ++counts.fp;
        }
    }
    for (std::size_t i = 0; i < centroids.points.size(); ++i)
        if (centroid_instance[i] == 0 || !tp_instances.count(centroid_instance[i])) ++counts.fn;
    return counts;
}

EvalCounts match_instances_iou(const InstanceLabelMap& pred, const InstanceLabelMap& gt,
                               double iou_thresh) {
    require_same_dims(pred, gt, "match_instances_iou");

    // Contingency table of co-occurring (pred, gt) label pairs.
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> inter;
    std::unordered_map<std::uint32_t, std::size_t> pred_area, gt_area;
    for (std::size_t i = 0; i < pred.labels.size(); ++i) {
        const std::uint32_t p = pred.labels[i], g = gt.labels[i];
        if (p != 0) ++pred_area[p];
        if (g != 0) ++gt_area[g];
        if (p != 0 && g != 0) ++inter[{p, g}];
    }

    std::unordered_set<std::uint32_t> matched_pred, matched_gt;
    for (const auto& [pair, overlap] : inter) {
        const auto [p, g] = pair;
        const std::size_t uni = pred_area[p] + gt_area[g] - overlap;
        const double iou = static_cast<double>(overlap) / static_cast<double>(uni);
        if (iou > iou_thresh) {
            if (matched_pred.count(p) || matched_gt.count(g))
                throw InvariantError("match_instances_iou: matching is not one-to-one at "
                                     "threshold " +
                                     std::to_string(iou_thresh));
            matched_pred.insert(p);
            matched_gt.insert(g);
        }
    }

    EvalCounts counts;
    counts.tp = matched_pred.size();
    counts.fp = pred_area.size() - matched_pred.size();
    counts.fn = gt_area.size() - matched_gt.size();
    return counts;
}

Scores precision_recall_f1(const EvalCounts& c) {
    Scores s;
    s.precision = (c.tp + c.fp) > 0
                      ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp)
                      : (c.fn == 0 ? 1.0 : 0.0);
    s.recall = (c.tp + c.fn) > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn)
                                 : (c.fp == 0 ? 1.0 : 0.0);
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    return s;
}

double dice(const SemanticMask& pred, const SemanticMask& gt) {
    require_same_dims(pred, gt, "dice");
    std::size_t inter = 0, a = 0, b = 0;
    for (std::size_t i = 0; i < pred.bits.size(); ++i) {
        const bool pa = pred.bits[i] != 0, ga = gt.bits[i] != 0;
        a += pa;
        b += ga;
        inter += pa && ga;
    }
    if (a + b == 0) return 1.0;
    return 2.0 * static_cast<double>(inter) / static_cast<double>(a + b);
}

double rce(std::size_t n_detected, std::size_t n_expert) {
    if (n_expert == 0) throw InputError("rce: expert count must be >= 1");
    const double na = static_cast<double>(n_detected), ne = static_cast<double>(n_expert);
    return std::abs(na - ne) / ne;
}

EvalReport evaluate(const InstanceLabelMap& pred, const InstanceLabelMap& gt,
                    const PointAnnotationSet& centroids, double iou_thresh) {
    EvalReport report;
    report.det = precision_recall_f1(match_detections(pred, centroids));
    report.seg = precision_recall_f1(match_instances_iou(pred, gt, iou_thresh));
    report.dice = dice(pred.foreground(), gt.foreground());
    report.n_detected = pred.ids().size();
    report.n_expert = centroids.points.size();
    report.rce = rce(report.n_detected, report.n_expert);
    return report;
}

std::string EvalReport::to_json() const {
    nlohmann::json doc;
    doc["det"] = {{"precision", det.precision}, {"recall", det.recall}, {"f1", det.f1}};
    doc["seg"] = {{"precision", seg.precision}, {"recall", seg.recall}, {"f1", seg.f1}};
    doc["dice"] = dice;
    doc["rce"] = rce;
    doc["n_detected"] = n_detected;
    doc["n_expert"] = n_expert;
    return doc.dump(2);
}

std::string EvalReport::to_table(const std::string& name) const {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof(line), "%-20s %8s %8s %8s %8s\n", "Model", "det-F1", "seg-F1",
                  "Dice", "RCE");
    out << line;
    std::snprintf(line, sizeof(line), "%-20s %8.3f %8.3f %8.3f %8.3f\n", name.c_str(), det.f1,
                  seg.f1, dice, rce);
    out << line;
    return out.str();
}

} // namespace neuroseg
