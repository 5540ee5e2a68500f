#include <neuroseg/postfilter.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

namespace neuroseg {

const std::array<const char*, 7> kCandidateFeatureNames = {
    "area",         "perimeter",     "circularity", "mean_interior",
    "mean_contour", "contact_ratio", "bbox_fill"};

std::vector<CandidateFeatureVector> extract_candidate_features(const CandidateSet& cands,
                                                               const ClassProbMaps& maps) {
    maps.require_consistent();
    require_same_dims(cands.instances, maps.interior, "extract_candidate_features");

    const auto& labels = cands.instances;
    const int w = labels.width, h = labels.height;

    struct Acc {
        std::size_t boundary = 0;
        std::size_t contact = 0;
        double sum_interior = 0.0;
        double sum_contour = 0.0;
    };
    std::unordered_map<std::uint32_t, Acc> accs;

    constexpr int dx4[4] = {1, -1, 0, 0};
    constexpr int dy4[4] = {0, 0, 1, -1};
    constexpr int dx8[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    constexpr int dy8[8] = {0, 0, 1, -1, 1, -1, 1, -1};

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::uint32_t id = labels.at(x, y);
            if (id == 0) continue;
            Acc& a = accs[id];
            const std::size_t i = labels.index(x, y);
            a.sum_interior += maps.interior.values[i];
            a.sum_contour += maps.contour.values[i];

            // Boundary: any 4-neighbor (or the outside) not of this label.
            bool boundary = false;
            for (int d = 0; d < 4 && !boundary; ++d) {
                const int nx = x + dx4[d], ny = y + dy4[d];
                boundary = nx < 0 || ny < 0 || nx >= w || ny >= h || labels.at(nx, ny) != id;
            }
            if (!boundary) continue;
            ++a.boundary;
            for (int d = 0; d < 8; ++d) {
                const int nx = x + dx8[d], ny = y + dy8[d];
                if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
                const std::uint32_t nid = labels.at(nx, ny);
                if (nid != 0 && nid != id) {
                    ++a.contact;
                    break;
                }
            }
        }
    }

    std::vector<CandidateFeatureVector> out;
    out.reserve(cands.records.size());
    for (const auto& r : cands.records) {
        const Acc& a = accs[r.id];
        CandidateFeatureVector f;
        f.area = static_cast<double>(r.area);
        f.perimeter = static_cast<double>(a.boundary);
        const double raw = a.boundary > 0
                               ? 4.0 * 3.14159265358979323846 * f.area / (f.perimeter * f.perimeter)
                               : 0.0;
        f.circularity = std::min(raw, 1.2);
        f.mean_interior = r.area > 0 ? a.sum_interior / static_cast<double>(r.area) : 0.0;
        f.mean_contour = r.area > 0 ? a.sum_contour / static_cast<double>(r.area) : 0.0;
        f.contact_ratio =
            a.boundary > 0 ? static_cast<double>(a.contact) / static_cast<double>(a.boundary) : 0.0;
        const double bbox_area = static_cast<double>(r.bbox.width()) * r.bbox.height();
        f.bbox_fill = bbox_area > 0.0 ? f.area / bbox_area : 0.0;
        out.push_back(f);
    }
    return out;
}

double GbtTree::predict(const CandidateFeatureVector& f) const {
    std::size_t i = 0;
    while (!(nodes[i].feature < 0)) {
        const GbtNode& n = nodes[i];
        i = f[static_cast<std::size_t>(n.feature)] <= n.threshold
                ? static_cast<std::size_t>(n.left)
                : static_cast<std::size_t>(n.right);
    }
    return nodes[i].value;
}

double GbtModel::predict(const CandidateFeatureVector& f) const {
    if (!trained()) throw InputError("GbtModel: model is not trained");
    double y = base_prediction;
    for (const auto& t : trees) y += params.shrinkage * t.predict(f);
    return std::clamp(y, 0.0, 1.0);
}

namespace {

// Depth-limited least-squares regression tree over candidate features.
struct GbtTreeBuilder {
    const std::vector<CandidateFeatureVector>& features;
    const std::vector<double>& residuals;
    const GbtParams& params;
    GbtTree tree;
    std::vector<std::uint32_t> idx;

    void build() {
        idx.resize(features.size());
        std::iota(idx.begin(), idx.end(), 0u);
        grow(0, idx.size(), 0);
    }

    std::int32_t make_leaf(double mean) {
        GbtNode leaf;
        leaf.value = mean;
        tree.nodes.push_back(leaf);
        return static_cast<std::int32_t>(tree.nodes.size() - 1);
    }

    std::int32_t grow(std::size_t begin, std::size_t end, int depth) {
        const std::size_t n = end - begin;
        double sum = 0.0;
        for (std::size_t i = begin; i < end; ++i) sum += residuals[idx[i]];
        const double mean = sum / static_cast<double>(n);

        if (depth >= params.max_depth || n < 2 * static_cast<std::size_t>(params.min_leaf))
            return make_leaf(mean);

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = 0.0; // SSE reduction must be strictly positive

        std::vector<std::uint32_t> order(idx.begin() + static_cast<std::ptrdiff_t>(begin),
                                         idx.begin() + static_cast<std::ptrdiff_t>(end));
        for (std::size_t f = 0; f < CandidateFeatureVector::size(); ++f) {
            std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
                return features[a][f] < features[b][f];
            });
            double left_sum = 0.0;
            for (std::size_t i = 0; i + 1 < n; ++i) {
                left_sum += residuals[order[i]];
                const double va = features[order[i]][f], vb = features[order[i + 1]][f];
                if (va == vb) continue;
                const std::size_t nl = i + 1, nr = n - nl;
                if (nl < static_cast<std::size_t>(params.min_leaf) ||
                    nr < static_cast<std::size_t>(params.min_leaf))
                    continue;
                const double right_sum = sum - left_sum;
                // SSE reduction = sum_l^2/nl + sum_r^2/nr - sum^2/n
                const double score = left_sum * left_sum / static_cast<double>(nl) +
                                     right_sum * right_sum / static_cast<double>(nr) -
                                     sum * sum / static_cast<double>(n);
                if (score > best_score) {
                    best_score = score;
                    best_feature = static_cast<int>(f);
                    best_threshold = (va + vb) / 2.0;
                }
            }
        }

        if (best_feature < 0) return make_leaf(mean);

        const auto mid = std::stable_partition(
            idx.begin() + static_cast<std::ptrdiff_t>(begin),
            idx.begin() + static_cast<std::ptrdiff_t>(end), [&](std::uint32_t si) {
                return features[si][static_cast<std::size_t>(best_feature)] <= best_threshold;
            });
        const std::size_t split = static_cast<std::size_t>(mid - idx.begin());
        if (split == begin || split == end) return make_leaf(mean);

        GbtNode node;
        node.feature = static_cast<std::int16_t>(best_feature);
        node.threshold = best_threshold;
        tree.nodes.push_back(node);
        const std::int32_t self = static_cast<std::int32_t>(tree.nodes.size() - 1);
        const std::int32_t left = grow(begin, split, depth + 1);
        const std::int32_t right = grow(split, end, depth + 1);
        tree.nodes[static_cast<std::size_t>(self)].left = left;
        tree.nodes[static_cast<std::size_t>(self)].right = right;
        return self;
    }
};

} // namespace

GbtModel train_iou_regressor(const std::vector<CandidateFeatureVector>& features,
                             const std::vector<double>& targets, const GbtParams& params) {
    if (features.size() != targets.size())
        throw InputError("train_iou_regressor: features/targets size mismatch");
    if (features.size() < 2) throw InputError("train_iou_regressor: need at least 2 samples");
    if (params.n_rounds < 1 || params.max_depth < 1 || params.shrinkage <= 0.0 ||
        params.shrinkage > 1.0 || params.min_leaf < 1)
        throw InputError("train_iou_regressor: invalid hyperparameters");
    for (const double t : targets)
        if (!(t >= 0.0 && t <= 1.0))
            throw InputError("train_iou_regressor: target outside [0,1]");

    GbtModel model;
    model.params = params;
    const std::size_t n = targets.size();
    model.base_prediction =
        std::accumulate(targets.begin(), targets.end(), 0.0) / static_cast<double>(n);

    std::vector<double> residuals(n);
    for (std::size_t i = 0; i < n; ++i) residuals[i] = targets[i] - model.base_prediction;

    auto mse = [&] {
        double s = 0.0;
        for (const double r : residuals) s += r * r;
        return s / static_cast<double>(n);
    };
    model.training_mse.push_back(mse());

    for (int round = 0; round < params.n_rounds; ++round) {
        GbtTreeBuilder builder{features, residuals, params, {}, {}};
        builder.build();
        for (std::size_t i = 0; i < n; ++i)
            residuals[i] -= params.shrinkage * builder.tree.predict(features[i]);
        model.trees.push_back(std::move(builder.tree));
        model.training_mse.push_back(mse());
    }
    return model;
}

FilterResult filter_candidates(const CandidateSet& cands,
                               const std::vector<CandidateFeatureVector>& features,
                               const GbtModel& model, double threshold) {
    if (features.size() != cands.records.size())
        throw InputError("filter_candidates: features do not match candidate records");
    if (!model.trained()) throw InputError("filter_candidates: model is not trained");

    FilterResult out;
    out.candidates.instances = cands.instances;
    std::unordered_map<std::uint32_t, bool> keep;
    for (std::size_t i = 0; i < cands.records.size(); ++i) {
        const double iou = model.predict(features[i]);
        if (iou >= threshold) {
            CandidateRecord r = cands.records[i];
            r.predicted_iou = iou;
            out.candidates.records.push_back(r);
            out.features.push_back(features[i]);
            keep[cands.records[i].id] = true;
        } else {
            keep[cands.records[i].id] = false;
        }
    }
    for (auto& l : out.candidates.instances.labels) {
        if (l == 0) continue;
        const auto it = keep.find(l);
        if (it == keep.end() || !it->second) l = 0;
    }
    return out;
}

std::vector<double> best_overlap_iou(const CandidateSet& cands, const InstanceLabelMap& gt) {
    require_same_dims(cands.instances, gt, "best_overlap_iou");

    std::map<std::pair<std::uint32_t, std::uint32_t>, std::size_t> inter;
    std::unordered_map<std::uint32_t, std::size_t> pred_area, gt_area;
    for (std::size_t i = 0; i < gt.labels.size(); ++i) {
        const std::uint32_t p = cands.instances.labels[i], g = gt.labels[i];
        if (p != 0) ++pred_area[p];
        if (g != 0) ++gt_area[g];
        if (p != 0 && g != 0) ++inter[{p, g}];
    }

    std::unordered_map<std::uint32_t, double> best;
    for (const auto& [pair, overlap] : inter) {
        const auto [p, g] = pair;
        const std::size_t uni = pred_area[p] + gt_area[g] - overlap;
        const double iou = static_cast<double>(overlap) / static_cast<double>(uni);
        auto [it, inserted] = best.try_emplace(p, iou);
        if (!inserted) it->second = std::max(it->second, iou);
    }

    std::vector<double> out;
    out.reserve(cands.records.size());
    for (const auto& r : cands.records) {
        const auto it = best.find(r.id);
        out.push_back(it == best.end() ? 0.0 : it->second);
    }
    return out;
}

namespace {

constexpr const char* kGbtFormat = "neuroseg-gbt";
constexpr int kGbtVersion = 1;

} // namespace

std::string gbt_to_json(const GbtModel& model) {
    nlohmann::json doc;
    doc["format"] = kGbtFormat;
    doc["version"] = kGbtVersion;
    doc["params"] = {
        {"n_rounds", model.params.n_rounds},   {"max_depth", model.params.max_depth},
        {"shrinkage", model.params.shrinkage}, {"min_leaf", model.params.min_leaf},
        {"seed", model.params.seed},
    };
    doc["base_prediction"] = model.base_prediction;
    doc["training_mse"] = model.training_mse;
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : model.trees) {
        nlohmann::json jt;
        auto& feature = jt["feature"] = nlohmann::json::array();
        auto& threshold = jt["threshold"] = nlohmann::json::array();
        auto& left = jt["left"] = nlohmann::json::array();
        auto& right = jt["right"] = nlohmann::json::array();
        auto& value = jt["value"] = nlohmann::json::array();
        for (const auto& n : t.nodes) {
            feature.push_back(n.feature);
            threshold.push_back(n.threshold);
            left.push_back(n.left);
            right.push_back(n.right);
            value.push_back(n.value);
        }
        trees.push_back(std::move(jt));
    }
    doc["trees"] = std::move(trees);
    return doc.dump(2);
}

GbtModel gbt_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("gbt_from_json: parse error: ") + e.what());
    }
    if (doc.value("format", "") != kGbtFormat || doc.value("version", 0) != kGbtVersion)
        throw InputError("gbt_from_json: not a neuroseg-gbt v1 document");

    GbtModel model;
    const auto& p = doc.at("params");
    model.params.n_rounds = p.at("n_rounds").get<int>();
    model.params.max_depth = p.at("max_depth").get<int>();
    model.params.shrinkage = p.at("shrinkage").get<double>();
    model.params.min_leaf = p.at("min_leaf").get<int>();
    model.params.seed = p.at("seed").get<std::uint64_t>();
    model.base_prediction = doc.at("base_prediction").get<double>();
    model.training_mse = doc.at("training_mse").get<std::vector<double>>();

    for (const auto& jt : doc.at("trees")) {
        GbtTree tree;
        const auto& feature = jt.at("feature");
        const std::size_t n = feature.size();
        tree.nodes.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto& node = tree.nodes[i];
            node.feature = feature[i].get<std::int16_t>();
            node.threshold = jt.at("threshold")[i].get<double>();
            node.left = jt.at("left")[i].get<std::int32_t>();
            node.right = jt.at("right")[i].get<std::int32_t>();
            node.value = jt.at("value")[i].get<double>();
        }
        model.trees.push_back(std::move(tree));
    }
    return model;
}

void save_gbt(const std::string& path, const GbtModel& model) {
    std::ofstream out(path);
    if (!out) throw InputError("save_gbt: cannot open " + path);
    out << gbt_to_json(model) << "\n";
}

GbtModel load_gbt(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("load_gbt: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return gbt_from_json(text);
}

} // namespace neuroseg
