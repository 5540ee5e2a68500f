#include <neuroseg/forest.hpp>

#include <neuroseg/errors.hpp>
#include <neuroseg/rng.hpp>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <fstream>
#include <limits>
#include <thread>

namespace neuroseg {

const TreeNode& DecisionTree::leaf_for(const PixelFeatures& f) const {
    std::size_t i = 0;
    while (!nodes[i].is_leaf()) {
        const TreeNode& n = nodes[i];
        i = f[static_cast<std::size_t>(n.feature)] <= n.threshold
                ? static_cast<std::size_t>(n.left)
                : static_cast<std::size_t>(n.right);
    }
    return nodes[i];
}

bool DecisionTree::vote_foreground(const PixelFeatures& f) const {
    const TreeNode& leaf = leaf_for(f);
    return leaf.count_fg >= leaf.count_bg;
}

double ForestModel::predict_probability(const PixelFeatures& f) const {
    if (trees.empty()) throw InputError("ForestModel: model is not trained");
    std::size_t votes = 0;
    for (const auto& t : trees) votes += t.vote_foreground(f);
    return static_cast<double>(votes) / static_cast<double>(trees.size());
}

namespace {

struct TreeBuilder {
    const std::vector<PixelFeatures>& samples;
    const std::vector<std::uint8_t>& labels;
    const RfParams& params;
    Rng rng;
    DecisionTree tree;
    std::vector<std::uint32_t> idx; // sample indices, partitioned in place

    TreeBuilder(const std::vector<PixelFeatures>& s, const std::vector<std::uint8_t>& l,
                const RfParams& p, Rng r)
        : samples(s), labels(l), params(p), rng(r) {}

    void build() {
        const std::size_t n = samples.size();
        idx.resize(n);
        if (params.bootstrap) {
            for (std::size_t i = 0; i < n; ++i)
                idx[i] = static_cast<std::uint32_t>(rng.uniform_index(n));
        } else {
            for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
        }
        grow(0, n, 0);
    }

    std::int32_t make_leaf(std::uint64_t n_bg, std::uint64_t n_fg) {
        TreeNode leaf;
        leaf.count_bg = n_bg;
        leaf.count_fg = n_fg;
        tree.nodes.push_back(leaf);
        return static_cast<std::int32_t>(tree.nodes.size() - 1);
    }

    // Grows the subtree over idx[begin,end); returns its root node index.
    std::int32_t grow(std::size_t begin, std::size_t end, int depth) {
        std::uint64_t n_bg = 0, n_fg = 0;
        for (std::size_t i = begin; i < end; ++i) (labels[idx[i]] ? n_fg : n_bg) += 1;
        const std::uint64_t n = n_bg + n_fg;

        if (depth >= params.max_depth || n_bg == 0 || n_fg == 0 ||
            n < 2 * static_cast<std::uint64_t>(params.min_leaf))
            return make_leaf(n_bg, n_fg);

        // Random feature subset: partial Fisher-Yates over [0..3].
        std::array<int, kFeatureCount> feats = {0, 1, 2, 3};
        const int k = std::clamp(params.features_per_split, 1, static_cast<int>(kFeatureCount));
        for (int i = 0; i < k; ++i) {
            const std::size_t j =
                i + static_cast<std::size_t>(rng.uniform_index(kFeatureCount - i));
            std::swap(feats[static_cast<std::size_t>(i)], feats[j]);
        }

        int best_feature = -1;
        int best_threshold = 0;
        double best_impurity = std::numeric_limits<double>::infinity();

        for (int fi = 0; fi < k; ++fi) {
            const int f = feats[static_cast<std::size_t>(fi)];
            // Class histogram over the 256 feature bins.
            std::array<std::uint32_t, 256> hist_bg{}, hist_fg{};
            for (std::size_t i = begin; i < end; ++i) {
                const std::uint8_t v = samples[idx[i]][static_cast<std::size_t>(f)];
                (labels[idx[i]] ? hist_fg[v] : hist_bg[v]) += 1;
            }
            std::uint64_t l_bg = 0, l_fg = 0;
            int prev_value = -1;
            for (int b = 0; b < 256; ++b) {
                const std::uint64_t cnt = hist_bg[b] + hist_fg[b];
                if (cnt == 0) continue;
                if (prev_value >= 0) {
                    // Candidate split between prev_value and b.
                    const std::uint64_t nl = l_bg + l_fg;
                    const std::uint64_t nr = n - nl;
                    if (nl >= static_cast<std::uint64_t>(params.min_leaf) &&
                        nr >= static_cast<std::uint64_t>(params.min_leaf)) {
                        const double gl =
                            1.0 - (static_cast<double>(l_bg) * l_bg +
                                   static_cast<double>(l_fg) * l_fg) /
                                      (static_cast<double>(nl) * nl);
                        const std::uint64_t r_bg = n_bg - l_bg, r_fg = n_fg - l_fg;
                        const double gr =
                            1.0 - (static_cast<double>(r_bg) * r_bg +
                                   static_cast<double>(r_fg) * r_fg) /
                                      (static_cast<double>(nr) * nr);
                        const double imp =
                            (static_cast<double>(nl) * gl + static_cast<double>(nr) * gr) /
                            static_cast<double>(n);
                        if (imp < best_impurity) {
                            best_impurity = imp;
                            best_feature = f;
                            best_threshold = (prev_value + b) / 2;
                        }
                    }
                }
                l_bg += hist_bg[b];
                l_fg += hist_fg[b];
                prev_value = b;
            }
        }

        if (best_feature < 0) return make_leaf(n_bg, n_fg);

        const auto mid = std::stable_partition(
            idx.begin() + static_cast<std::ptrdiff_t>(begin),
            idx.begin() + static_cast<std::ptrdiff_t>(end), [&](std::uint32_t si) {
                return samples[si][static_cast<std::size_t>(best_feature)] <= best_threshold;
            });
        const std::size_t split = static_cast<std::size_t>(mid - idx.begin());

        TreeNode node;
        node.feature = static_cast<std::int16_t>(best_feature);
        node.threshold = static_cast<std::uint8_t>(best_threshold);
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

ForestModel train_random_forest(const std::vector<PixelFeatures>& samples,
                                const std::vector<std::uint8_t>& labels, const RfParams& params) {
    if (samples.size() != labels.size())
        throw InputError("train_random_forest: samples/labels size mismatch");
    if (params.n_trees < 1 || params.max_depth < 1 || params.min_leaf < 1)
        throw InputError("train_random_forest: invalid hyperparameters");
    std::size_t n_fg = 0;
    for (auto l : labels) n_fg += l != 0;
    if (n_fg == 0 || n_fg == labels.size())
        throw InputError("train_random_forest: training data is single-class");

    ForestModel model;
    model.params = params;
    model.trees.resize(static_cast<std::size_t>(params.n_trees));

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const unsigned n_threads =
        std::min<unsigned>(hw, static_cast<unsigned>(params.n_trees));
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t t = next.fetch_add(1);
            if (t >= model.trees.size()) break;
            TreeBuilder builder(samples, labels, params, Rng::substream(params.seed, t));
            builder.build();
            model.trees[t] = std::move(builder.tree);
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return model;
}

std::pair<SemanticMask, ProbabilityMap> predict_semantic(const ForestModel& model,
                                                         const FeaturePlanes& planes,
                                                         double threshold) {
    if (!model.trained()) throw InputError("predict_semantic: model is not trained");
    const int w = planes.width, h = planes.height;
    SemanticMask mask(w, h);
    ProbabilityMap prob(w, h);

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int rows_per_block = std::max(1, h / static_cast<int>(hw * 4));
    std::atomic<int> next_row{0};
    auto worker = [&] {
        while (true) {
            const int y0 = next_row.fetch_add(rows_per_block);
            if (y0 >= h) break;
            const int y1 = std::min(h, y0 + rows_per_block);
            for (int y = y0; y < y1; ++y) {
                for (int x = 0; x < w; ++x) {
                    const double p = model.predict_probability(planes.at(x, y));
                    const std::size_t i = prob.index(x, y);
                    prob.values[i] = p;
                    mask.bits[i] = p >= threshold;
                }
            }
        }
    };
    if (hw <= 1 || h < 4) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < hw; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return {std::move(mask), std::move(prob)};
}

namespace {

constexpr const char* kRfFormat = "neuroseg-rf";
constexpr int kRfVersion = 1;

} // namespace

std::string forest_to_json(const ForestModel& model) {
    nlohmann::json doc;
    doc["format"] = kRfFormat;
    doc["version"] = kRfVersion;
    doc["feature_count"] = kFeatureCount;
    doc["params"] = {
        {"n_trees", model.params.n_trees},
        {"max_depth", model.params.max_depth},
        {"min_leaf", model.params.min_leaf},
        {"features_per_split", model.params.features_per_split},
        {"bootstrap", model.params.bootstrap},
        {"seed", model.params.seed},
    };
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : model.trees) {
        nlohmann::json jt;
        auto& feature = jt["feature"] = nlohmann::json::array();
        auto& threshold = jt["threshold"] = nlohmann::json::array();
        auto& left = jt["left"] = nlohmann::json::array();
        auto& right = jt["right"] = nlohmann::json::array();
        auto& count_bg = jt["count_bg"] = nlohmann::json::array();
        auto& count_fg = jt["count_fg"] = nlohmann::json::array();
        for (const auto& n : t.nodes) {
            feature.push_back(n.feature);
            threshold.push_back(n.threshold);
            left.push_back(n.left);
            right.push_back(n.right);
            count_bg.push_back(n.count_bg);
            count_fg.push_back(n.count_fg);
        }
        trees.push_back(std::move(jt));
    }
    doc["trees"] = std::move(trees);
    return doc.dump(2);
}

ForestModel forest_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("forest_from_json: parse error: ") + e.what());
    }
    if (doc.value("format", "") != kRfFormat || doc.value("version", 0) != kRfVersion)
        throw InputError("forest_from_json: not a neuroseg-rf v1 document");

    ForestModel model;
    const auto& p = doc.at("params");
    model.params.n_trees = p.at("n_trees").get<int>();
    model.params.max_depth = p.at("max_depth").get<int>();
    model.params.min_leaf = p.at("min_leaf").get<int>();
    model.params.features_per_split = p.at("features_per_split").get<int>();
    model.params.bootstrap = p.at("bootstrap").get<bool>();
    model.params.seed = p.at("seed").get<std::uint64_t>();

    for (const auto& jt : doc.at("trees")) {
        DecisionTree tree;
        const auto& feature = jt.at("feature");
        const std::size_t n = feature.size();
        tree.nodes.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto& node = tree.nodes[i];
            node.feature = feature[i].get<std::int16_t>();
            node.threshold = jt.at("threshold")[i].get<std::uint8_t>();
            node.left = jt.at("left")[i].get<std::int32_t>();
            node.right = jt.at("right")[i].get<std::int32_t>();
            node.count_bg = jt.at("count_bg")[i].get<std::uint64_t>();
            node.count_fg = jt.at("count_fg")[i].get<std::uint64_t>();
        }
        model.trees.push_back(std::move(tree));
    }
    if (model.trees.size() != static_cast<std::size_t>(model.params.n_trees))
        throw InputError("forest_from_json: tree count does not match params");
    return model;
}

void save_forest(const std::string& path, const ForestModel& model) {
    std::ofstream out(path);
    if (!out) throw InputError("save_forest: cannot open " + path);
    out << forest_to_json(model) << "\n";
}

ForestModel load_forest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("load_forest: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return forest_from_json(text);
}

} // namespace neuroseg
