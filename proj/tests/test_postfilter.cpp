#include <neuroseg/postfilter.hpp>

#include "oracles.hpp"

#include <doctest.h>

#include <filesystem>
#include <random>

using namespace neuroseg;

namespace {

ClassProbMaps flat_maps(int w, int h, double interior, double contour) {
    ClassProbMaps maps;
    maps.interior = ProbabilityMap(w, h, interior);
    maps.contour = ProbabilityMap(w, h, contour);
    maps.background = ProbabilityMap(w, h, 1.0 - interior - contour);
    return maps;
}

CandidateFeatureVector random_features(std::mt19937& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CandidateFeatureVector f;
    f.area = 20.0 + 400.0 * unit(rng);
    f.perimeter = 10.0 + 80.0 * unit(rng);
    f.circularity = 0.2 + unit(rng);
    f.mean_interior = unit(rng);
    f.mean_contour = unit(rng);
    f.contact_ratio = unit(rng);
    f.bbox_fill = unit(rng);
    return f;
}

} // namespace

TEST_CASE("an 11x11 square has the pinned shape features") {
    InstanceLabelMap labels(20, 20);
    for (int y = 4; y < 15; ++y)
        for (int x = 4; x < 15; ++x) labels.at(x, y) = 1;
    const auto cands = make_candidate_set(std::move(labels), 0);
    const auto feats = extract_candidate_features(cands, flat_maps(20, 20, 1.0, 0.0));
    REQUIRE(feats.size() == 1);
    CHECK(feats[0].area == 121.0);
    CHECK(feats[0].perimeter == 40.0); // boundary pixel count
    CHECK(feats[0].circularity ==
          doctest::Approx(4.0 * 3.14159265358979323846 * 121.0 / 1600.0).epsilon(1e-12));
    CHECK(feats[0].circularity == doctest::Approx(0.95).epsilon(0.01));
    CHECK(feats[0].bbox_fill == 1.0);
    CHECK(feats[0].contact_ratio == 0.0); // isolated candidate
    CHECK(feats[0].mean_interior == 1.0); // fully inside interior-prob-1 region
    CHECK(feats[0].mean_contour == 0.0);
}

TEST_CASE("touching candidates get a positive contact ratio") {
    InstanceLabelMap labels(20, 10);
    for (int y = 2; y < 7; ++y) {
        for (int x = 2; x < 7; ++x) labels.at(x, y) = 1;
        for (int x = 7; x < 12; ++x) labels.at(x, y) = 2;
    }
    const auto cands = make_candidate_set(std::move(labels), 0);
    const auto feats = extract_candidate_features(cands, flat_maps(20, 10, 0.8, 0.1));
    REQUIRE(feats.size() == 2);
    // 5 of the 16 boundary pixels of each square touch the other square.
    CHECK(feats[0].contact_ratio == doctest::Approx(5.0 / 16.0));
    CHECK(feats[1].contact_ratio == doctest::Approx(5.0 / 16.0));
    CHECK(feats[0].mean_interior == doctest::Approx(0.8));
    CHECK(feats[0].mean_contour == doctest::Approx(0.1));
}

TEST_CASE("constant targets collapse to the base prediction") {
    std::mt19937 rng(3);
    std::vector<CandidateFeatureVector> features;
    for (int i = 0; i < 30; ++i) features.push_back(random_features(rng));
    const std::vector<double> targets(30, 0.42);
    const auto model = train_iou_regressor(features, targets, GbtParams{});
    for (int i = 0; i < 10; ++i) CHECK(model.predict(random_features(rng)) == 0.42);
    CHECK(model.training_mse.back() == doctest::Approx(0.0).epsilon(1e-18));
}

TEST_CASE("training MSE is non-increasing per round") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int round = 0; round < 5; ++round) {
        std::vector<CandidateFeatureVector> features;
        std::vector<double> targets;
        for (int i = 0; i < 120; ++i) {
            features.push_back(random_features(rng));
            targets.push_back(unit(rng));
        }
        GbtParams params;
        params.n_rounds = 60;
        const auto model = train_iou_regressor(features, targets, params);
        REQUIRE(model.training_mse.size() == 61);
        for (std::size_t i = 1; i < model.training_mse.size(); ++i)
            REQUIRE(model.training_mse[i] <= model.training_mse[i - 1]);
    }
}

TEST_CASE("a single-split dataset is fit to near-zero MSE") {
    std::mt19937 rng(7);
    std::vector<CandidateFeatureVector> features;
    std::vector<double> targets;
    for (int i = 0; i < 100; ++i) {
        auto f = random_features(rng);
        f.area = (i % 2 == 0) ? 30.0 : 300.0;
        features.push_back(f);
        targets.push_back(i % 2 == 0 ? 0.2 : 0.8);
    }
    const auto model = train_iou_regressor(features, targets, GbtParams{});
    CHECK(model.training_mse.back() < 1e-3);
    CandidateFeatureVector probe = random_features(rng);
    probe.area = 30.0;
    CHECK(model.predict(probe) == doctest::Approx(0.2).epsilon(0.02));
    probe.area = 300.0;
    CHECK(model.predict(probe) == doctest::Approx(0.8).epsilon(0.02));
}

TEST_CASE("training validates its inputs") {
    std::mt19937 rng(11);
    std::vector<CandidateFeatureVector> one{random_features(rng)};
    CHECK_THROWS_AS(train_iou_regressor(one, {0.5}, GbtParams{}), InputError);
    std::vector<CandidateFeatureVector> two{random_features(rng), random_features(rng)};
    CHECK_THROWS_AS(train_iou_regressor(two, {0.5, 1.5}, GbtParams{}), InputError);
    CHECK_THROWS_AS(train_iou_regressor({}, {}, GbtParams{}), InputError);
}

namespace {

// A small arena: candidate set of single-pixel-row instances whose features
// are synthesized so predictions spread over [0,1].
struct FilterFixture {
    CandidateSet cands;
    std::vector<CandidateFeatureVector> features;
    GbtModel model;

    explicit FilterFixture(std::mt19937& rng, int n_candidates) {
        InstanceLabelMap labels(std::max(8 * n_candidates, 8), 8);
        for (int k = 0; k < n_candidates; ++k)
            for (int x = 0; x < 5; ++x) labels.at(8 * k + x, 3) = static_cast<std::uint32_t>(k + 1);
        cands = make_candidate_set(std::move(labels), 0);
        for (std::size_t i = 0; i < cands.records.size(); ++i)
            features.push_back(random_features(rng));

        // Train the regressor to echo mean_interior, giving controllable
        // predictions.
        std::vector<CandidateFeatureVector> train;
        std::vector<double> targets;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int i = 0; i < 400; ++i) {
            auto f = random_features(rng);
            train.push_back(f);
            targets.push_back(f.mean_interior);
        }
        GbtParams params;
        params.n_rounds = 80;
        model = train_iou_regressor(train, targets, params);
    }
};

} // namespace

TEST_CASE("filtering keeps exactly the predicted-IoU >= threshold candidates") {
    std::mt19937 rng(13);
    FilterFixture fx(rng, 12);

    const auto result = filter_candidates(fx.cands, fx.features, fx.model, 0.3);

    // Brute-force survivor scan.
    std::vector<std::uint32_t> want;
    for (std::size_t i = 0; i < fx.cands.records.size(); ++i)
        if (fx.model.predict(fx.features[i]) >= 0.3) want.push_back(fx.cands.records[i].id);
    std::vector<std::uint32_t> got;
    for (const auto& r : result.candidates.records) got.push_back(r.id);
    CHECK(got == want);

    // The label map zeroes removed ids and keeps survivors untouched.
    for (std::size_t i = 0; i < result.candidates.instances.labels.size(); ++i) {
        const auto l = result.candidates.instances.labels[i];
        if (l != 0) CHECK(std::find(want.begin(), want.end(), l) != want.end());
    }
    for (const auto& r : result.candidates.records) CHECK(r.predicted_iou >= 0.3);
}

TEST_CASE("filter threshold 0 is the identity") {
    std::mt19937 rng(17);
    FilterFixture fx(rng, 8);
    const auto result = filter_candidates(fx.cands, fx.features, fx.model, 0.0);
    CHECK(result.candidates.records.size() == fx.cands.records.size());
    CHECK(result.candidates.instances.labels == fx.cands.instances.labels);
}

TEST_CASE("filter threshold above 1 clears everything") {
    std::mt19937 rng(19);
    FilterFixture fx(rng, 8);
    const auto result = filter_candidates(fx.cands, fx.features, fx.model, 1.0 + 1e-9);
    CHECK(result.candidates.records.empty());
    for (const auto l : result.candidates.instances.labels) CHECK(l == 0);
}

TEST_CASE("filtering is idempotent and monotone in the threshold") {
    std::mt19937 rng(23);
    for (int round = 0; round < 10; ++round) {
        FilterFixture fx(rng, 10);
        const auto once = filter_candidates(fx.cands, fx.features, fx.model, 0.3);
        const auto twice = filter_candidates(once.candidates, once.features, fx.model, 0.3);
        CHECK(twice.candidates.instances.labels == once.candidates.instances.labels);
        CHECK(twice.candidates.records.size() == once.candidates.records.size());

        std::size_t prev = fx.cands.records.size();
        for (const double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
            const auto r = filter_candidates(fx.cands, fx.features, fx.model, t);
            CHECK(r.candidates.records.size() <= prev);
            prev = r.candidates.records.size();
        }
    }
}

TEST_CASE("GBT serialization round-trips predictions bit-exactly") {
    std::mt19937 rng(29);
    std::vector<CandidateFeatureVector> features;
    std::vector<double> targets;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 150; ++i) {
        features.push_back(random_features(rng));
        targets.push_back(unit(rng));
    }
    const auto model = train_iou_regressor(features, targets, GbtParams{});
    const auto reloaded = gbt_from_json(gbt_to_json(model));
    for (int i = 0; i < 200; ++i) {
        const auto f = random_features(rng);
        REQUIRE(model.predict(f) == reloaded.predict(f));
    }

    const auto path = std::filesystem::temp_directory_path() / "neuroseg_gbt_roundtrip.json";
    save_gbt(path.string(), model);
    const auto from_disk = load_gbt(path.string());
    CHECK(gbt_to_json(from_disk) == gbt_to_json(model));
    std::filesystem::remove(path);
}

TEST_CASE("best_overlap_iou picks the maximal-overlap ground truth") {
    InstanceLabelMap pred(12, 6), gt(12, 6);
    for (int x = 0; x < 6; ++x)
        for (int y = 1; y < 5; ++y) pred.at(x, y) = 1;
    // GT instance 3 overlaps pred 1 on 4 of its 8 pixels; GT 9 does not.
    for (int x = 4; x < 6; ++x)
        for (int y = 1; y < 3; ++y) gt.at(x, y) = 3;
    for (int x = 8; x < 11; ++x)
        for (int y = 1; y < 3; ++y) gt.at(x, y) = 9;

    const auto cands = make_candidate_set(std::move(pred), 0);
    const auto ious = best_overlap_iou(cands, gt);
    REQUIRE(ious.size() == 1);
    CHECK(ious[0] == doctest::Approx(4.0 / 24.0)); // inter 4, union 24+4-4
}
