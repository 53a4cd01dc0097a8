#include <doctest.h>

#include "odseg/metrics.hpp"
#include "testutil.hpp"

using namespace odseg;
using testutil::TestRng;

namespace {

// independent per-pixel loop oracle
ConfusionCounts confusion_bruteforce(const BinaryMask& pred, const BinaryMask& gt,
                                     const BinaryMask* fov) {
    ConfusionCounts c;
    for (int r = 0; r < pred.height; ++r)
        for (int cc = 0; cc < pred.width; ++cc) {
            if (fov && !fov->get(r, cc)) continue;
            const bool p = pred.get(r, cc), g = gt.get(r, cc);
            c.tp += p && g;
            c.fp += p && !g;
            c.fn += !p && g;
            c.tn += !p && !g;
        }
    return c;
}

}  // namespace

TEST_CASE("confusion identity and empty-prediction cases") {
    BinaryMask gt(40, 25);
    for (int r = 0; r < 10; ++r)
        for (int c = 0; c < 10; ++c) gt.set(r, c, true);

    const ConfusionCounts same = confusion(gt, gt);
    CHECK(same.tp == 100);
    CHECK(same.fn == 0);
    CHECK(same.fp == 0);
    CHECK(same.tn == 900);

    const ConfusionCounts miss = confusion(BinaryMask(40, 25), gt);
    CHECK(miss.tp == 0);
    CHECK(miss.fn == 100);

    CHECK_THROWS_AS(confusion(BinaryMask(3, 3), gt), std::invalid_argument);
}

TEST_CASE("confusion matches the per-pixel oracle, with and without fov") {
    TestRng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const BinaryMask pred = testutil::random_mask(16, 16, rng);
        const BinaryMask gt = testutil::random_mask(16, 16, rng);
        const BinaryMask fov = testutil::random_mask(16, 16, rng);
        CHECK(confusion(pred, gt) == confusion_bruteforce(pred, gt, nullptr));
        const ConfusionCounts c = confusion(pred, gt, &fov);
        CHECK(c == confusion_bruteforce(pred, gt, &fov));
        CHECK(c.tp + c.fp + c.tn + c.fn == fov.count());
    }
}

TEST_CASE("eq1_metrics arithmetic and conventions") {
    CHECK(eq1_metrics({8, 0, 0, 2}).sensitivity == doctest::Approx(0.8));
    CHECK(eq1_metrics({50, 30, 0, 20}).overlap == doctest::Approx(0.5));

    // identical nonempty masks
    const Eq1Metrics ident = eq1_metrics({100, 0, 900, 0});
    CHECK(ident.overlap == 1.0);
    CHECK(ident.sensitivity == 1.0);
    CHECK(ident.specificity == 1.0);

    // empty gt and empty pred -> overlap 1; empty gt, nonempty pred -> 0
    CHECK(eq1_metrics({0, 0, 500, 0}).overlap == 1.0);
    CHECK(eq1_metrics({0, 50, 450, 0}).overlap == 0.0);
}

TEST_CASE("overlap never exceeds sensitivity and is symmetric") {
    TestRng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const BinaryMask a = testutil::random_mask(12, 12, rng);
        const BinaryMask b = testutil::random_mask(12, 12, rng);
        const Eq1Metrics ab = eq1_metrics(confusion(a, b));
        const Eq1Metrics ba = eq1_metrics(confusion(b, a));
        CHECK(ab.overlap <= ab.sensitivity + 1e-12);
        CHECK(ab.overlap == doctest::Approx(ba.overlap));  // Jaccard symmetry
        CHECK(ab.sensitivity >= 0.0);
        CHECK(ab.sensitivity <= 1.0);
        CHECK(ab.specificity >= 0.0);
        CHECK(ab.specificity <= 1.0);
    }
}

TEST_CASE("localization_success inclusion rules") {
    const BinaryMask gt = testutil::disk_mask(60, 60, 30, 30, 10);
    CHECK(localization_success(PointF{30, 30}, gt));
    CHECK(localization_success(PointF{30, 40}, gt));        // boundary pixel counts
    CHECK_FALSE(localization_success(PointF{30, 41}, gt));
    CHECK_FALSE(localization_success(PointF{5, 5}, gt));    // outside the bbox
    CHECK_FALSE(localization_success(PointF{-3, 30}, gt));  // outside the image
}

TEST_CASE("aggregate means, success rates, and bounds") {
    std::vector<EvalRecord> two(2);
    two[0].image_id = "b";
    two[0].overlap = 0.4;
    two[0].located = true;
    two[1].image_id = "a";
    two[1].overlap = 0.6;
    two[1].located = true;
    const BatchReport r2 = aggregate(two);
    CHECK(r2.over_all.overlap == doctest::Approx(0.5));
    CHECK(r2.success_rate == 100.0);            // all located, the DRIVE row shape
    CHECK(r2.records.front().image_id == "a");  // sorted fold order

    std::vector<EvalRecord> fifty(50);
    for (int i = 0; i < 50; ++i) {
        fifty[i].image_id = "img" + std::to_string(i);
        fifty[i].located = i != 20;
        fifty[i].overlap = 0.1 + 0.01 * i;
    }
    const BatchReport r50 = aggregate(fifty);
    CHECK(r50.success_rate == doctest::Approx(98.0));  // 49 of 50
    CHECK(r50.over_located.count == 49);
    CHECK(r50.over_all.count == 50);
    CHECK(r50.over_all.overlap >= 0.1);
    CHECK(r50.over_all.overlap <= 0.6);

    CHECK_THROWS_AS(aggregate({}), std::invalid_argument);
}
