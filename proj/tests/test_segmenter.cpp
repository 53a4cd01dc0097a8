#include <doctest.h>

#include <cmath>

#include "odseg/metrics.hpp"
#include "odseg/phantom.hpp"
#include "odseg/segmenter.hpp"
#include "testutil.hpp"

using namespace odseg;

namespace {

GrayImage with_vertical_bar(GrayImage img, int col, int width, int r0, int r1,
                            std::uint8_t value) {
    for (int r = r0; r < r1; ++r)
        for (int c = col - width / 2; c <= col + width / 2; ++c)
            if (c >= 0 && c < img.width) img.at(r, c) = value;
    return img;
}

SegmentationResult run_phantom(const Phantom& ph, const SegmenterConfig& cfg) {
    const auto located = locate_disk(ph.image, LocatorConfig{}, VesselConfig{});
    REQUIRE(located.has_value());
    return segment_disk(ph.image, *located, cfg, VesselConfig{});
}

double phantom_overlap(const Phantom& ph, const SegmenterConfig& cfg) {
    const auto seg = run_phantom(ph, cfg);
    return eq1_metrics(confusion(seg.mask, ph.gt_disk)).overlap;
}

}  // namespace

TEST_CASE("refine_center moves toward the vessel trunk, row unchanged") {
    GrayImage img(120, 120, 190);
    img = with_vertical_bar(std::move(img), 40, 5, 0, 120, 60);
    const VesselResult vessels = segment_vessels(img, Rect{25, 10, 95, 80}, VesselConfig{});
    REQUIRE(!vessels.segments.empty());

    const RefinedCenter rc = refine_center(img, vessels, PixelRC{60, 60});
    CHECK(rc.vessel_found);
    CHECK(rc.point.row == 60);
    CHECK(std::abs(rc.point.col - 40) <= 3);  // trunk 20 columns left of the start

    // trunk through the start point: stays put (nearest vessel column is its own)
    const RefinedCenter at_trunk = refine_center(img, vessels, PixelRC{60, 40});
    CHECK(at_trunk.vessel_found);
    CHECK(std::abs(at_trunk.point.col - 40) <= 2);
    CHECK(at_trunk.point.row == 60);

    // no vessels at all: unchanged and flagged
    const GrayImage flat(120, 120, 150);
    const VesselResult none = segment_vessels(flat, Rect{25, 10, 95, 80}, VesselConfig{});
    const RefinedCenter kept = refine_center(flat, none, PixelRC{60, 60});
    CHECK_FALSE(kept.vessel_found);
    CHECK(kept.point == PixelRC{60, 60});
}

TEST_CASE("find_boundary_points locates disk edges around the center") {
    const GrayImage img = testutil::render_disk(220, 220, 100, 100, 40, 90, 200);
    const VesselResult no_vessels;  // empty mask: nothing is vessel-labeled
    const auto bp = find_boundary_points(img, PixelRC{100, 100}, no_vessels, 70, 100.0);
    REQUIRE(bp.left_col.has_value());
    REQUIRE(bp.right_col.has_value());
    CHECK(std::abs(*bp.left_col - 60) <= 2);
    CHECK(std::abs(*bp.right_col - 140) <= 2);
}

TEST_CASE("find_boundary_points skips vessel-labeled edges") {
    GrayImage img = testutil::render_disk(220, 220, 100, 100, 40, 90, 200);
    img = with_vertical_bar(std::move(img), 115, 5, 55, 145, 60);  // vessel at +15
    const VesselResult vessels = segment_vessels(img, Rect{76, 40, 125, 165}, VesselConfig{});
    REQUIRE(!vessels.segments.empty());

    const auto bp = find_boundary_points(img, PixelRC{100, 100}, vessels, 70, 100.0);
    REQUIRE(bp.right_col.has_value());
    CHECK(std::abs(*bp.right_col - 140) <= 2);  // the +15 vessel edge is rejected
    REQUIRE(bp.left_col.has_value());
    CHECK(std::abs(*bp.left_col - 60) <= 2);
}

TEST_CASE("find_boundary_points on a constant image finds nothing") {
    const GrayImage flat(200, 200, 120);
    const auto bp = find_boundary_points(flat, PixelRC{100, 100}, VesselResult{}, 70, 40.0);
    CHECK_FALSE(bp.left_col.has_value());
    CHECK_FALSE(bp.right_col.has_value());
}

TEST_CASE("circumscribe arithmetic and plausibility range") {
    SegmenterConfig cfg;  // reference width 565
    const auto box = circumscribe(565, 584, PixelRC{250, 100}, PixelRC{250, 180}, cfg);
    REQUIRE(box.has_value());
    CHECK(box->center.row == doctest::Approx(250.0));
    CHECK(box->center.col == doctest::Approx(140.0));
    CHECK(box->rect.width() == 80);   // distance between the points
    CHECK(box->rect.height() == 96);  // 80 * 1.2
    CHECK(box->rect.top == 202);
    CHECK(box->rect.bottom == 298);

    // width 30 at DRIVE scale: below the 70..200 plausible range
    CHECK_FALSE(circumscribe(565, 584, PixelRC{250, 100}, PixelRC{250, 130}, cfg).has_value());
    // width 250: above it
    CHECK_FALSE(circumscribe(565, 584, PixelRC{250, 100}, PixelRC{250, 350}, cfg).has_value());

    CHECK_THROWS_AS(circumscribe(565, 584, PixelRC{250, 180}, PixelRC{250, 100}, cfg),
                    std::invalid_argument);
    CHECK_THROWS_AS(circumscribe(565, 584, PixelRC{250, 100}, PixelRC{251, 180}, cfg),
                    std::invalid_argument);
}

TEST_CASE("split_regions finds the vertical trunk column") {
    GrayImage img(200, 200, 190);
    img = with_vertical_bar(std::move(img), 97, 5, 20, 180, 60);
    const Rect rect{60, 60, 140, 140};
    const VesselResult vessels = segment_vessels(img, rect, VesselConfig{});
    REQUIRE(!vessels.segments.empty());

    const SplitResult sp = split_regions(img, vessels, rect, SegmenterConfig{});
    CHECK_FALSE(sp.low_confidence);
    CHECK(std::abs(sp.split_col - 97) <= 2);

    // vessel-free rect: center column, flagged
    const GrayImage flat(200, 200, 150);
    const VesselResult none = segment_vessels(flat, rect, VesselConfig{});
    const SplitResult fallback = split_regions(flat, none, rect, SegmenterConfig{});
    CHECK(fallback.low_confidence);
    CHECK(std::abs(fallback.split_col - 100) <= 1);

    CHECK_THROWS_AS(split_regions(img, vessels, Rect{0, 0, 199, 199}, SegmenterConfig{}),
                    std::invalid_argument);
}

TEST_CASE("split_regions temporal side is the brighter side") {
    GrayImage img(200, 200, 100);
    for (int r = 60; r < 140; ++r)
        for (int c = 60; c < 100; ++c) img.at(r, c) = 210;  // bright left half
    const Rect rect{60, 60, 140, 140};
    const VesselResult none = segment_vessels(img, rect, VesselConfig{});
    const SplitResult sp = split_regions(img, none, rect, SegmenterConfig{});
    CHECK(sp.temporal_side == DiskBox::TemporalSide::LeftOfSplit);
}

TEST_CASE("segment_disk on phantoms: overlap and mask invariants") {
    for (std::uint64_t s : {10ull, 11ull, 12ull}) {
        PhantomSpec spec;
        spec.seed = derive_seed(1234, s);
        spec.kind = s % 2 ? PhantomKind::SplitContrast : PhantomKind::Standard;
        const Phantom ph = make_phantom(spec);
        const SegmentationResult seg = run_phantom(ph, SegmenterConfig{});

        const double iou = eq1_metrics(confusion(seg.mask, ph.gt_disk)).overlap;
        CHECK(iou >= 0.80);

        // all mask pixels inside the rect
        for (int r = 0; r < seg.mask.height; ++r)
            for (int c = 0; c < seg.mask.width; ++c)
                if (seg.mask.get(r, c)) CHECK(seg.box.rect.contains(r, c));

        // one 8-connected component, no interior holes
        CHECK(connected_components(seg.mask).size() == 1);
        CHECK(fill_holes(seg.mask, seg.box.rect) == seg.mask);

        // boundary is a closed contour of mask pixels
        REQUIRE(!seg.boundary.empty());
        for (const auto& p : seg.boundary) CHECK(seg.mask.get(p.row, p.col));

        CHECK(seg.box.split_col > seg.box.rect.left);
        CHECK(seg.box.split_col < seg.box.rect.right - 1);
    }
}

TEST_CASE("dual thresholds beat one threshold on unequal-contrast phantoms") {
    PhantomSpec spec;
    spec.kind = PhantomKind::SplitContrast;
    spec.seed = derive_seed(400, 1);
    const Phantom ph = make_phantom(spec);

    SegmenterConfig dual_cfg;
    SegmenterConfig single_cfg;
    single_cfg.dual_threshold = false;
    CHECK(phantom_overlap(ph, dual_cfg) >= phantom_overlap(ph, single_cfg));
}

TEST_CASE("uniform fake disk: split is a no-op, dual equals single exactly") {
    const GrayImage img = testutil::render_disk(565, 565, 282, 282, 40, 90, 200);
    const auto located = locate_disk(img, LocatorConfig{}, VesselConfig{});
    REQUIRE(located.has_value());

    SegmenterConfig dual_cfg;
    SegmenterConfig single_cfg;
    single_cfg.dual_threshold = false;
    const auto dual = segment_disk(img, *located, dual_cfg, VesselConfig{});
    const auto single = segment_disk(img, *located, single_cfg, VesselConfig{});
    CHECK(dual.mask == single.mask);
}

TEST_CASE("overlap is stable under a clamped intensity shift") {
    PhantomSpec spec;
    spec.seed = derive_seed(500, 2);
    const Phantom ph = make_phantom(spec);
    const double base = phantom_overlap(ph, SegmenterConfig{});

    for (int delta : {+30, -30}) {
        Phantom shifted = ph;
        for (auto& v : shifted.image.data)
            v = static_cast<std::uint8_t>(std::clamp(static_cast<int>(v) + delta, 0, 255));
        const double moved = phantom_overlap(shifted, SegmenterConfig{});
        CHECK(std::abs(moved - base) < 0.05);
    }
}

TEST_CASE("segment_disk is deterministic end to end") {
    PhantomSpec spec;
    spec.seed = derive_seed(600, 3);
    const Phantom ph = make_phantom(spec);
    const auto located = locate_disk(ph.image, LocatorConfig{}, VesselConfig{});
    REQUIRE(located.has_value());
    const auto a = segment_disk(ph.image, *located, SegmenterConfig{}, VesselConfig{});
    const auto b = segment_disk(ph.image, *located, SegmenterConfig{}, VesselConfig{});
    CHECK(a.mask == b.mask);  // byte-identical
    CHECK(a.box.rect == b.box.rect);
    CHECK(a.box.split_col == b.box.split_col);
}
