#pragma once

#include <optional>
#include <vector>

#include "odseg/image.hpp"
#include "odseg/imgproc.hpp"
#include "odseg/locator.hpp"
#include "odseg/vessels.hpp"

namespace odseg {

struct SegmenterConfig {
    double diameter_ratio_max = 1.2;   // rect height = width * ratio (vertical > horizontal)
    double boundary_grad_factor = 1.5; // x median |gx| along the scan line
    double boundary_grad_floor = 40.0; // absolute floor for the boundary threshold
    int boundary_halfwidth = 70;       // initial scan half-span, scaled by image width
    double enlarge_factor = 1.25;
    int enlarge_retries = 3;
    double disk_diameter_min = 70.0;   // plausible widths at reference_width scale
    double disk_diameter_max = 200.0;
    double reference_width = 565.0;
    int analysis_window = 70;
    double split_band_fraction = 0.6;  // middle share of columns eligible for the split
    double vertical_tolerance_deg = 25.0;
    bool dual_threshold = true;        // per-side Otsu (false: one Otsu on the whole rect)
};

struct DiskBox {
    enum class TemporalSide { LeftOfSplit, RightOfSplit };
    PointF center;
    Rect rect;
    int split_col = 0;
    TemporalSide temporal_side = TemporalSide::LeftOfSplit;
};

struct SegmentationResult {
    BinaryMask mask;                // image-sized; true pixels only inside box.rect
    DiskBox box;
    std::vector<PixelRC> boundary;  // closed outer contour of the mask
    bool low_confidence = false;
};

struct RefinedCenter {
    PixelRC point;
    bool vessel_found = false;  // false: no vessel pixels, point returned unchanged
};

/// Move the column of `initial` to the nearest vessel-bearing column of the
/// vessel window (ties: more vessel pixels, then leftmost). Row is kept: the
/// bright temporal blob already approximates the disk's vertical center.
RefinedCenter refine_center(const GrayImage& img, const VesselResult& vessels, PixelRC initial);

struct BoundaryPoints {
    int row = 0;
    std::optional<int> left_col;   // innermost dark-to-bright point left of center
    std::optional<int> right_col;  // innermost bright-to-dark point right of center
};

/// Scan the horizontal line through `center` outward both ways for the
/// innermost points with |horizontal Sobel| >= grad_min, correct gradient sign
/// (entering the disk on the left, leaving on the right) and no vessel label.
/// A missing side signals the caller to enlarge the window and retry.
BoundaryPoints find_boundary_points(const GrayImage& img, PixelRC center,
                                    const VesselResult& vessels, int window_halfwidth,
                                    double grad_min);

struct CircumscribeResult {
    Rect rect;      // clipped to the image
    PointF center;  // midpoint of the two boundary points
};

/// Circumscribing rectangle from two boundary points on one row: width is
/// their distance, height is width * diameter_ratio_max. Returns nullopt when
/// the width falls outside the plausible disk-diameter range (scaled by
/// image width / reference_width), signalling a retry.
std::optional<CircumscribeResult> circumscribe(int img_width, int img_height, PixelRC left,
                                               PixelRC right, const SegmenterConfig& cfg);

struct SplitResult {
    int split_col = 0;
    DiskBox::TemporalSide temporal_side = DiskBox::TemporalSide::LeftOfSplit;
    bool low_confidence = false;  // no near-vertical vessel pixels in the rect
};

/// Column of the strongest near-vertical vessel evidence within the middle
/// split_band_fraction of the rect (ties: nearest the rect center, then
/// leftmost); falls back to the center column when no vertical vessels exist.
/// The temporal side is the brighter side.
SplitResult split_regions(const GrayImage& img, const VesselResult& vessels, const Rect& rect,
                          const SegmenterConfig& cfg);

/// Full segmentation: center refinement, boundary points (with window
/// enlargements), circumscribing rectangle, vessel-based split, per-side Otsu,
/// and mask cleanup into one hole-free component.
SegmentationResult segment_disk(const GrayImage& img, const LocatorOutcome& located,
                                const SegmenterConfig& cfg, const VesselConfig& vessel_cfg);

}  // namespace odseg
