#pragma once

#include <vector>

#include "odseg/image.hpp"
#include "odseg/imgproc.hpp"

namespace odseg {

struct VesselConfig {
    int window_size = 21;              // square analysis windows tiling the roi
    int stride = 5;                    // window step (last window flushes to the roi edge)
    int radon_angle_bins = 36;         // 5 degree orientation bins
    double radon_confidence_min = 1.5; // below: no dominant structure, window skipped
    double edge_threshold_factor = 2.0;// x median |profile| -> validation threshold
    double edge_threshold_floor = 40.0;// absolute floor for the validation threshold
    int max_pair_distance = 20;        // max samples between paired edges
};

/// Positions of one opposite-sign edge pair, projected onto the edge normal
/// (so right - left is the perpendicular width). validate_edge_pairs returns
/// the same struct in raw profile-sample units.
struct EdgePair {
    double left = 0.0;
    double right = 0.0;
};

struct VesselSegment {
    PixelRC window_origin;          // absolute (row, col) of the window's top-left
    double direction_deg = 0.0;     // structure orientation in [0, 180)
    std::vector<EdgePair> edge_pairs;
    double width = 0.0;             // mean of (right - left) over edge_pairs
};

struct VesselResult {
    BinaryMask mask;                // image-sized; true pixels only inside roi
    std::vector<VesselSegment> segments;
    double average_width = 0.0;     // mean segment width, 0 when no segments
    Rect roi;
    // roi-local orientation of the window that claimed each pixel, -1 when none;
    // indexed [r - roi.top][c - roi.left]
    std::vector<float> direction;

    float direction_at(int r, int c) const {
        return direction[static_cast<size_t>(r - roi.top) * roi.width() + (c - roi.left)];
    }
};

/// Local extrema of `profile` with |value| >= magnitude_threshold, paired as
/// (negative extremum, nearest subsequent positive extremum) no farther apart
/// than max_pair_distance samples — a dark structure on a bright background
/// crossed left to right. Pairs are ordered and non-overlapping. Positions are
/// profile sample indices; plateaus resolve to their midpoint.
std::vector<EdgePair> validate_edge_pairs(const std::vector<float>& profile,
                                          double magnitude_threshold,
                                          int max_pair_distance);

/// Vessel segmentation of `roi` by overlapping windows: Radon orientation,
/// Sobel projected onto the edge normal, edge-pair validation, and geodesic
/// reconstruction of validated pixels against a loose gradient-magnitude mask.
/// Requires roi within the image with both sides >= cfg.window_size.
VesselResult segment_vessels(const GrayImage& img, const Rect& roi, const VesselConfig& cfg);

/// Average vessel width of the window_side x window_side window centered at
/// `center` (clamped to the image). Throws if the clamped window cannot hold
/// one analysis window.
double average_vessel_width(const GrayImage& img, PointF center, int window_side,
                            const VesselConfig& cfg);

/// Window rect of size side x side centered at `center`, slid to stay inside
/// width x height bounds (shrinks only when the image itself is smaller).
Rect centered_window(PointF center, int side, int img_width, int img_height);

}  // namespace odseg
