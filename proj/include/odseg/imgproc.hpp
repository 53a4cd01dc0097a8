#pragma once

#include <optional>
#include <vector>

#include "odseg/image.hpp"

namespace odseg {

enum class ChannelMode { Luma, Red, Green, Raw };

/// One maximal 8-connected component of a binary mask.
struct Region {
    std::vector<PixelRC> pixels;  // scan order
    long long area = 0;
    PointF centroid;
    Rect bbox;                    // half-open
    double circularity = 0.0;     // 4*pi*area / perimeter^2, clamped to [0, 1]
};

struct RadonDirection {
    double angle_deg = 0.0;      // dominant structure orientation in [0, 180)
    double variance_ratio = 0.0; // max projection variance / median projection variance
    bool confident = false;      // variance_ratio >= confidence threshold
};

/// Collapse a 1- or 3-channel raster to gray.
/// Luma uses Rec.601 weights 0.299/0.587/0.114, rounded to nearest.
/// Raw requires single-channel input.
GrayImage to_gray(const ColorImage& image, ChannelMode mode);

/// Largest threshold t such that at least fraction*N pixels have intensity >= t,
/// i.e. binarizing at t selects the top `fraction` of pixels up to bin ties.
/// Requires 0 < fraction <= 1.
int percentile_threshold(const GrayImage& img, double fraction);

/// Same, restricted to pixels where `mask` is true (mask must be non-empty).
int percentile_threshold(const GrayImage& img, double fraction, const BinaryMask& mask);

/// Mask pixel true iff intensity >= t. Accepts t in [0, 256]; 256 yields all-false.
BinaryMask binarize(const GrayImage& img, int t);

/// All maximal 8-connected components of true pixels, sorted by area descending
/// (ties keep scan order). Derived fields, including circularity, are populated.
std::vector<Region> connected_components(const BinaryMask& mask);

/// Isoperimetric compactness of the region's pixel set. Perimeter is the traced
/// outer boundary contour (Moore neighborhood, diagonal steps count sqrt(2)).
/// Single pixel is 1.0 by convention.
double circularity(const Region& region);

/// 3x3 Sobel with replicate border padding. Requires width, height >= 3.
GradientField sobel(const GrayImage& img);

/// gx*cos(angle) + gy*sin(angle) per pixel; angle in degrees.
std::vector<float> directional_gradient(const GradientField& field, double angle_deg);

/// Otsu threshold over the 256-bin histogram of `roi` (whole image when absent).
/// Between-class variances are compared exactly; ties resolved to the smallest
/// threshold. A single-bin histogram returns that bin's value.
int otsu_threshold(const GrayImage& img, std::optional<Rect> roi = std::nullopt);

/// Dominant linear-structure orientation of a square window (side >= 15) from
/// count-normalized Radon projections over `angle_bins` uniform angles in
/// [0, 180). confidence_min gates the `confident` flag.
RadonDirection radon_direction(const GrayImage& window, int angle_bins,
                               double confidence_min = 1.5);

/// Dilation with a rasterized disk (dr^2 + dc^2 <= radius^2). Radius 0 is identity.
BinaryMask morph_dilate(const BinaryMask& mask, int radius);

/// Geodesic reconstruction by dilation: the union of mask components that
/// intersect the marker (marker is intersected with mask first).
BinaryMask morph_reconstruct(const BinaryMask& marker, const BinaryMask& mask);

// Shared raster helpers (used by the segmentation pipeline and tests).

/// Outer boundary of the component containing `start` (must be a true pixel),
/// as a closed clockwise Moore contour. Single-pixel components yield {start}.
std::vector<PixelRC> trace_outer_contour(const BinaryMask& mask, PixelRC start);

/// True pixels of `mask` inside `rect` that a 4-connected background flood from
/// the rect border cannot reach are added to the output (hole filling).
/// Pixels true in `blocked` (if given) are impassable for the flood and are
/// filled when unreached.
BinaryMask fill_holes(const BinaryMask& mask, const Rect& rect,
                      const BinaryMask* blocked = nullptr);

/// Largest 8-connected component of `mask` restricted to `rect`
/// (ties keep the first in scan order). Empty input yields an empty mask.
BinaryMask largest_component(const BinaryMask& mask, const Rect& rect);

}  // namespace odseg
