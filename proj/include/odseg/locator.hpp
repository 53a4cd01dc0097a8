#pragma once

#include <optional>
#include <vector>

#include "odseg/image.hpp"
#include "odseg/imgproc.hpp"
#include "odseg/vessels.hpp"

namespace odseg {

struct LocatorConfig {
    double initial_fraction = 0.13;  // top share of intensities for the first pass
    double fraction_step = 0.02;
    double max_fraction = 0.30;
    double circularity_min = 0.5;
    long long min_region_area = 30;
    double vessel_width_min = 2.0;   // px; candidates below never win outright
    int analysis_window = 70;        // vessel-width window around each candidate
    int fov_floor = 8;               // camera field-of-view threshold floor
    double fov_range_fraction = 0.10;
    double fov_min_coverage = 0.05;  // below: treat the whole frame as FOV
};

struct LocatorOutcome {
    PointF center;            // centroid of the chosen candidate
    Region candidate;
    double average_width = 0.0;
    int iterations = 0;
    double fraction_used = 0.0;
    bool low_confidence = false;  // no candidate reached vessel_width_min
};

/// Pixels inside the camera field of view: intensity >= max(fov_floor,
/// min + fov_range_fraction * (max - min)). Falls back to the full frame when
/// coverage drops below fov_min_coverage.
BinaryMask fov_mask(const GrayImage& img, const LocatorConfig& cfg);

/// Bright candidate regions at one threshold fraction: top-fraction pixels of
/// the FOV, connected components, area and circularity filtered, area-sorted.
std::vector<Region> candidate_regions(const GrayImage& img, double fraction,
                                      const LocatorConfig& cfg);

/// Iterative optic-disk localization: raise the fraction step by step until a
/// candidate's windowed average vessel width reaches vessel_width_min, then
/// return the candidate with the highest width (ties: larger area, then
/// topmost-leftmost centroid). If no candidate ever qualifies, the best seen
/// is returned flagged low_confidence; no candidates at all yields nullopt.
std::optional<LocatorOutcome> locate_disk(const GrayImage& img, const LocatorConfig& cfg,
                                          const VesselConfig& vessel_cfg);

}  // namespace odseg
