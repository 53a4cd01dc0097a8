#include "odseg/locator.hpp"

#include <cmath>

namespace odseg {

namespace {

// higher width wins; ties by larger area, then topmost, then leftmost centroid
bool better_candidate(double w_a, const Region& a, double w_b, const Region& b) {
    if (w_a != w_b) return w_a > w_b;
    if (a.area != b.area) return a.area > b.area;
    if (a.centroid.row != b.centroid.row) return a.centroid.row < b.centroid.row;
    return a.centroid.col < b.centroid.col;
}

}  // namespace

BinaryMask fov_mask(const GrayImage& img, const LocatorConfig& cfg) {
    std::uint8_t lo = 255, hi = 0;
    for (auto v : img.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const int t = std::max<int>(cfg.fov_floor,
                                lo + static_cast<int>(std::lround(cfg.fov_range_fraction * (hi - lo))));
    BinaryMask mask = binarize(img, t);
    if (static_cast<double>(mask.count()) <
        cfg.fov_min_coverage * static_cast<double>(img.size()))
        return BinaryMask(img.width, img.height, true);
    return mask;
}

std::vector<Region> candidate_regions(const GrayImage& img, double fraction,
                                      const LocatorConfig& cfg) {
    const BinaryMask fov = fov_mask(img, cfg);
    const int t = percentile_threshold(img, fraction, fov);
    BinaryMask m = binarize(img, t);
    for (size_t i = 0; i < m.size(); ++i) m.data[i] &= fov.data[i];

    std::vector<Region> regions = connected_components(m);
    std::erase_if(regions, [&](const Region& r) {
        return r.area < cfg.min_region_area || r.circularity < cfg.circularity_min;
    });
    return regions;
}

std::optional<LocatorOutcome> locate_disk(const GrayImage& img, const LocatorConfig& cfg,
                                          const VesselConfig& vessel_cfg) {
    if (img.width < cfg.analysis_window || img.height < cfg.analysis_window)
        throw std::invalid_argument("locate_disk: image smaller than one analysis window");
    if (!(cfg.initial_fraction > 0.0) || cfg.initial_fraction > cfg.max_fraction ||
        cfg.max_fraction > 1.0 || !(cfg.fraction_step > 0.0))
        throw std::invalid_argument("locate_disk: invalid fraction configuration");

    std::optional<LocatorOutcome> best;  // best-so-far across all iterations
    int iterations = 0;
    for (int k = 0;; ++k) {
        const double fraction = cfg.initial_fraction + k * cfg.fraction_step;
        if (fraction > cfg.max_fraction + 1e-12) break;
        ++iterations;

        const auto candidates = candidate_regions(img, fraction, cfg);
        const Region* iter_best = nullptr;
        double iter_best_width = 0.0;
        for (const auto& cand : candidates) {
            double width = 0.0;
            const Rect w = centered_window(cand.centroid, cfg.analysis_window,
                                           img.width, img.height);
            if (w.width() >= vessel_cfg.window_size && w.height() >= vessel_cfg.window_size)
                width = segment_vessels(img, w, vessel_cfg).average_width;

            if (!iter_best || better_candidate(width, cand, iter_best_width, *iter_best)) {
                iter_best = &cand;
                iter_best_width = width;
            }
            if (!best || better_candidate(width, cand, best->average_width, best->candidate)) {
                LocatorOutcome o;
                o.center = cand.centroid;
                o.candidate = cand;
                o.average_width = width;
                o.fraction_used = fraction;
                best = std::move(o);
            }
        }

        if (iter_best && iter_best_width >= cfg.vessel_width_min) {
            LocatorOutcome o;
            o.center = iter_best->centroid;
            o.candidate = *iter_best;
            o.average_width = iter_best_width;
            o.iterations = iterations;
            o.fraction_used = fraction;
            o.low_confidence = false;
            return o;
        }
    }

    if (!best) return std::nullopt;
    best->iterations = iterations;
    best->low_confidence = true;
    return best;
}

}  // namespace odseg
