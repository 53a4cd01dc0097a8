#include "odseg/segmenter.hpp"

#include <cmath>

namespace odseg {

namespace {

// Horizontal Sobel responses (replicate padding) for columns [c0, c1) of one row.
std::vector<float> row_sobel_gx(const GrayImage& img, int row, int c0, int c1) {
    std::vector<float> out(c1 - c0);
    const int rm = std::max(row - 1, 0), rp = std::min(row + 1, img.height - 1);
    for (int c = c0; c < c1; ++c) {
        const int cm = std::max(c - 1, 0), cp = std::min(c + 1, img.width - 1);
        out[c - c0] = static_cast<float>(
            (img.at(rm, cp) + 2 * img.at(row, cp) + img.at(rp, cp)) -
            (img.at(rm, cm) + 2 * img.at(row, cm) + img.at(rp, cm)));
    }
    return out;
}

double median_abs(std::vector<float> v) {
    for (auto& x : v) x = std::abs(x);
    auto mid = v.begin() + v.size() / 2;
    std::nth_element(v.begin(), mid, v.end());
    return *mid;
}

double mean_intensity(const GrayImage& img, const Rect& r) {
    if (r.empty()) return 0.0;
    double s = 0.0;
    for (int rr = r.top; rr < r.bottom; ++rr)
        for (int cc = r.left; cc < r.right; ++cc) s += img.at(rr, cc);
    return s / static_cast<double>(r.area());
}

BinaryMask otsu_union(const GrayImage& img, const Rect& rect, int split_col, bool dual) {
    BinaryMask m(img.width, img.height);
    if (dual) {
        const Rect left{rect.top, rect.left, rect.bottom, split_col};
        const Rect right{rect.top, split_col, rect.bottom, rect.right};
        const int tl = otsu_threshold(img, left);
        const int tr = otsu_threshold(img, right);
        for (int r = rect.top; r < rect.bottom; ++r)
            for (int c = rect.left; c < rect.right; ++c)
                m.set(r, c, img.at(r, c) >= (c < split_col ? tl : tr));
    } else {
        const int t = otsu_threshold(img, rect);
        for (int r = rect.top; r < rect.bottom; ++r)
            for (int c = rect.left; c < rect.right; ++c) m.set(r, c, img.at(r, c) >= t);
    }
    return m;
}

}  // namespace

RefinedCenter refine_center(const GrayImage& img, const VesselResult& vessels, PixelRC initial) {
    (void)img;
    const Rect& roi = vessels.roi;
    int best_col = -1;
    long long best_count = 0;
    for (int c = roi.left; c < roi.right; ++c) {
        long long count = 0;
        for (int r = roi.top; r < roi.bottom; ++r) count += vessels.mask.get(r, c);
        if (count == 0) continue;
        if (best_col < 0 ||
            std::abs(c - initial.col) < std::abs(best_col - initial.col) ||
            (std::abs(c - initial.col) == std::abs(best_col - initial.col) &&
             count > best_count)) {
            best_col = c;
            best_count = count;
        }
    }
    if (best_col < 0) return {initial, false};
    return {PixelRC{initial.row, best_col}, true};
}

BoundaryPoints find_boundary_points(const GrayImage& img, PixelRC center,
                                    const VesselResult& vessels, int window_halfwidth,
                                    double grad_min) {
    BoundaryPoints out;
    out.row = center.row;
    const int c0 = std::max(0, center.col - window_halfwidth);
    const int c1 = std::min(img.width, center.col + window_halfwidth + 1);
    if (c1 - c0 < 3 || center.row < 0 || center.row >= img.height) return out;

    const auto gx = row_sobel_gx(img, center.row, c0, c1);
    auto is_vessel = [&](int c) {
        return vessels.mask.width == img.width && vessels.mask.get(center.row, c);
    };

    // left boundary: entering the disk, dark -> bright, gx > 0
    for (int c = center.col - 1; c >= c0; --c) {
        if (is_vessel(c)) continue;
        if (gx[c - c0] >= grad_min) {
            out.left_col = c;
            break;
        }
    }
    // right boundary: leaving the disk, bright -> dark, gx < 0
    for (int c = center.col + 1; c < c1; ++c) {
        if (is_vessel(c)) continue;
        if (gx[c - c0] <= -grad_min) {
            out.right_col = c;
            break;
        }
    }
    return out;
}

std::optional<CircumscribeResult> circumscribe(int img_width, int img_height, PixelRC left,
                                               PixelRC right, const SegmenterConfig& cfg) {
    if (left.row != right.row)
        throw std::invalid_argument("circumscribe: points must lie on one row");
    if (left.col >= right.col)
        throw std::invalid_argument("circumscribe: left point must be left of right point");

    const int width = right.col - left.col;
    const double scale = img_width / cfg.reference_width;
    if (width < cfg.disk_diameter_min * scale || width > cfg.disk_diameter_max * scale)
        return std::nullopt;

    CircumscribeResult out;
    out.center = PointF{static_cast<double>(left.row), (left.col + right.col) / 2.0};
    const int height = static_cast<int>(std::lround(width * cfg.diameter_ratio_max));
    const int top = static_cast<int>(std::lround(out.center.row - height / 2.0));
    out.rect = Rect{top, left.col, top + height, right.col}.clipped(img_width, img_height);
    if (out.rect.empty()) return std::nullopt;
    return out;
}

SplitResult split_regions(const GrayImage& img, const VesselResult& vessels, const Rect& rect,
                          const SegmenterConfig& cfg) {
    if (rect.top < vessels.roi.top || rect.left < vessels.roi.left ||
        rect.bottom > vessels.roi.bottom || rect.right > vessels.roi.right)
        throw std::invalid_argument("split_regions: vessel result does not cover the rect");
    if (rect.width() < 3) throw std::invalid_argument("split_regions: rect too narrow");

    const int margin = static_cast<int>(
        std::lround(rect.width() * (1.0 - cfg.split_band_fraction) / 2.0));
    int band_lo = rect.left + margin, band_hi = rect.right - margin;
    if (band_hi - band_lo < 1) {
        band_lo = rect.left + rect.width() / 2;
        band_hi = band_lo + 1;
    }
    const double center_col = (rect.left + rect.right - 1) / 2.0;

    SplitResult out;
    long long best_score = 0;
    int best_col = -1;
    for (int c = band_lo; c < band_hi; ++c) {
        long long score = 0;
        for (int r = rect.top; r < rect.bottom; ++r) {
            if (!vessels.mask.get(r, c)) continue;
            const float dir = vessels.direction_at(r, c);
            if (dir < 0.0f) continue;
            if (std::abs(dir - 90.0) <= cfg.vertical_tolerance_deg) ++score;
        }
        if (score == 0) continue;
        const bool better =
            best_col < 0 || score > best_score ||
            (score == best_score &&
             std::abs(c - center_col) < std::abs(best_col - center_col));
        if (better) {
            best_score = score;
            best_col = c;
        }
    }

    if (best_col < 0) {
        out.split_col = static_cast<int>(std::lround(center_col));
        out.low_confidence = true;
    } else {
        out.split_col = best_col;
    }
    out.split_col = std::clamp(out.split_col, rect.left + 1, rect.right - 2);

    const double left_mean =
        mean_intensity(img, Rect{rect.top, rect.left, rect.bottom, out.split_col});
    const double right_mean =
        mean_intensity(img, Rect{rect.top, out.split_col, rect.bottom, rect.right});
    out.temporal_side = right_mean > left_mean ? DiskBox::TemporalSide::RightOfSplit
                                               : DiskBox::TemporalSide::LeftOfSplit;
    return out;
}

SegmentationResult segment_disk(const GrayImage& img, const LocatorOutcome& located,
                                const SegmenterConfig& cfg, const VesselConfig& vessel_cfg) {
    SegmentationResult result;
    result.low_confidence = located.low_confidence;
    const double scale = img.width / cfg.reference_width;

    // step 1: pull the locator's center toward the vessels
    PixelRC center{static_cast<int>(std::lround(located.center.row)),
                   static_cast<int>(std::lround(located.center.col))};
    {
        const Rect awin = centered_window(located.center, cfg.analysis_window,
                                          img.width, img.height);
        if (awin.width() >= vessel_cfg.window_size && awin.height() >= vessel_cfg.window_size) {
            const VesselResult v0 = segment_vessels(img, awin, vessel_cfg);
            const RefinedCenter rc = refine_center(img, v0, center);
            if (!rc.vessel_found) result.low_confidence = true;
            center = rc.point;
        } else {
            result.low_confidence = true;
        }
    }

    // steps 2-3: boundary points on the scan line, enlarging the window on failure
    std::optional<CircumscribeResult> box;
    int halfwidth = std::max(vessel_cfg.window_size,
                             static_cast<int>(std::lround(cfg.boundary_halfwidth * scale)));
    for (int attempt = 0; attempt <= cfg.enlarge_retries && !box; ++attempt) {
        const int band_h = std::max(vessel_cfg.window_size, 49);
        const Rect band = centered_window(PointF{static_cast<double>(center.row),
                                                 static_cast<double>(center.col)},
                                          2 * halfwidth + 11, img.width, img.height)
                              .clipped(img.width, img.height);
        Rect scan_band = centered_window(PointF{static_cast<double>(center.row),
                                                static_cast<double>(center.col)},
                                         band_h, img.width, img.height);
        scan_band.left = band.left;
        scan_band.right = band.right;

        VesselResult vband;
        if (scan_band.width() >= vessel_cfg.window_size &&
            scan_band.height() >= vessel_cfg.window_size)
            vband = segment_vessels(img, scan_band, vessel_cfg);
        else
            vband.mask = BinaryMask(img.width, img.height);

        const int c0 = std::max(0, center.col - halfwidth);
        const int c1 = std::min(img.width, center.col + halfwidth + 1);
        const double grad_min =
            std::max(cfg.boundary_grad_floor,
                     cfg.boundary_grad_factor * median_abs(row_sobel_gx(img, center.row, c0, c1)));

        const auto bp = find_boundary_points(img, center, vband, halfwidth, grad_min);
        if (bp.left_col && bp.right_col)
            box = circumscribe(img.width, img.height, PixelRC{bp.row, *bp.left_col},
                               PixelRC{bp.row, *bp.right_col}, cfg);
        if (!box) halfwidth = static_cast<int>(std::lround(halfwidth * cfg.enlarge_factor));
    }

    if (!box) {
        // fallback: a default-diameter rect at the refined center
        result.low_confidence = true;
        const int width = static_cast<int>(
            std::lround((cfg.disk_diameter_min + cfg.disk_diameter_max) / 2.0 * scale));
        const int height = static_cast<int>(std::lround(width * cfg.diameter_ratio_max));
        CircumscribeResult fb;
        fb.center = PointF{static_cast<double>(center.row), static_cast<double>(center.col)};
        fb.rect = Rect{center.row - height / 2, center.col - width / 2,
                       center.row - height / 2 + height, center.col - width / 2 + width}
                      .clipped(img.width, img.height);
        box = fb;
    }

    const Rect rect = box->rect;
    result.box.center = box->center;
    result.box.rect = rect;

    // step 4: split at the major vertical vessels, then Otsu each side
    VesselResult vrect;
    bool have_vessels = rect.width() >= vessel_cfg.window_size &&
                        rect.height() >= vessel_cfg.window_size;
    if (have_vessels) {
        vrect = segment_vessels(img, rect, vessel_cfg);
        const SplitResult sp = split_regions(img, vrect, rect, cfg);
        if (sp.low_confidence) result.low_confidence = true;
        result.box.split_col = sp.split_col;
        result.box.temporal_side = sp.temporal_side;
    } else {
        vrect.mask = BinaryMask(img.width, img.height);
        result.low_confidence = true;
        result.box.split_col = std::clamp(
            static_cast<int>(std::lround((rect.left + rect.right - 1) / 2.0)),
            rect.left + 1, std::max(rect.left + 1, rect.right - 2));
        result.box.temporal_side = DiskBox::TemporalSide::LeftOfSplit;
    }

    BinaryMask m = otsu_union(img, rect, result.box.split_col, cfg.dual_threshold);

    // vessels crossing the disk must neither punch holes nor split the mask:
    // fill regions the border flood cannot reach with vessel pixels impassable,
    // then keep the largest component and fill remaining interior holes
    m = fill_holes(m, rect, &vrect.mask);
    m = largest_component(m, rect);
    m = fill_holes(m, rect, nullptr);

    result.mask = m;
    for (int r = rect.top; r < rect.bottom && result.boundary.empty(); ++r)
        for (int c = rect.left; c < rect.right; ++c)
            if (m.get(r, c)) {
                result.boundary = trace_outer_contour(m, PixelRC{r, c});
                break;
            }
    if (result.boundary.empty()) result.low_confidence = true;
    return result;
}

}  // namespace odseg
