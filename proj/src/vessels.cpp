#include "odseg/vessels.hpp"

#include <cmath>
#include <numbers>

namespace odseg {

namespace {

constexpr int kProfileBand = 3;  // central rows/cols averaged into the 1-D profile

struct Extremum {
    double position;  // plateau midpoint, in samples
    float value;
};

std::vector<Extremum> local_extrema(const std::vector<float>& profile, double threshold) {
    std::vector<Extremum> out;
    const int n = static_cast<int>(profile.size());
    int i = 0;
    while (i < n) {
        int j = i;
        while (j + 1 < n && profile[j + 1] == profile[i]) ++j;
        // runs touching either end cannot be confirmed as extrema
        if (i > 0 && j < n - 1 && std::abs(profile[i]) >= threshold) {
            const float v = profile[i];
            const bool is_min = v < 0 && profile[i - 1] > v && profile[j + 1] > v;
            const bool is_max = v > 0 && profile[i - 1] < v && profile[j + 1] < v;
            if (is_min || is_max) out.push_back({(i + j) / 2.0, v});
        }
        i = j + 1;
    }
    return out;
}

double median_abs(const std::vector<float>& v) {
    std::vector<float> mag(v.size());
    for (size_t i = 0; i < v.size(); ++i) mag[i] = std::abs(v[i]);
    auto mid = mag.begin() + mag.size() / 2;
    std::nth_element(mag.begin(), mid, mag.end());
    return *mid;
}

std::vector<int> tile_positions(int extent, int window, int stride) {
    std::vector<int> out;
    for (int p = 0; p + window <= extent; p += stride) out.push_back(p);
    if (out.empty() || out.back() != extent - window) out.push_back(extent - window);
    return out;
}

}  // namespace

std::vector<EdgePair> validate_edge_pairs(const std::vector<float>& profile,
                                          double magnitude_threshold, int max_pair_distance) {
    if (profile.size() < 3)
        throw std::invalid_argument("validate_edge_pairs: profile needs at least 3 samples");
    const auto extrema = local_extrema(profile, magnitude_threshold);
    std::vector<EdgePair> pairs;
    size_t i = 0;
    while (i < extrema.size()) {
        if (extrema[i].value < 0) {
            for (size_t j = i + 1; j < extrema.size(); ++j) {
                if (extrema[j].value <= 0) continue;
                if (extrema[j].position - extrema[i].position > max_pair_distance) break;
                pairs.push_back({extrema[i].position, extrema[j].position});
                i = j;  // resume after the paired positive edge
                break;
            }
        }
        ++i;
    }
    return pairs;
}

Rect centered_window(PointF center, int side, int img_width, int img_height) {
    const int w = std::min(side, img_width);
    const int h = std::min(side, img_height);
    int top = static_cast<int>(std::lround(center.row)) - h / 2;
    int left = static_cast<int>(std::lround(center.col)) - w / 2;
    top = std::clamp(top, 0, img_height - h);
    left = std::clamp(left, 0, img_width - w);
    return Rect{top, left, top + h, left + w};
}

VesselResult segment_vessels(const GrayImage& img, const Rect& roi, const VesselConfig& cfg) {
    if (roi.top < 0 || roi.left < 0 || roi.bottom > img.height || roi.right > img.width)
        throw std::invalid_argument("segment_vessels: roi out of image bounds");
    if (roi.width() < cfg.window_size || roi.height() < cfg.window_size)
        throw std::invalid_argument("segment_vessels: roi too small for one window");

    const int k = cfg.window_size;
    const GrayImage sub = img.crop(roi);
    const GradientField grad = sobel(sub);

    VesselResult out;
    out.roi = roi;
    out.mask = BinaryMask(img.width, img.height);
    out.direction.assign(static_cast<size_t>(roi.width()) * roi.height(), -1.0f);

    BinaryMask marker(img.width, img.height);
    BinaryMask loose(img.width, img.height);

    const auto ys = tile_positions(roi.height(), k, cfg.stride);
    const auto xs = tile_positions(roi.width(), k, cfg.stride);
    std::vector<float> profile(k);

    for (int wy : ys) {
        for (int wx : xs) {
            const Rect wrect{wy, wx, wy + k, wx + k};
            const auto rd = radon_direction(sub.crop(wrect), cfg.radon_angle_bins,
                                            cfg.radon_confidence_min);
            if (!rd.confident) continue;

            const double normal = (rd.angle_deg + 90.0) * std::numbers::pi / 180.0;
            double nx = std::cos(normal), ny = std::sin(normal);
            const bool scan_x = std::abs(nx) >= std::abs(ny);
            // orient the normal along the scan axis so the profile is the
            // derivative along increasing sample index
            if ((scan_x && nx < 0) || (!scan_x && ny < 0)) {
                nx = -nx;
                ny = -ny;
            }
            const double correction = scan_x ? std::abs(nx) : std::abs(ny);

            const int mid = k / 2;
            for (int j = 0; j < k; ++j) {
                double acc = 0.0;
                for (int b = -(kProfileBand / 2); b <= kProfileBand / 2; ++b) {
                    const int r = scan_x ? wy + mid + b : wy + j;
                    const int c = scan_x ? wx + j : wx + mid + b;
                    acc += grad.gx_at(r, c) * nx + grad.gy_at(r, c) * ny;
                }
                profile[j] = static_cast<float>(acc / kProfileBand);
            }

            const double threshold = std::max(cfg.edge_threshold_floor,
                                              cfg.edge_threshold_factor * median_abs(profile));
            const auto pairs = validate_edge_pairs(profile, threshold, cfg.max_pair_distance);
            if (pairs.empty()) continue;

            VesselSegment seg;
            seg.window_origin = {roi.top + wy, roi.left + wx};
            seg.direction_deg = rd.angle_deg;
            double width_sum = 0.0;
            for (const auto& p : pairs) {
                seg.edge_pairs.push_back({p.left * correction, p.right * correction});
                width_sum += (p.right - p.left) * correction;

                const int lo = static_cast<int>(std::ceil(p.left));
                const int hi = static_cast<int>(std::floor(p.right));
                for (int j = std::max(0, lo); j <= std::min(k - 1, hi); ++j) {
                    for (int b = -(kProfileBand / 2); b <= kProfileBand / 2; ++b) {
                        const int r = scan_x ? wy + mid + b : wy + j;
                        const int c = scan_x ? wx + j : wx + mid + b;
                        marker.set(roi.top + r, roi.left + c, true);
                    }
                }
            }
            seg.width = width_sum / static_cast<double>(pairs.size());
            out.segments.push_back(std::move(seg));

            for (int r = wy; r < wy + k; ++r) {
                for (int c = wx; c < wx + k; ++c) {
                    const double mag = std::hypot(grad.gx_at(r, c), grad.gy_at(r, c));
                    if (mag >= threshold / 2.0) loose.set(roi.top + r, roi.left + c, true);
                    auto& dir = out.direction[static_cast<size_t>(r) * roi.width() + c];
                    if (dir < 0.0f) dir = static_cast<float>(rd.angle_deg);
                }
            }
        }
    }

    out.mask = morph_reconstruct(marker, loose);
    for (size_t i = 0; i < marker.size(); ++i)
        if (marker.data[i]) out.mask.data[i] = 1;

    if (!out.segments.empty()) {
        double s = 0.0;
        for (const auto& seg : out.segments) s += seg.width;
        out.average_width = s / static_cast<double>(out.segments.size());
    }
    return out;
}

double average_vessel_width(const GrayImage& img, PointF center, int window_side,
                            const VesselConfig& cfg) {
    const Rect w = centered_window(center, window_side, img.width, img.height);
    if (w.width() < cfg.window_size || w.height() < cfg.window_size)
        throw std::invalid_argument("average_vessel_width: window degenerate after clamping");
    return segment_vessels(img, w, cfg).average_width;
}

}  // namespace odseg
