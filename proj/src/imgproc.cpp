#include "odseg/imgproc.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <unordered_map>

namespace odseg {

namespace {

constexpr double kPi = std::numbers::pi;

// Moore neighborhood in clockwise order (screen coordinates, row down).
constexpr std::array<PixelRC, 8> kMoore = {{
    {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1},
}};

int moore_dir(PixelRC from, PixelRC to) {
    for (int d = 0; d < 8; ++d)
        if (from.row + kMoore[d].row == to.row && from.col + kMoore[d].col == to.col) return d;
    return -1;
}

std::array<long long, 256> histogram(const GrayImage& img, const Rect& roi) {
    std::array<long long, 256> h{};
    for (int r = roi.top; r < roi.bottom; ++r)
        for (int c = roi.left; c < roi.right; ++c) h[img.at(r, c)]++;
    return h;
}

// Between-class variance of the split {< t} / {>= t}, as an exact rational
// (S0*w1 - S1*w0)^2 / (w0*w1). Numerators stay within 128 bits for images up
// to ~5e5 pixels; larger inputs fall back to long double in otsu_threshold.
struct VarianceKey {
    unsigned __int128 num = 0;
    unsigned long long den = 1;
};

bool key_greater(const VarianceKey& a, const VarianceKey& b) {
    return a.num * b.den > b.num * a.den;
}

}  // namespace

GrayImage to_gray(const ColorImage& image, ChannelMode mode) {
    if (image.channels != 1 && image.channels != 3)
        throw std::invalid_argument("to_gray: image must have 1 or 3 channels");
    GrayImage out(image.width, image.height);
    if (image.channels == 1) {
        out.data = image.data;
        return out;
    }
    if (mode == ChannelMode::Raw)
        throw std::invalid_argument("to_gray: raw mode requires a single-channel image");
    for (int r = 0; r < image.height; ++r) {
        for (int c = 0; c < image.width; ++c) {
            int v;
            switch (mode) {
                case ChannelMode::Red:
                    v = image.at(r, c, 0);
                    break;
                case ChannelMode::Green:
                    v = image.at(r, c, 1);
                    break;
                default:
                    v = static_cast<int>(std::lround(0.299 * image.at(r, c, 0) +
                                                     0.587 * image.at(r, c, 1) +
                                                     0.114 * image.at(r, c, 2)));
                    break;
            }
            out.at(r, c) = static_cast<std::uint8_t>(std::clamp(v, 0, 255));
        }
    }
    return out;
}

int percentile_threshold(const GrayImage& img, double fraction) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("percentile_threshold: fraction must be in (0, 1]");
    auto h = histogram(img, img.bounds());
    const double need = fraction * static_cast<double>(img.size()) - 1e-9;
    long long cum = 0;
    for (int t = 255; t >= 0; --t) {
        cum += h[t];
        if (static_cast<double>(cum) >= need) return t;
    }
    return 0;
}

int percentile_threshold(const GrayImage& img, double fraction, const BinaryMask& mask) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("percentile_threshold: fraction must be in (0, 1]");
    if (mask.width != img.width || mask.height != img.height)
        throw std::invalid_argument("percentile_threshold: mask dimensions mismatch");
    std::array<long long, 256> h{};
    long long n = 0;
    for (size_t i = 0; i < img.size(); ++i) {
        if (mask.data[i]) {
            h[img.data[i]]++;
            ++n;
        }
    }
    if (n == 0) throw std::invalid_argument("percentile_threshold: empty mask");
    const double need = fraction * static_cast<double>(n) - 1e-9;
    long long cum = 0;
    for (int t = 255; t >= 0; --t) {
        cum += h[t];
        if (static_cast<double>(cum) >= need) return t;
    }
    return 0;
}

BinaryMask binarize(const GrayImage& img, int t) {
    BinaryMask out(img.width, img.height);
    for (size_t i = 0; i < img.size(); ++i) out.data[i] = img.data[i] >= t ? 1 : 0;
    return out;
}

std::vector<Region> connected_components(const BinaryMask& mask) {
    std::vector<Region> regions;
    std::vector<std::uint8_t> visited(mask.size(), 0);
    std::vector<PixelRC> stack;
    for (int r = 0; r < mask.height; ++r) {
        for (int c = 0; c < mask.width; ++c) {
            const size_t idx = static_cast<size_t>(r) * mask.width + c;
            if (!mask.data[idx] || visited[idx]) continue;
            Region reg;
            stack.clear();
            stack.push_back({r, c});
            visited[idx] = 1;
            while (!stack.empty()) {
                PixelRC p = stack.back();
                stack.pop_back();
                reg.pixels.push_back(p);
                for (const auto& d : kMoore) {
                    const int nr = p.row + d.row, nc = p.col + d.col;
                    if (nr < 0 || nr >= mask.height || nc < 0 || nc >= mask.width) continue;
                    const size_t nidx = static_cast<size_t>(nr) * mask.width + nc;
                    if (mask.data[nidx] && !visited[nidx]) {
                        visited[nidx] = 1;
                        stack.push_back({nr, nc});
                    }
                }
            }
            reg.area = static_cast<long long>(reg.pixels.size());
            int top = r, left = c, bottom = r, right = c;
            double sr = 0, sc = 0;
            for (const auto& p : reg.pixels) {
                top = std::min(top, p.row);
                left = std::min(left, p.col);
                bottom = std::max(bottom, p.row);
                right = std::max(right, p.col);
                sr += p.row;
                sc += p.col;
            }
            reg.bbox = Rect{top, left, bottom + 1, right + 1};
            reg.centroid = PointF{sr / reg.area, sc / reg.area};
            reg.circularity = circularity(reg);
            regions.push_back(std::move(reg));
        }
    }
    std::stable_sort(regions.begin(), regions.end(),
                     [](const Region& a, const Region& b) { return a.area > b.area; });
    return regions;
}

double circularity(const Region& region) {
    if (region.pixels.empty()) throw std::invalid_argument("circularity: empty region");
    if (region.pixels.size() == 1) return 1.0;

    const Rect& bb = region.bbox;
    BinaryMask local(bb.width(), bb.height());
    PixelRC start{bb.height(), bb.width()};
    for (const auto& p : region.pixels) {
        const int lr = p.row - bb.top, lc = p.col - bb.left;
        local.set(lr, lc, true);
        if (lr < start.row || (lr == start.row && lc < start.col)) start = {lr, lc};
    }
    auto contour = trace_outer_contour(local, start);
    if (contour.size() < 2) return 1.0;
    double perimeter = 0.0;
    for (size_t i = 0; i < contour.size(); ++i) {
        const PixelRC& a = contour[i];
        const PixelRC& b = contour[(i + 1) % contour.size()];
        const int dr = std::abs(a.row - b.row), dc = std::abs(a.col - b.col);
        perimeter += (dr + dc == 2 && dr == 1) ? std::numbers::sqrt2 : 1.0;
    }
    const double c = 4.0 * kPi * static_cast<double>(region.area) / (perimeter * perimeter);
    return std::clamp(c, 0.0, 1.0);
}

GradientField sobel(const GrayImage& img) {
    if (img.width < 3 || img.height < 3)
        throw std::invalid_argument("sobel: image must be at least 3x3");
    GradientField f;
    f.width = img.width;
    f.height = img.height;
    f.gx.resize(img.size());
    f.gy.resize(img.size());
    for (int r = 0; r < img.height; ++r) {
        const int rm = std::max(r - 1, 0), rp = std::min(r + 1, img.height - 1);
        for (int c = 0; c < img.width; ++c) {
            const int cm = std::max(c - 1, 0), cp = std::min(c + 1, img.width - 1);
            const int gx = (img.at(rm, cp) + 2 * img.at(r, cp) + img.at(rp, cp)) -
                           (img.at(rm, cm) + 2 * img.at(r, cm) + img.at(rp, cm));
            const int gy = (img.at(rp, cm) + 2 * img.at(rp, c) + img.at(rp, cp)) -
                           (img.at(rm, cm) + 2 * img.at(rm, c) + img.at(rm, cp));
            const size_t i = static_cast<size_t>(r) * img.width + c;
            f.gx[i] = static_cast<float>(gx);
            f.gy[i] = static_cast<float>(gy);
        }
    }
    return f;
}

std::vector<float> directional_gradient(const GradientField& field, double angle_deg) {
    const double a = angle_deg * kPi / 180.0;
    const float cs = static_cast<float>(std::cos(a)), sn = static_cast<float>(std::sin(a));
    std::vector<float> out(field.gx.size());
    for (size_t i = 0; i < out.size(); ++i) out[i] = field.gx[i] * cs + field.gy[i] * sn;
    return out;
}

int otsu_threshold(const GrayImage& img, std::optional<Rect> roi) {
    Rect r = roi.value_or(img.bounds());
    if (r.empty() || r.top < 0 || r.left < 0 || r.bottom > img.height || r.right > img.width)
        throw std::invalid_argument("otsu_threshold: empty or out-of-bounds roi");
    const auto h = histogram(img, r);
    const long long n = r.area();

    int populated = 0, only = 0;
    for (int i = 0; i < 256; ++i)
        if (h[i] > 0) {
            ++populated;
            only = i;
        }
    if (populated == 1) return only;  // degenerate histogram: the constant itself

    long long total_sum = 0;
    for (int i = 0; i < 256; ++i) total_sum += static_cast<long long>(i) * h[i];

    const bool exact = n <= 500000;
    int best_t = 0;
    VarianceKey best_key;
    long double best_ld = -1.0L;
    long long w0 = 0, s0 = 0;
    for (int t = 0; t < 256; ++t) {
        // classes: {intensity < t} vs {intensity >= t}
        if (t > 0) {
            w0 += h[t - 1];
            s0 += static_cast<long long>(t - 1) * h[t - 1];
        }
        const long long w1 = n - w0;
        const long long s1 = total_sum - s0;
        if (w0 == 0 || w1 == 0) continue;
        if (exact) {
            const __int128 a = static_cast<__int128>(s0) * w1 - static_cast<__int128>(s1) * w0;
            VarianceKey key{static_cast<unsigned __int128>(a < 0 ? -a : a), 0};
            key.num *= key.num;
            key.den = static_cast<unsigned long long>(w0) * static_cast<unsigned long long>(w1);
            if (key_greater(key, best_key)) {
                best_key = key;
                best_t = t;
            }
        } else {
            const long double a = static_cast<long double>(s0) * w1 - static_cast<long double>(s1) * w0;
            const long double v = a * a / (static_cast<long double>(w0) * w1);
            if (v > best_ld) {
                best_ld = v;
                best_t = t;
            }
        }
    }
    return best_t;
}

RadonDirection radon_direction(const GrayImage& window, int angle_bins, double confidence_min) {
    if (window.width != window.height)
        throw std::invalid_argument("radon_direction: window must be square");
    if (window.width < 15)
        throw std::invalid_argument("radon_direction: window side must be >= 15");
    if (angle_bins < 1) throw std::invalid_argument("radon_direction: need at least one angle");

    const int k = window.width;
    const double center = (k - 1) / 2.0;
    const int max_off = static_cast<int>(std::ceil(center * std::numbers::sqrt2)) + 1;
    const int nbins = 2 * max_off + 1;

    double total = 0.0;
    for (auto v : window.data) total += v;
    const double mean = total / static_cast<double>(window.size());

    std::vector<double> variances(angle_bins, 0.0);
    std::vector<double> sum(nbins), cnt(nbins);
    for (int a = 0; a < angle_bins; ++a) {
        const double theta = kPi * a / angle_bins;
        // offset along the normal of a structure oriented at theta
        const double nx = -std::sin(theta), ny = std::cos(theta);
        std::fill(sum.begin(), sum.end(), 0.0);
        std::fill(cnt.begin(), cnt.end(), 0.0);
        for (int r = 0; r < k; ++r) {
            const double yoff = (r - center) * ny;
            for (int c = 0; c < k; ++c) {
                const double rho = (c - center) * nx + yoff;
                const int b = static_cast<int>(std::lround(rho)) + max_off;
                sum[b] += window.at(r, c);
                cnt[b] += 1.0;
            }
        }
        double var = 0.0;
        for (int b = 0; b < nbins; ++b) {
            if (cnt[b] <= 0.0) continue;
            const double d = sum[b] / cnt[b] - mean;
            var += cnt[b] * d * d;
        }
        variances[a] = var / static_cast<double>(window.size());
    }

    int best = 0;
    for (int a = 1; a < angle_bins; ++a)
        if (variances[a] > variances[best]) best = a;

    std::vector<double> sorted = variances;
    std::nth_element(sorted.begin(), sorted.begin() + angle_bins / 2, sorted.end());
    const double median = sorted[angle_bins / 2];

    RadonDirection out;
    out.angle_deg = 180.0 * best / angle_bins;
    if (median > 0.0)
        out.variance_ratio = variances[best] / median;
    else
        out.variance_ratio = variances[best] > 0.0 ? 1e9 : 0.0;
    out.confident = out.variance_ratio >= confidence_min;
    return out;
}

BinaryMask morph_dilate(const BinaryMask& mask, int radius) {
    if (radius < 0) throw std::invalid_argument("morph_dilate: radius must be >= 0");
    if (radius == 0) return mask;
    std::vector<PixelRC> offsets;
    for (int dr = -radius; dr <= radius; ++dr)
        for (int dc = -radius; dc <= radius; ++dc)
            if (dr * dr + dc * dc <= radius * radius) offsets.push_back({dr, dc});
    BinaryMask out(mask.width, mask.height);
    for (int r = 0; r < mask.height; ++r) {
        for (int c = 0; c < mask.width; ++c) {
            if (!mask.get(r, c)) continue;
            for (const auto& d : offsets) {
                const int nr = r + d.row, nc = c + d.col;
                if (nr >= 0 && nr < mask.height && nc >= 0 && nc < mask.width)
                    out.set(nr, nc, true);
            }
        }
    }
    return out;
}

BinaryMask morph_reconstruct(const BinaryMask& marker, const BinaryMask& mask) {
    if (!marker.same_shape(mask))
        throw std::invalid_argument("morph_reconstruct: dimension mismatch");
    BinaryMask out(mask.width, mask.height);
    std::vector<PixelRC> stack;
    for (int r = 0; r < mask.height; ++r)
        for (int c = 0; c < mask.width; ++c)
            if (marker.get(r, c) && mask.get(r, c) && !out.get(r, c)) {
                out.set(r, c, true);
                stack.push_back({r, c});
                while (!stack.empty()) {
                    PixelRC p = stack.back();
                    stack.pop_back();
                    for (const auto& d : kMoore) {
                        const int nr = p.row + d.row, nc = p.col + d.col;
                        if (nr < 0 || nr >= mask.height || nc < 0 || nc >= mask.width) continue;
                        if (mask.get(nr, nc) && !out.get(nr, nc)) {
                            out.set(nr, nc, true);
                            stack.push_back({nr, nc});
                        }
                    }
                }
            }
    return out;
}

std::vector<PixelRC> trace_outer_contour(const BinaryMask& mask, PixelRC start) {
    if (!mask.get(start.row, start.col))
        throw std::invalid_argument("trace_outer_contour: start is not a foreground pixel");

    auto truthy = [&](int r, int c) {
        return r >= 0 && r < mask.height && c >= 0 && c < mask.width && mask.get(r, c);
    };

    bool isolated = true;
    for (const auto& d : kMoore)
        if (truthy(start.row + d.row, start.col + d.col)) {
            isolated = false;
            break;
        }
    if (isolated) return {start};

    // Walk (pixel, backtrack-direction) states until one repeats; the repeated
    // tail is the closed contour cycle. The artificial seed state may lie off
    // the cycle, which a plain "returned to start" test would mishandle.
    struct State {
        PixelRC p;
        int back;
    };
    std::unordered_map<long long, size_t> seen;
    auto state_key = [&](const State& s) {
        return (static_cast<long long>(s.p.row) * mask.width + s.p.col) * 8 + s.back;
    };

    std::vector<State> sequence;
    State cur{start, 4};  // backtrack west of the topmost-leftmost pixel
    const size_t guard = mask.size() * 8 + 16;
    size_t cycle_begin = 0;
    while (sequence.size() < guard) {
        auto [it, inserted] = seen.emplace(state_key(cur), sequence.size());
        if (!inserted) {
            cycle_begin = it->second;
            break;
        }
        sequence.push_back(cur);
        int found = -1;
        for (int step = 1; step <= 8; ++step) {
            const int d = (cur.back + step) % 8;
            if (truthy(cur.p.row + kMoore[d].row, cur.p.col + kMoore[d].col)) {
                found = step;
                break;
            }
        }
        if (found < 0) return {start};
        const int d = (cur.back + found) % 8;
        const int dprev = (cur.back + found - 1 + 8) % 8;
        const PixelRC next{cur.p.row + kMoore[d].row, cur.p.col + kMoore[d].col};
        const PixelRC back_px{cur.p.row + kMoore[dprev].row, cur.p.col + kMoore[dprev].col};
        cur = State{next, moore_dir(next, back_px)};
    }

    std::vector<PixelRC> contour;
    contour.reserve(sequence.size() - cycle_begin);
    for (size_t i = cycle_begin; i < sequence.size(); ++i) contour.push_back(sequence[i].p);
    return contour;
}

BinaryMask fill_holes(const BinaryMask& mask, const Rect& rect, const BinaryMask* blocked) {
    const Rect r = rect.clipped(mask.width, mask.height);
    if (r.empty()) return mask;
    if (blocked && !blocked->same_shape(mask))
        throw std::invalid_argument("fill_holes: blocked mask dimension mismatch");

    auto passable = [&](int rr, int cc) {
        if (mask.get(rr, cc)) return false;
        if (blocked && blocked->get(rr, cc)) return false;
        return true;
    };

    BinaryMask reached(mask.width, mask.height);
    std::vector<PixelRC> stack;
    auto seed = [&](int rr, int cc) {
        if (passable(rr, cc) && !reached.get(rr, cc)) {
            reached.set(rr, cc, true);
            stack.push_back({rr, cc});
        }
    };
    for (int c = r.left; c < r.right; ++c) {
        seed(r.top, c);
        seed(r.bottom - 1, c);
    }
    for (int rr = r.top; rr < r.bottom; ++rr) {
        seed(rr, r.left);
        seed(rr, r.right - 1);
    }
    // 4-connected background flood (dual of the 8-connected foreground)
    constexpr std::array<PixelRC, 4> k4 = {{{0, 1}, {1, 0}, {0, -1}, {-1, 0}}};
    while (!stack.empty()) {
        PixelRC p = stack.back();
        stack.pop_back();
        for (const auto& d : k4) {
            const int nr = p.row + d.row, nc = p.col + d.col;
            if (!r.contains(nr, nc)) continue;
            if (passable(nr, nc) && !reached.get(nr, nc)) {
                reached.set(nr, nc, true);
                stack.push_back({nr, nc});
            }
        }
    }

    BinaryMask out = mask;
    for (int rr = r.top; rr < r.bottom; ++rr)
        for (int cc = r.left; cc < r.right; ++cc)
            if (!mask.get(rr, cc) && !reached.get(rr, cc)) out.set(rr, cc, true);
    return out;
}

BinaryMask largest_component(const BinaryMask& mask, const Rect& rect) {
    const Rect r = rect.clipped(mask.width, mask.height);
    BinaryMask out(mask.width, mask.height);
    if (r.empty()) return out;

    std::vector<int> label(mask.size(), 0);
    int next_label = 0;
    long long best_area = 0;
    int best_label = 0;
    std::vector<PixelRC> stack;
    for (int rr = r.top; rr < r.bottom; ++rr) {
        for (int cc = r.left; cc < r.right; ++cc) {
            const size_t idx = static_cast<size_t>(rr) * mask.width + cc;
            if (!mask.data[idx] || label[idx] != 0) continue;
            ++next_label;
            long long area = 0;
            label[idx] = next_label;
            stack.push_back({rr, cc});
            while (!stack.empty()) {
                PixelRC p = stack.back();
                stack.pop_back();
                ++area;
                for (const auto& d : kMoore) {
                    const int nr = p.row + d.row, nc = p.col + d.col;
                    if (!r.contains(nr, nc)) continue;
                    const size_t nidx = static_cast<size_t>(nr) * mask.width + nc;
                    if (mask.data[nidx] && label[nidx] == 0) {
                        label[nidx] = next_label;
                        stack.push_back({nr, nc});
                    }
                }
            }
            if (area > best_area) {
                best_area = area;
                best_label = next_label;
            }
        }
    }
    if (best_label == 0) return out;
    for (int rr = r.top; rr < r.bottom; ++rr)
        for (int cc = r.left; cc < r.right; ++cc) {
            const size_t idx = static_cast<size_t>(rr) * mask.width + cc;
            if (label[idx] == best_label) out.data[idx] = 1;
        }
    return out;
}

}  // namespace odseg
