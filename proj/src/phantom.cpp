#include "odseg/phantom.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace odseg {

namespace {

constexpr double kPi = std::numbers::pi;

// splitmix64: tiny, fully specified, identical on every platform
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
    int uniform_int(int a, int b) {  // inclusive
        return a + static_cast<int>(next() % static_cast<std::uint64_t>(b - a + 1));
    }
};

struct Vec2 {
    double x = 0.0, y = 0.0;  // x: col, y: row
};

double dist(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

Vec2 bezier(Vec2 p0, Vec2 p1, Vec2 p2, double t) {
    const double u = 1.0 - t;
    return {u * u * p0.x + 2 * u * t * p1.x + t * t * p2.x,
            u * u * p0.y + 2 * u * t * p1.y + t * t * p2.y};
}

struct VesselPath {
    Vec2 p0, p1, p2;
    double width0 = 0.0;
    double taper = 0.0;
};

class Canvas {
public:
    Canvas(int w, int h, double fill) : w_(w), h_(h), data_(static_cast<size_t>(w) * h, fill) {}
    double& at(int r, int c) { return data_[static_cast<size_t>(r) * w_ + c]; }
    double at(int r, int c) const { return data_[static_cast<size_t>(r) * w_ + c]; }
    int width() const { return w_; }
    int height() const { return h_; }

private:
    int w_, h_;
    std::vector<double> data_;
};

// max-composited coverage of all vessel stamps
void stamp_path(Canvas& alpha, const VesselPath& v) {
    const double approx_len = dist(v.p0, v.p1) + dist(v.p1, v.p2);
    const int steps = std::max(8, static_cast<int>(approx_len * 2.0));
    for (int s = 0; s <= steps; ++s) {
        const double t = static_cast<double>(s) / steps;
        const Vec2 p = bezier(v.p0, v.p1, v.p2, t);
        const double radius = std::max(0.8, (v.width0 * (1.0 - v.taper * t)) / 2.0);
        const int r0 = std::max(0, static_cast<int>(std::floor(p.y - radius - 1)));
        const int r1 = std::min(alpha.height() - 1, static_cast<int>(std::ceil(p.y + radius + 1)));
        const int c0 = std::max(0, static_cast<int>(std::floor(p.x - radius - 1)));
        const int c1 = std::min(alpha.width() - 1, static_cast<int>(std::ceil(p.x + radius + 1)));
        for (int r = r0; r <= r1; ++r)
            for (int c = c0; c <= c1; ++c) {
                const double d = std::hypot(c - p.x, r - p.y);
                const double a = std::clamp(radius + 0.5 - d, 0.0, 1.0);
                if (a > alpha.at(r, c)) alpha.at(r, c) = a;
            }
    }
}

// 2x2 supersampled coverage of an axis-aligned ellipse
double ellipse_coverage(double r, double c, Vec2 center, double a, double b) {
    static constexpr double off[2] = {-0.25, 0.25};
    int inside = 0;
    for (double dr : off)
        for (double dc : off) {
            const double fx = (c + dc - center.x) / a;
            const double fy = (r + dr - center.y) / b;
            if (fx * fx + fy * fy <= 1.0) ++inside;
        }
    return inside / 4.0;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    Rng r(base ^ (0xA24BAED4963EE407ull * (index + 1)));
    return r.next();
}

const char* phantom_kind_name(PhantomKind kind) {
    switch (kind) {
        case PhantomKind::Distractor: return "distractor";
        case PhantomKind::Dim: return "dim";
        case PhantomKind::SplitContrast: return "split_contrast";
        default: return "standard";
    }
}

Phantom make_phantom(const PhantomSpec& spec) {
    if (spec.width < 200 || spec.height < 200)
        throw std::invalid_argument("make_phantom: canvas must be at least 200x200");
    Rng rng(spec.seed * 0x9E3779B97F4A7C15ull + 0x123456789ull);

    const int w = spec.width, h = spec.height;
    const Vec2 fov_center{w / 2.0, h / 2.0};
    const double fov_r = 0.47 * std::min(w, h);
    const double scale = std::min(w, h) / 565.0;

    // ---- geometry ----
    const bool dim = spec.kind == PhantomKind::Dim;
    const double dia_h = (dim ? rng.uniform(75, 130) : rng.uniform(75, 160)) * scale;
    const double ratio = rng.uniform(1.05, 1.2);
    const double semi_a = dia_h / 2.0, semi_b = dia_h * ratio / 2.0;

    const double ring_mid = 0.915 * fov_r, ring_sigma = 14.0 * scale;
    double place_max = std::min(0.5 * fov_r, fov_r - 1.5 * semi_b - 25.0 * scale);
    if (dim) place_max = std::min(place_max, ring_mid - 3.0 * ring_sigma - semi_b - 15.0);
    place_max = std::max(place_max, 4.0);
    const double place_dist = rng.uniform(0, place_max);
    const double place_angle = rng.uniform(0, 2 * kPi);
    const Vec2 disk{fov_center.x + place_dist * std::cos(place_angle),
                    fov_center.y + place_dist * std::sin(place_angle)};
    const int trunk_col = static_cast<int>(std::lround(disk.x + rng.uniform(-3, 3)));

    // ---- intensities ----
    const double bg = 95.0;
    double bright, nasal;
    switch (spec.kind) {
        case PhantomKind::Dim:
            bright = rng.uniform(148, 158);
            nasal = bright - rng.uniform(18, 25);
            break;
        case PhantomKind::SplitContrast:
            bright = rng.uniform(195, 215);
            nasal = bg + rng.uniform(25, 35);
            break;
        default:
            bright = rng.uniform(185, 215);
            nasal = bright - rng.uniform(25, 45);
            break;
    }
    const bool temporal_left = rng.uniform() < 0.5;

    // ---- background texture bumps (kept clear of the disk) ----
    struct Bump {
        Vec2 center;
        double amp, sigma;
    };
    std::vector<Bump> bumps;
    std::vector<std::pair<Vec2, double>> protected_centers;  // (point, keep-away radius)
    const int n_bumps = 4;
    for (int i = 0; i < n_bumps; ++i) {
        Bump b;
        b.amp = rng.uniform(3, 6);
        b.sigma = rng.uniform(50, 90) * scale;
        const double d = rng.uniform(0, 0.8 * fov_r);
        const double ang = rng.uniform(0, 2 * kPi);
        b.center = {fov_center.x + d * std::cos(ang), fov_center.y + d * std::sin(ang)};
        bumps.push_back(b);
        protected_centers.push_back({b.center, 85.0 * scale});
    }

    // ---- distractor placement ----
    bool has_distractor = spec.kind == PhantomKind::Distractor;
    Vec2 distractor{};
    double distractor_r = 0.0, distractor_val = 0.0;
    if (has_distractor) {
        distractor_r = rng.uniform(30, 50) * scale;
        distractor_val = bright + rng.uniform(0, 8);
        for (int attempt = 0; attempt < 200; ++attempt) {
            const double d = rng.uniform(0, fov_r - distractor_r - 15.0 * scale);
            const double ang = rng.uniform(0, 2 * kPi);
            const Vec2 p{fov_center.x + d * std::cos(ang), fov_center.y + d * std::sin(ang)};
            if (dist(p, disk) < 200.0 * scale + distractor_r) continue;
            if (std::abs(p.x - trunk_col) < 110.0 * scale) continue;
            distractor = p;
            break;
        }
        if (distractor.x == 0.0 && distractor.y == 0.0) has_distractor = false;
        else protected_centers.push_back({distractor, 110.0 * scale});
    }

    // ---- vessel tree ----
    std::vector<VesselPath> vessels;
    const double trunk_width = rng.uniform(4.5, 6.0);
    for (int dir : {-1, +1}) {
        VesselPath v;
        const double len = rng.uniform(140, 220) * scale;
        v.p0 = {static_cast<double>(trunk_col), disk.y};
        v.p2 = {trunk_col + rng.uniform(-6, 6), disk.y + dir * len};
        v.p1 = {trunk_col + rng.uniform(-8, 8), disk.y + dir * len / 2.0};
        v.width0 = trunk_width;
        v.taper = 0.35;
        vessels.push_back(v);
    }
    const int n_branches = 7;
    for (int i = 0; i < n_branches; ++i) {
        const int quadrant = i % 4;
        for (int attempt = 0; attempt < 30; ++attempt) {
            const double phi = rng.uniform(15, 75) * kPi / 180.0;
            const double sx = (quadrant == 0 || quadrant == 1) ? 1.0 : -1.0;
            const double sy = (quadrant == 1 || quadrant == 2) ? 1.0 : -1.0;
            const Vec2 d{sx * std::cos(phi), sy * std::sin(phi)};
            // root just outside the disk rim so branches do not slice the
            // bright region into fragments; the trunk alone crosses the disk
            const Vec2 anchor{static_cast<double>(trunk_col), disk.y + rng.uniform(-10, 10)};
            double rim = 0.0;
            for (double s = 0.0; s < 4.0 * semi_b; s += 2.0) {
                const double fx = (anchor.x + d.x * s - disk.x) / semi_a;
                const double fy = (anchor.y + d.y * s - disk.y) / semi_b;
                rim = s;
                if (fx * fx + fy * fy > 1.0) break;
            }
            const Vec2 start{anchor.x + d.x * rim * 1.06, anchor.y + d.y * rim * 1.06};
            double len = rng.uniform(120, 240) * scale;
            // stay inside the field of view; on dim phantoms also short of the
            // glare ring, which must stay one (circularity-failing) annulus
            const double reach = dim ? 0.75 * fov_r : fov_r - 10.0;
            for (double t = 0.1; t <= 1.0; t += 0.05) {
                const Vec2 p{start.x + d.x * len * t, start.y + d.y * len * t};
                if (dist(p, fov_center) > reach) {
                    len *= std::max(0.3, t - 0.05);
                    break;
                }
            }
            if (len < 50.0 * scale) continue;
            const double bend = rng.uniform(-20, 20);
            VesselPath v;
            v.p0 = start;
            v.p2 = {start.x + d.x * len, start.y + d.y * len};
            v.p1 = {(v.p0.x + v.p2.x) / 2.0 - d.y * bend, (v.p0.y + v.p2.y) / 2.0 + d.x * bend};
            v.width0 = rng.uniform(2.5, 4.5);
            v.taper = 0.45;

            bool clear = true;
            for (double t = 0.0; t <= 1.0 && clear; t += 0.04) {
                const Vec2 p = bezier(v.p0, v.p1, v.p2, t);
                for (const auto& [pc, radius] : protected_centers)
                    if (dist(p, pc) < radius) {
                        clear = false;
                        break;
                    }
            }
            if (!clear) continue;
            vessels.push_back(v);
            break;
        }
    }
    const double vessel_val = rng.uniform(40, 52);

    // ---- paint ----
    Canvas canvas(w, h, 2.0);
    const double ring_peak = rng.uniform(180, 195);
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const double dfov = std::hypot(c - fov_center.x, r - fov_center.y);
            if (dfov > fov_r) continue;
            double v = bg;
            for (const auto& b : bumps) {
                const double dd = std::hypot(c - b.center.x, r - b.center.y);
                double damp = 1.0;
                const double to_disk = std::hypot(c - disk.x, r - disk.y);
                const double moat_in = semi_b + 40.0 * scale, moat_out = moat_in + 60.0 * scale;
                if (to_disk < moat_out)
                    damp = std::clamp((to_disk - moat_in) / (moat_out - moat_in), 0.0, 1.0);
                v += damp * b.amp * std::exp(-dd * dd / (2 * b.sigma * b.sigma));
            }
            if (dim) {
                const double dr = dfov - ring_mid;
                v += (ring_peak - bg) * std::exp(-dr * dr / (2 * ring_sigma * ring_sigma));
            }
            canvas.at(r, c) = v;
        }
    }

    // disk (temporal half brighter), then distractor
    BinaryMask gt(w, h);
    const int dr0 = std::max(0, static_cast<int>(disk.y - semi_b - 2));
    const int dr1 = std::min(h - 1, static_cast<int>(disk.y + semi_b + 2));
    const int dc0 = std::max(0, static_cast<int>(disk.x - semi_a - 2));
    const int dc1 = std::min(w - 1, static_cast<int>(disk.x + semi_a + 2));
    for (int r = dr0; r <= dr1; ++r) {
        for (int c = dc0; c <= dc1; ++c) {
            const double cov = ellipse_coverage(r, c, disk, semi_a, semi_b);
            if (cov <= 0.0) continue;
            const bool left_of_trunk = c < trunk_col;
            const double side_val = (left_of_trunk == temporal_left) ? bright : nasal;
            const double fx = (c - disk.x) / semi_a, fy = (r - disk.y) / semi_b;
            const double shade = 6.0 * (fx * fx + fy * fy);
            canvas.at(r, c) = canvas.at(r, c) * (1.0 - cov) + (side_val - shade) * cov;
            const double gx = (c - disk.x) / semi_a, gy = (r - disk.y) / semi_b;
            if (gx * gx + gy * gy <= 1.0) gt.set(r, c, true);
        }
    }
    if (has_distractor) {
        const int er0 = std::max(0, static_cast<int>(distractor.y - distractor_r - 2));
        const int er1 = std::min(h - 1, static_cast<int>(distractor.y + distractor_r + 2));
        const int ec0 = std::max(0, static_cast<int>(distractor.x - distractor_r - 2));
        const int ec1 = std::min(w - 1, static_cast<int>(distractor.x + distractor_r + 2));
        for (int r = er0; r <= er1; ++r)
            for (int c = ec0; c <= ec1; ++c) {
                const double cov = ellipse_coverage(r, c, distractor, distractor_r, distractor_r);
                if (cov > 0.0)
                    canvas.at(r, c) = canvas.at(r, c) * (1.0 - cov) + distractor_val * cov;
            }
    }

    // vessels on top
    Canvas alpha(w, h, 0.0);
    for (const auto& v : vessels) stamp_path(alpha, v);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            const double a = alpha.at(r, c);
            if (a > 0.0 && std::hypot(c - fov_center.x, r - fov_center.y) <= fov_r)
                canvas.at(r, c) = canvas.at(r, c) * (1.0 - a) + vessel_val * a;
        }

    // fine noise inside the field of view, gentler near the disk rim so noise
    // warts cannot roughen the thresholded disk boundary, then quantize
    Phantom out;
    out.image = GrayImage(w, h);
    const double moat_in = semi_b + 40.0 * scale, moat_out = moat_in + 60.0 * scale;
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            double v = canvas.at(r, c);
            const int noise = rng.uniform_int(-3, 3);  // drawn per pixel for determinism
            if (std::hypot(c - fov_center.x, r - fov_center.y) <= fov_r) {
                const double to_disk = std::hypot(c - disk.x, r - disk.y);
                const double damp =
                    std::clamp((to_disk - moat_in) / (moat_out - moat_in), 0.0, 1.0);
                const int amp = 1 + static_cast<int>(std::lround(2.0 * damp));
                v += std::clamp(noise, -amp, amp);
            }
            out.image.at(r, c) =
                static_cast<std::uint8_t>(std::clamp(static_cast<int>(std::lround(v)), 0, 255));
        }

    out.gt_disk = std::move(gt);
    out.disk_center = PointF{disk.y, disk.x};
    out.diameter_h = 2 * semi_a;
    out.diameter_v = 2 * semi_b;
    out.trunk_col = trunk_col;
    out.kind = spec.kind;
    return out;
}

}  // namespace odseg
