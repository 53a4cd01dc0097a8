#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include "odseg/image.hpp"

// Synthetic raster builders shared by the unit and acceptance suites.
namespace testutil {

// Dark bar of the given perpendicular width through the image center, at
// `angle_deg` measured from the +col axis toward the +row axis (the same
// convention the library uses). Edges get a ~1 px linear transition.
inline odseg::GrayImage render_bar(int size, double width, double angle_deg,
                                   std::uint8_t background = 200, std::uint8_t bar = 60) {
    odseg::GrayImage img(size, size, background);
    const double theta = angle_deg * std::numbers::pi / 180.0;
    const double nx = -std::sin(theta), ny = std::cos(theta);  // unit normal
    const double cx = (size - 1) / 2.0;
    for (int r = 0; r < size; ++r)
        for (int c = 0; c < size; ++c) {
            const double d = std::abs((c - cx) * nx + (r - cx) * ny);
            const double cover = std::clamp(width / 2.0 + 0.5 - d, 0.0, 1.0);
            img.at(r, c) = static_cast<std::uint8_t>(
                std::lround(background + (bar - background) * cover));
        }
    return img;
}

// Filled circle (hard edge) on a constant background.
inline odseg::GrayImage render_disk(int w, int h, double cr, double cc, double radius,
                                    std::uint8_t background, std::uint8_t value) {
    odseg::GrayImage img(w, h, background);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if ((r - cr) * (r - cr) + (c - cc) * (c - cc) <= radius * radius)
                img.at(r, c) = value;
    return img;
}

inline odseg::BinaryMask disk_mask(int w, int h, double cr, double cc, double radius) {
    odseg::BinaryMask m(w, h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
            if ((r - cr) * (r - cr) + (c - cc) * (c - cc) <= radius * radius) m.set(r, c, true);
    return m;
}

// Small deterministic RNG for test data (xorshift64*).
struct TestRng {
    std::uint64_t state;
    explicit TestRng(std::uint64_t seed) : state(seed ? seed : 0x853c49e6748fea9bull) {}
    std::uint64_t next() {
        state ^= state >> 12;
        state ^= state << 25;
        state ^= state >> 27;
        return state * 0x2545F4914F6CDD1Dull;
    }
    int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
};

inline odseg::GrayImage random_image(int w, int h, TestRng& rng) {
    odseg::GrayImage img(w, h);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.below(256));
    return img;
}

inline odseg::BinaryMask random_mask(int w, int h, TestRng& rng) {
    odseg::BinaryMask m(w, h);
    for (auto& v : m.data) v = static_cast<std::uint8_t>(rng.below(2));
    return m;
}

}  // namespace testutil
