#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

// Raster conventions used throughout:
//   - pixel (row, col), row 0 at the top, col 0 at the left
//   - Rect is half-open: rows [top, bottom), cols [left, right)
//   - angles are degrees measured from the +col axis toward the +row axis
//     (i.e. screen coordinates, row pointing down)

namespace odseg {

struct PixelRC {
    int row = 0;
    int col = 0;
    bool operator==(const PixelRC&) const = default;
};

struct PointF {
    double row = 0.0;
    double col = 0.0;
};

struct Rect {
    int top = 0;
    int left = 0;
    int bottom = 0;  // exclusive
    int right = 0;   // exclusive

    int width() const { return right - left; }
    int height() const { return bottom - top; }
    long long area() const { return static_cast<long long>(width()) * height(); }
    bool empty() const { return width() <= 0 || height() <= 0; }
    bool contains(int r, int c) const {
        return r >= top && r < bottom && c >= left && c < right;
    }
    Rect clipped(int img_width, int img_height) const {
        Rect out;
        out.top = std::max(0, top);
        out.left = std::max(0, left);
        out.bottom = std::min(img_height, bottom);
        out.right = std::min(img_width, right);
        return out;
    }
    bool operator==(const Rect&) const = default;
};

/// Single-channel 8-bit raster, the pipeline currency.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // row-major, size == width * height

    GrayImage() = default;
    GrayImage(int w, int h, std::uint8_t fill = 0)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {
        if (w < 1 || h < 1) throw std::invalid_argument("GrayImage: dimensions must be >= 1");
    }

    std::uint8_t& at(int r, int c) { return data[static_cast<size_t>(r) * width + c]; }
    std::uint8_t at(int r, int c) const { return data[static_cast<size_t>(r) * width + c]; }
    size_t size() const { return data.size(); }
    Rect bounds() const { return Rect{0, 0, height, width}; }

    GrayImage crop(const Rect& roi) const {
        if (roi.empty() || roi.top < 0 || roi.left < 0 || roi.bottom > height || roi.right > width)
            throw std::invalid_argument("GrayImage::crop: roi out of bounds");
        GrayImage out(roi.width(), roi.height());
        for (int r = roi.top; r < roi.bottom; ++r)
            std::copy(&data[static_cast<size_t>(r) * width + roi.left],
                      &data[static_cast<size_t>(r) * width + roi.right],
                      &out.data[static_cast<size_t>(r - roi.top) * out.width]);
        return out;
    }
};

/// Boolean raster with the same shape as the image it came from.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // 0/1

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false)
        : width(w), height(h), data(static_cast<size_t>(w) * h, fill ? 1 : 0) {
        if (w < 1 || h < 1) throw std::invalid_argument("BinaryMask: dimensions must be >= 1");
    }

    bool get(int r, int c) const { return data[static_cast<size_t>(r) * width + c] != 0; }
    void set(int r, int c, bool v) { data[static_cast<size_t>(r) * width + c] = v ? 1 : 0; }
    size_t size() const { return data.size(); }
    bool same_shape(const BinaryMask& o) const { return width == o.width && height == o.height; }

    long long count() const {
        long long n = 0;
        for (auto v : data) n += v != 0;
        return n;
    }
    bool operator==(const BinaryMask&) const = default;
};

/// Interleaved 8-bit raster with 1 or 3 channels (RGB order when 3).
struct ColorImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;

    ColorImage() = default;
    ColorImage(int w, int h, int ch, std::uint8_t fill = 0)
        : width(w), height(h), channels(ch),
          data(static_cast<size_t>(w) * h * ch, fill) {
        if (w < 1 || h < 1) throw std::invalid_argument("ColorImage: dimensions must be >= 1");
        if (ch != 1 && ch != 3) throw std::invalid_argument("ColorImage: 1 or 3 channels");
    }

    std::uint8_t& at(int r, int c, int ch) {
        return data[(static_cast<size_t>(r) * width + c) * channels + ch];
    }
    std::uint8_t at(int r, int c, int ch) const {
        return data[(static_cast<size_t>(r) * width + c) * channels + ch];
    }
};

/// Per-pixel signed Sobel responses.
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<float> gx;  // positive: left-dark / right-bright
    std::vector<float> gy;  // positive: top-dark / bottom-bright

    float gx_at(int r, int c) const { return gx[static_cast<size_t>(r) * width + c]; }
    float gy_at(int r, int c) const { return gy[static_cast<size_t>(r) * width + c]; }
};

}  // namespace odseg
