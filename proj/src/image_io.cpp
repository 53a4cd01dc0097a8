#include "odseg/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <stdexcept>

namespace odseg {

ColorImage read_image(const std::string& path) {
    cv::Mat mat = cv::imread(path, cv::IMREAD_UNCHANGED);
    if (mat.empty()) throw std::runtime_error("cannot read image: " + path);

    if (mat.depth() == CV_16U) {
        cv::Mat tmp;
        mat.convertTo(tmp, CV_8U, 255.0 / 65535.0);
        mat = tmp;
    } else if (mat.depth() != CV_8U) {
        throw std::runtime_error("unsupported pixel depth in image: " + path);
    }
    if (mat.channels() == 4) {
        cv::Mat tmp;
        cv::mixChannels({mat}, {tmp = cv::Mat(mat.size(), CV_8UC3)}, {0, 0, 1, 1, 2, 2});
        mat = tmp;
    }
    if (mat.channels() != 1 && mat.channels() != 3)
        throw std::runtime_error("unsupported channel count in image: " + path);

    ColorImage out(mat.cols, mat.rows, mat.channels());
    for (int r = 0; r < mat.rows; ++r) {
        const std::uint8_t* row = mat.ptr<std::uint8_t>(r);
        for (int c = 0; c < mat.cols; ++c) {
            if (mat.channels() == 1) {
                out.at(r, c, 0) = row[c];
            } else {
                // OpenCV stores BGR
                out.at(r, c, 0) = row[c * 3 + 2];
                out.at(r, c, 1) = row[c * 3 + 1];
                out.at(r, c, 2) = row[c * 3 + 0];
            }
        }
    }
    return out;
}

BinaryMask read_mask(const std::string& path) {
    const ColorImage img = read_image(path);
    BinaryMask mask(img.width, img.height);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c) mask.set(r, c, img.at(r, c, 0) >= 128);
    return mask;
}

namespace {

void write_png(const std::string& path, const cv::Mat& mat) {
    if (!cv::imwrite(path, mat, {cv::IMWRITE_PNG_COMPRESSION, 6}))
        throw std::runtime_error("cannot write image: " + path);
}

}  // namespace

void write_mask_png(const std::string& path, const BinaryMask& mask) {
    cv::Mat mat(mask.height, mask.width, CV_8UC1);
    for (int r = 0; r < mask.height; ++r) {
        std::uint8_t* row = mat.ptr<std::uint8_t>(r);
        for (int c = 0; c < mask.width; ++c) row[c] = mask.get(r, c) ? 255 : 0;
    }
    write_png(path, mat);
}

void write_gray_png(const std::string& path, const GrayImage& img) {
    cv::Mat mat(img.height, img.width, CV_8UC1);
    for (int r = 0; r < img.height; ++r)
        std::copy_n(&img.data[static_cast<size_t>(r) * img.width], img.width,
                    mat.ptr<std::uint8_t>(r));
    write_png(path, mat);
}

void write_rgb_png(const std::string& path, const ColorImage& img) {
    if (img.channels != 3) throw std::invalid_argument("write_rgb_png: need 3 channels");
    cv::Mat mat(img.height, img.width, CV_8UC3);
    for (int r = 0; r < img.height; ++r) {
        std::uint8_t* row = mat.ptr<std::uint8_t>(r);
        for (int c = 0; c < img.width; ++c) {
            row[c * 3 + 0] = img.at(r, c, 2);
            row[c * 3 + 1] = img.at(r, c, 1);
            row[c * 3 + 2] = img.at(r, c, 0);
        }
    }
    write_png(path, mat);
}

}  // namespace odseg
