// SPDX-License-Identifier: Apache-2.0
#include "ptv/io_image.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include <cmath>
#include <stdexcept>

namespace ptv {

Image read_image(const std::string& path) {
    cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
    if (bgr.empty()) throw std::runtime_error("read_image: cannot decode " + path);
    Image out(bgr.rows, bgr.cols);
    for (int y = 0; y < bgr.rows; ++y) {
        const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            out.at(0, y, x) = row[x][2] / 255.0;
            out.at(1, y, x) = row[x][1] / 255.0;
            out.at(2, y, x) = row[x][0] / 255.0;
        }
    }
    return out;
}

void write_image(const std::string& path, const Image& img) {
    cv::Mat bgr(img.h, img.w, CV_8UC3);
    auto q = [](double v) -> unsigned char {
        const double c = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
        return static_cast<unsigned char>(std::lround(c * 255.0));
    };
    for (int y = 0; y < img.h; ++y) {
        cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.w; ++x) {
            row[x][2] = q(img.at(0, y, x));
            row[x][1] = q(img.at(1, y, x));
            row[x][0] = q(img.at(2, y, x));
        }
    }
    if (!cv::imwrite(path, bgr)) throw std::runtime_error("write_image: cannot write " + path);
}

SegMask read_mask(const std::string& path) {
    cv::Mat gray = cv::imread(path, cv::IMREAD_GRAYSCALE);
    if (gray.empty()) throw std::runtime_error("read_mask: cannot decode " + path);
    SegMask out(gray.rows, gray.cols);
    for (int y = 0; y < gray.rows; ++y) {
        const unsigned char* row = gray.ptr<unsigned char>(y);
        for (int x = 0; x < gray.cols; ++x) out.at(y, x) = row[x];
    }
    return out;
}

void write_mask(const std::string& path, const SegMask& mask) {
    cv::Mat gray(mask.h, mask.w, CV_8UC1);
    for (int y = 0; y < mask.h; ++y) {
        unsigned char* row = gray.ptr<unsigned char>(y);
        for (int x = 0; x < mask.w; ++x) row[x] = mask.at(y, x);
    }
    if (!cv::imwrite(path, gray)) throw std::runtime_error("write_mask: cannot write " + path);
}

}  // namespace ptv
