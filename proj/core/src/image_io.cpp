#include "multicolor/image_io.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace multicolor {

namespace {

unsigned char to_byte(float v) {
    const float c = std::clamp(v, 0.0f, 1.0f);
    return static_cast<unsigned char>(std::lround(c * 255.0f));
}

}  // namespace

RgbImage read_rgb(const std::filesystem::path& path) {
    cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) throw ImageIoError("cannot decode image: " + path.string());
    RgbImage img(bgr.rows, bgr.cols);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            img.at(y, x, 0) = static_cast<float>(row[x][2]) / 255.0f;
            img.at(y, x, 1) = static_cast<float>(row[x][1]) / 255.0f;
            img.at(y, x, 2) = static_cast<float>(row[x][0]) / 255.0f;
        }
    }
    return img;
}

void write_png(const std::filesystem::path& path, const RgbImage& img) {
    cv::Mat bgr(img.height(), img.width(), CV_8UC3);
    for (int y = 0; y < img.height(); ++y) {
        auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width(); ++x) {
            row[x] = cv::Vec3b(to_byte(img.at(y, x, 2)), to_byte(img.at(y, x, 1)), to_byte(img.at(y, x, 0)));
        }
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    if (!cv::imwrite(path.string(), bgr)) throw ImageIoError("cannot write image: " + path.string());
}

void write_png(const std::filesystem::path& path, const GrayImage& img) {
    cv::Mat gray(img.height(), img.width(), CV_8UC1);
    for (int y = 0; y < img.height(); ++y) {
        auto* row = gray.ptr<unsigned char>(y);
        for (int x = 0; x < img.width(); ++x) row[x] = to_byte(img.at(y, x, 0));
    }
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    if (!cv::imwrite(path.string(), gray)) throw ImageIoError("cannot write image: " + path.string());
}

RgbImage quantize_8bit(const RgbImage& img) {
    RgbImage out = img;
    for (float& v : out.data()) v = static_cast<float>(to_byte(v)) / 255.0f;
    return out;
}

RgbImage resize_bilinear(const RgbImage& img, int height, int width) {
    if (height <= 0 || width <= 0) throw std::invalid_argument("resize_bilinear: bad target size");
    if (img.height() == height && img.width() == width) return img;
    cv::Mat src(img.height(), img.width(), CV_32FC3, const_cast<float*>(img.data().data()));
    cv::Mat dst;
    cv::resize(src, dst, cv::Size(width, height), 0.0, 0.0, cv::INTER_LINEAR);
    RgbImage out(height, width);
    std::copy(dst.ptr<float>(0), dst.ptr<float>(0) + out.data().size(), out.data().begin());
    return out;
}

}  // namespace multicolor
