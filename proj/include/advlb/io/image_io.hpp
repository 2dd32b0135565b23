#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "advlb/errors.hpp"
#include "advlb/harness/dataset.hpp"
#include "advlb/harness/eval.hpp"
#include "advlb/harness/manifest.hpp"
#include "advlb/image.hpp"

namespace advlb::io {

// 8-bit BGR(A)/gray -> normalized RGB.
inline ImageBuffer from_mat(const cv::Mat& mat) {
  if (mat.empty()) throw DomainError("empty image");
  cv::Mat bgr;
  switch (mat.channels()) {
    case 1: cv::cvtColor(mat, bgr, cv::COLOR_GRAY2BGR); break;
    case 3: bgr = mat; break;
    case 4: cv::cvtColor(mat, bgr, cv::COLOR_BGRA2BGR); break;
    default:
      throw DomainError("unsupported channel count " + std::to_string(mat.channels()));
  }
  cv::Mat f;
  const double scale = bgr.depth() == CV_16U ? 1.0 / 65535.0 : bgr.depth() == CV_8U ? 1.0 / 255.0 : 1.0;
  bgr.convertTo(f, CV_32FC3, scale);

  ImageBuffer img(f.cols, f.rows);
  for (int y = 0; y < f.rows; ++y) {
    const auto* row = f.ptr<cv::Vec3f>(y);
    for (int x = 0; x < f.cols; ++x) {
      img.set_pixel(x, y, {std::clamp(row[x][2], 0.0f, 1.0f), std::clamp(row[x][1], 0.0f, 1.0f),
                           std::clamp(row[x][0], 0.0f, 1.0f)});
    }
  }
  return img;
}

// Normalized RGB -> 8-bit BGR, rounding to nearest.
inline cv::Mat to_mat8(const ImageBuffer& img) {
  cv::Mat out(img.height(), img.width(), CV_8UC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = out.ptr<cv::Vec3b>(y);
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        const float v = std::clamp(img.at(x, y, c), 0.0f, 1.0f);
        row[x][2 - c] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
      }
    }
  }
  return out;
}

inline cv::Mat to_mat32(const ImageBuffer& img) {
  cv::Mat out(img.height(), img.width(), CV_32FC3);
  for (int y = 0; y < img.height(); ++y) {
    auto* row = out.ptr<cv::Vec3f>(y);
    for (int x = 0; x < img.width(); ++x) {
      row[x] = {img.at(x, y, 2), img.at(x, y, 1), img.at(x, y, 0)};
    }
  }
  return out;
}

inline ImageBuffer from_mat32(const cv::Mat& bgr) {
  ImageBuffer img(bgr.cols, bgr.rows);
  for (int y = 0; y < bgr.rows; ++y) {
    const auto* row = bgr.ptr<cv::Vec3f>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      img.set_pixel(x, y, {std::clamp(row[x][2], 0.0f, 1.0f), std::clamp(row[x][1], 0.0f, 1.0f),
                           std::clamp(row[x][0], 0.0f, 1.0f)});
    }
  }
  return img;
}

// PNG or JPEG.
inline ImageBuffer load_image(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw DomainError("image not found: " + path.string());
  const cv::Mat mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED);
  if (mat.empty()) throw DomainError("cannot decode image " + path.string());
  return from_mat(mat);
}

inline ImageBuffer decode_image(const std::vector<std::uint8_t>& bytes) {
  if (bytes.empty()) throw DomainError("cannot decode empty image payload");
  const cv::Mat mat = cv::imdecode(bytes, cv::IMREAD_UNCHANGED);
  if (mat.empty()) throw DomainError("cannot decode image payload");
  return from_mat(mat);
}

inline std::vector<std::uint8_t> encode_png(const ImageBuffer& img) {
  std::vector<std::uint8_t> buf;
  if (!cv::imencode(".png", to_mat8(img), buf)) throw DomainError("PNG encoding failed");
  return buf;
}

inline void save_png(const std::filesystem::path& path, const ImageBuffer& img) {
  if (!cv::imwrite(path.string(), to_mat8(img))) {
    throw DomainError("cannot write PNG " + path.string());
  }
}

// Round-trip through 8-bit, as a PNG export and re-import would.
inline ImageBuffer quantize8(const ImageBuffer& img) {
  ImageBuffer out = img;
  for (float& v : out.data()) v = std::round(std::clamp(v, 0.0f, 1.0f) * 255.0f) / 255.0f;
  return out;
}

inline ImageBuffer resize_image(const ImageBuffer& img, int width, int height) {
  if (img.width() == width && img.height() == height) return img;
  cv::Mat out;
  const bool shrink = width < img.width() && height < img.height();
  cv::resize(to_mat32(img), out, cv::Size(width, height), 0, 0,
             shrink ? cv::INTER_AREA : cv::INTER_LINEAR);
  return from_mat32(out);
}

// Manifest images, resized into the model-input frame on load.
class ManifestSource final : public ImageSource {
 public:
  ManifestSource(DatasetManifest manifest, int width, int height)
      : manifest_(std::move(manifest)), width_(width), height_(height) {}

  std::size_t size() const override { return manifest_.entries.size(); }
  LabelId label(std::size_t i) const override { return manifest_.entries.at(i).label; }
  std::string name(std::size_t i) const override {
    return manifest_.entries.at(i).path.filename().string();
  }
  ImageBuffer load(std::size_t i) const override {
    return resize_image(load_image(manifest_.entries.at(i).path), width_, height_);
  }
  const DatasetManifest& manifest() const { return manifest_; }

 private:
  DatasetManifest manifest_;
  int width_;
  int height_;
};

// Success-rate heatmap, angle rows by intercept columns, `cell` px per cell.
inline void write_heatmap_png(const std::filesystem::path& path, const LayoutGrid& grid,
                              int cell = 16) {
  cv::Mat values(static_cast<int>(grid.angles.size()), static_cast<int>(grid.intercepts.size()),
                 CV_8UC1);
  for (std::size_t a = 0; a < grid.angles.size(); ++a) {
    for (std::size_t b = 0; b < grid.intercepts.size(); ++b) {
      const double rate = std::clamp(grid.at(a, b).success_rate, 0.0, 100.0);
      values.at<std::uint8_t>(static_cast<int>(a), static_cast<int>(b)) =
          static_cast<std::uint8_t>(std::lround(rate * 2.55));
    }
  }
  cv::Mat big, colored;
  cv::resize(values, big, cv::Size(values.cols * cell, values.rows * cell), 0, 0, cv::INTER_NEAREST);
  cv::applyColorMap(big, colored, cv::COLORMAP_JET);
  if (!cv::imwrite(path.string(), colored)) throw DomainError("cannot write " + path.string());
}

}  // namespace advlb::io
