#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "advlb/errors.hpp"

namespace advlb {

using Rgb = std::array<float, 3>;

// Interleaved RGB raster, row-major, channel values normalized to [0, 1].
class ImageBuffer {
 public:
  ImageBuffer() = default;

  ImageBuffer(int width, int height, float fill = 0.0f)
      : width_(width), height_(height) {
    if (width < 1 || height < 1) {
      throw DomainError("image dimensions must be >= 1, got " +
                        std::to_string(width) + "x" + std::to_string(height));
    }
    data_.assign(static_cast<std::size_t>(width) * height * 3, fill);
  }

  ImageBuffer(int width, int height, std::vector<float> data)
      : width_(width), height_(height), data_(std::move(data)) {
    if (width < 1 || height < 1) {
      throw DomainError("image dimensions must be >= 1");
    }
    if (data_.size() != static_cast<std::size_t>(width) * height * 3) {
      throw DomainError("pixel buffer holds " + std::to_string(data_.size()) +
                        " values, expected width*height*3 = " +
                        std::to_string(static_cast<std::size_t>(width) * height * 3));
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t pixel_count() const { return static_cast<std::size_t>(width_) * height_; }
  bool empty() const { return data_.empty(); }

  float& at(int x, int y, int c) { return data_[index(x, y) + c]; }
  float at(int x, int y, int c) const { return data_[index(x, y) + c]; }

  Rgb pixel(int x, int y) const {
    const std::size_t i = index(x, y);
    return {data_[i], data_[i + 1], data_[i + 2]};
  }
  void set_pixel(int x, int y, const Rgb& v) {
    const std::size_t i = index(x, y);
    data_[i] = v[0];
    data_[i + 1] = v[1];
    data_[i + 2] = v[2];
  }

  std::span<float> data() { return data_; }
  std::span<const float> data() const { return data_; }

  bool same_shape(const ImageBuffer& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * width_ + x) * 3;
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<float> data_;
};

// Per-pixel additive contribution of one beam; same layout as ImageBuffer.
using BeamLayer = ImageBuffer;

inline std::array<double, 3> channel_means(const ImageBuffer& img) {
  std::array<double, 3> acc{0.0, 0.0, 0.0};
  const auto d = img.data();
  for (std::size_t i = 0; i < d.size(); i += 3) {
    acc[0] += d[i];
    acc[1] += d[i + 1];
    acc[2] += d[i + 2];
  }
  const double n = static_cast<double>(img.pixel_count());
  return {acc[0] / n, acc[1] / n, acc[2] / n};
}

// Builds an RGB image from interleaved samples; anything but 3 channels is a
// contract violation.
inline ImageBuffer image_from_interleaved(int width, int height, int channels,
                                          std::vector<float> data) {
  if (channels != 3) {
    throw DomainError("expected 3 interleaved channels (RGB), got " + std::to_string(channels));
  }
  return ImageBuffer(width, height, std::move(data));
}

}  // namespace advlb
