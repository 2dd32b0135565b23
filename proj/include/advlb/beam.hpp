#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "advlb/errors.hpp"
#include "advlb/image.hpp"
#include "advlb/params.hpp"
#include "advlb/spectrum.hpp"

namespace advlb {

struct PointDistances {
  double perp = 0.0;   // perpendicular distance to the beam line
  double along = 0.0;  // distance along the line from the beam's entry point
};

// The beam line y = tan(r) x + b over a width x height raster whose pixel
// centers sit at integer coordinates. When the line is vertical
// (|cos r| < 1e-6) it is read as x = b.
class BeamLine {
 public:
  BeamLine(double angle_deg, double intercept, int width, int height) {
    double r = std::fmod(angle_deg, 180.0);
    if (r < 0.0) r += 180.0;
    const double rad = r * std::numbers::pi / 180.0;
    dx_ = std::cos(rad);
    dy_ = std::sin(rad);
    if (std::abs(dx_) < 1e-6) {
      dx_ = 0.0;
      dy_ = 1.0;
      ox_ = intercept;
      oy_ = 0.0;
    } else {
      ox_ = 0.0;
      oy_ = intercept;
    }
    entry_ = entry_parameter(width, height);
  }

  PointDistances measure(double px, double py) const {
    const double rx = px - ox_, ry = py - oy_;
    const double perp = std::abs(rx * dy_ - ry * dx_);
    const double t = rx * dx_ + ry * dy_;
    return {perp, std::max(0.0, t - entry_)};
  }

  bool vertical() const { return dx_ == 0.0; }

 private:
  // Line parameter where the line, traversed along (cos r, sin r), first
  // enters [0, W-1] x [0, H-1]. For a line that misses the rectangle, the
  // smallest projection of the four corners.
  double entry_parameter(int width, int height) const {
    const double xmax = width - 1, ymax = height - 1;
    double t_in = -std::numeric_limits<double>::infinity();
    double t_out = std::numeric_limits<double>::infinity();
    const auto slab = [&](double o, double d, double lo, double hi) {
      if (d == 0.0) {
        if (o < lo || o > hi) t_in = std::numeric_limits<double>::infinity();
        return;
      }
      double a = (lo - o) / d, b = (hi - o) / d;
      if (a > b) std::swap(a, b);
      t_in = std::max(t_in, a);
      t_out = std::min(t_out, b);
    };
    slab(ox_, dx_, 0.0, xmax);
    slab(oy_, dy_, 0.0, ymax);
    if (t_in <= t_out) return t_in;

    double best = std::numeric_limits<double>::infinity();
    for (double cx : {0.0, xmax}) {
      for (double cy : {0.0, ymax}) {
        best = std::min(best, (cx - ox_) * dx_ + (cy - oy_) * dy_);
      }
    }
    return best;
  }

  double ox_ = 0.0, oy_ = 0.0;
  double dx_ = 1.0, dy_ = 0.0;
  double entry_ = 0.0;
};

inline PointDistances beam_geometry(double px, double py, double angle_deg, double intercept,
                                    int width, int height) {
  return BeamLine(angle_deg, intercept, width, height).measure(px, py);
}

struct RenderOptions {
  // Virtual source distance s0 of the inverse-square attenuation, in pixels.
  // Unset means the raster diagonal.
  std::optional<double> source_distance;
  bool attenuation = true;

  friend bool operator==(const RenderOptions&, const RenderOptions&) = default;
};

// A(s) = (s0 / (s0 + s))^2, so A(0) = 1.
inline double attenuation(double along, double source_distance) {
  const double q = source_distance / (source_distance + along);
  return q * q;
}

// Cross-section: 1 inside w/2 - 0.5, linear ramp to 0 at w/2 + 0.5.
inline double cross_section(double perp, double width) {
  return std::clamp(width / 2.0 + 0.5 - perp, 0.0, 1.0);
}

inline BeamLayer render_beam(const BeamParams& theta, int width, int height,
                             const RenderOptions& options = {}) {
  BeamLayer layer(width, height, 0.0f);
  if (theta.intensity == 0.0) return layer;

  const Rgb color = wavelength_to_rgb(theta.lambda);
  const BeamLine line(theta.angle_deg, theta.intercept, width, height);
  const double s0 = options.source_distance.value_or(
      std::hypot(static_cast<double>(width), static_cast<double>(height)));

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const PointDistances dist = line.measure(x, y);
      const double profile = cross_section(dist.perp, theta.width);
      if (profile <= 0.0) continue;
      const double falloff = options.attenuation ? attenuation(dist.along, s0) : 1.0;
      const double gain = theta.intensity * (falloff * profile);
      layer.set_pixel(x, y,
                      {static_cast<float>(gain * color[0]), static_cast<float>(gain * color[1]),
                       static_cast<float>(gain * color[2])});
    }
  }
  return layer;
}

// x + l, clipped to [0, 1] per channel.
inline ImageBuffer fuse(const ImageBuffer& image, const BeamLayer& layer) {
  if (!image.same_shape(layer)) {
    throw DomainError("fuse: image is " + std::to_string(image.width()) + "x" +
                      std::to_string(image.height()) + " but layer is " +
                      std::to_string(layer.width()) + "x" + std::to_string(layer.height()));
  }
  ImageBuffer out = image;
  auto dst = out.data();
  const auto add = layer.data();
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] = std::clamp(dst[i] + add[i], 0.0f, 1.0f);
  }
  return out;
}

inline ImageBuffer apply_beam(const ImageBuffer& image, const BeamParams& theta,
                              const RenderOptions& options = {}) {
  return fuse(image, render_beam(theta, image.width(), image.height(), options));
}

}  // namespace advlb
