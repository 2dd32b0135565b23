#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "advlb/errors.hpp"
#include "advlb/rng.hpp"
#include "advlb/spectrum.hpp"

namespace advlb {

// The five searchable beam dimensions, in canonical order.
enum class Dim : int { Lambda = 0, Angle = 1, Intercept = 2, Width = 3, Intensity = 4 };

inline constexpr std::array<Dim, 5> kAllDims{Dim::Lambda, Dim::Angle, Dim::Intercept,
                                             Dim::Width, Dim::Intensity};

inline std::string_view dim_name(Dim d) {
  switch (d) {
    case Dim::Lambda: return "lambda";
    case Dim::Angle: return "r";
    case Dim::Intercept: return "b";
    case Dim::Width: return "w";
    case Dim::Intensity: return "alpha";
  }
  return "?";
}

inline Dim dim_from_name(std::string_view name) {
  for (Dim d : kAllDims) {
    if (dim_name(d) == name) return d;
  }
  if (name == "wavelength") return Dim::Lambda;
  if (name == "angle") return Dim::Angle;
  if (name == "intercept") return Dim::Intercept;
  if (name == "width") return Dim::Width;
  if (name == "intensity") return Dim::Intensity;
  throw DomainError("unknown beam dimension '" + std::string(name) + "'");
}

// theta = (lambda, r, b, w, alpha).
//   lambda: wavelength in nm
//   angle_deg: beam angle r in degrees, [0, 180)
//   intercept: b in pixels of the model-input frame
//   width: w in pixels
//   intensity: alpha in [0, 1]
struct BeamParams {
  Wavelength lambda{580.0};
  double angle_deg = 45.0;
  double intercept = 0.0;
  double width = 20.0;
  double intensity = 1.0;

  double get(Dim d) const {
    switch (d) {
      case Dim::Lambda: return lambda.nanometers;
      case Dim::Angle: return angle_deg;
      case Dim::Intercept: return intercept;
      case Dim::Width: return width;
      case Dim::Intensity: return intensity;
    }
    return 0.0;
  }

  void set(Dim d, double v) {
    switch (d) {
      case Dim::Lambda: lambda.nanometers = v; break;
      case Dim::Angle: angle_deg = v; break;
      case Dim::Intercept: intercept = v; break;
      case Dim::Width: width = v; break;
      case Dim::Intensity: intensity = v; break;
    }
  }

  std::array<double, 5> as_array() const {
    return {lambda.nanometers, angle_deg, intercept, width, intensity};
  }

  friend bool operator==(const BeamParams&, const BeamParams&) = default;
};

// Per-dimension box [min, max] restricting theta.
struct ParamBounds {
  BeamParams min{Wavelength{380.0}, 0.0, 0.0, 1.0, 0.5};
  BeamParams max{Wavelength{750.0}, 179.0, 400.0, 40.0, 1.0};

  void validate() const {
    for (Dim d : kAllDims) {
      const double lo = min.get(d), hi = max.get(d);
      if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw DomainError("non-finite bound for " + std::string(dim_name(d)));
      }
      if (lo > hi) {
        throw DomainError("degenerate bounds for " + std::string(dim_name(d)) + ": min " +
                          std::to_string(lo) + " > max " + std::to_string(hi));
      }
    }
    if (min.lambda.nanometers < kVisibleMinNm || max.lambda.nanometers > kVisibleMaxNm) {
      throw DomainError("wavelength bounds must lie within [380, 750] nm");
    }
    if (min.width <= 0.0) throw DomainError("width lower bound must be > 0");
    if (min.intensity < 0.0 || max.intensity > 1.0) {
      throw DomainError("intensity bounds must lie within [0, 1]");
    }
    if (min.angle_deg < 0.0 || max.angle_deg >= 180.0) {
      throw DomainError("angle bounds must lie within [0, 180)");
    }
  }

  bool contains(const BeamParams& theta) const {
    for (Dim d : kAllDims) {
      const double v = theta.get(d);
      if (v < min.get(d) || v > max.get(d)) return false;
    }
    return true;
  }

  // Same bounds with dimension `d` pinned to `value`.
  ParamBounds pinned(Dim d, double value) const {
    ParamBounds out = *this;
    out.min.set(d, value);
    out.max.set(d, value);
    return out;
  }

  friend bool operator==(const ParamBounds&, const ParamBounds&) = default;
};

inline BeamParams clip_params(const BeamParams& theta, const ParamBounds& bounds) {
  BeamParams out = theta;
  for (Dim d : kAllDims) {
    out.set(d, std::clamp(theta.get(d), bounds.min.get(d), bounds.max.get(d)));
  }
  return out;
}

// Each component independently uniform over [min, max].
inline BeamParams sample_random_beam(const ParamBounds& bounds, Rng& rng) {
  bounds.validate();
  BeamParams out;
  for (Dim d : kAllDims) {
    out.set(d, rng.uniform(bounds.min.get(d), bounds.max.get(d)));
  }
  return out;
}

inline BeamParams sample_random_beam(const ParamBounds& bounds, Seed seed) {
  Rng rng(seed);
  return sample_random_beam(bounds, rng);
}

}  // namespace advlb
