#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "advlb/beam.hpp"
#include "advlb/classifier.hpp"
#include "advlb/errors.hpp"
#include "advlb/image.hpp"
#include "advlb/parallel.hpp"
#include "advlb/rng.hpp"
#include "advlb/search.hpp"

namespace advlb {

struct TransformSpec {
  double rotation_deg = 5.0;     // angle ~ U[-rotation, rotation]
  double translation_px = 4.0;   // per-axis shift ~ U[-t, t]
  double noise_std = 0.01;       // std of zero-mean uniform noise per channel
  int batch_size = 16;
  Seed seed = 0;

  void validate() const {
    if (!(rotation_deg >= 0.0) || !(translation_px >= 0.0) || !(noise_std >= 0.0)) {
      throw DomainError("transform ranges must be non-negative");
    }
    if (batch_size < 1) throw DomainError("transform batch size must be >= 1");
  }

  friend bool operator==(const TransformSpec&, const TransformSpec&) = default;
};

struct TransformSample {
  double angle_deg = 0.0;
  double shift_x = 0.0;
  double shift_y = 0.0;
  Seed noise_seed = 0;
};

inline TransformSample sample_transform(const TransformSpec& spec, std::size_t item) {
  Rng rng(derive_seed(spec.seed, item));
  TransformSample t;
  t.angle_deg = rng.uniform(-spec.rotation_deg, spec.rotation_deg);
  t.shift_x = rng.uniform(-spec.translation_px, spec.translation_px);
  t.shift_y = rng.uniform(-spec.translation_px, spec.translation_px);
  t.noise_seed = derive_seed(spec.seed ^ 0x6e6f697365ULL, item);
  return t;
}

// Bilinear sample with replicated border.
inline Rgb sample_bilinear(const ImageBuffer& img, double x, double y) {
  const double cx = std::clamp(x, 0.0, static_cast<double>(img.width() - 1));
  const double cy = std::clamp(y, 0.0, static_cast<double>(img.height() - 1));
  const int x0 = static_cast<int>(std::floor(cx));
  const int y0 = static_cast<int>(std::floor(cy));
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const double fx = cx - x0, fy = cy - y0;
  Rgb out{};
  for (int c = 0; c < 3; ++c) {
    const double top = img.at(x0, y0, c) * (1.0 - fx) + img.at(x1, y0, c) * fx;
    const double bottom = img.at(x0, y1, c) * (1.0 - fx) + img.at(x1, y1, c) * fx;
    out[c] = static_cast<float>(top * (1.0 - fy) + bottom * fy);
  }
  return out;
}

// Rotation about the image center, then translation, then additive noise,
// clipped to [0, 1].
inline ImageBuffer apply_transform(const ImageBuffer& x, const TransformSample& t,
                                   double noise_std) {
  ImageBuffer out(x.width(), x.height());
  const double cx = (x.width() - 1) / 2.0, cy = (x.height() - 1) / 2.0;
  const double rad = t.angle_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(rad), sn = std::sin(rad);
  const bool identity = t.angle_deg == 0.0 && t.shift_x == 0.0 && t.shift_y == 0.0;

  for (int y = 0; y < x.height(); ++y) {
    for (int px = 0; px < x.width(); ++px) {
      if (identity) {
        out.set_pixel(px, y, x.pixel(px, y));
        continue;
      }
      // inverse map: output -> source
      const double ux = px - cx - t.shift_x, uy = y - cy - t.shift_y;
      const double sx = cs * ux + sn * uy + cx;
      const double sy = -sn * ux + cs * uy + cy;
      out.set_pixel(px, y, sample_bilinear(x, sx, sy));
    }
  }

  if (noise_std > 0.0) {
    const double half_width = std::sqrt(3.0) * noise_std;
    Rng rng(t.noise_seed);
    for (float& v : out.data()) {
      v = std::clamp(static_cast<float>(v + rng.uniform(-half_width, half_width)), 0.0f, 1.0f);
    }
  }
  return out;
}

inline std::vector<ImageBuffer> transform_batch(const ImageBuffer& x, const TransformSpec& spec) {
  spec.validate();
  std::vector<ImageBuffer> batch;
  batch.reserve(static_cast<std::size_t>(spec.batch_size));
  for (int i = 0; i < spec.batch_size; ++i) {
    batch.push_back(apply_transform(x, sample_transform(spec, static_cast<std::size_t>(i)),
                                    spec.noise_std));
  }
  return batch;
}

// Componentwise envelope of the successful thetas.
struct EffectiveRange {
  BeamParams min;
  BeamParams max;
  std::size_t support = 0;
};

inline std::optional<EffectiveRange> effective_range(const std::vector<BeamParams>& successes) {
  if (successes.empty()) return std::nullopt;
  EffectiveRange range{successes.front(), successes.front(), successes.size()};
  for (const auto& theta : successes) {
    for (Dim d : kAllDims) {
      range.min.set(d, std::min(range.min.get(d), theta.get(d)));
      range.max.set(d, std::max(range.max.get(d), theta.get(d)));
    }
  }
  return range;
}

struct RobustItem {
  TransformSample transform;
  std::optional<AttackOutcome> outcome;
  std::string error;
};

struct RobustResult {
  std::vector<RobustItem> items;
  std::optional<EffectiveRange> range;
  std::size_t support() const { return range ? range->support : 0; }
};

// Attacks every transformed copy independently and aggregates the
// successful beams. A failing item is recorded and does not stop the rest.
inline RobustResult robust_attack(const ImageBuffer& x, const Classifier& classifier,
                                  const SearchConfig& config, const TransformSpec& spec,
                                  std::size_t workers = 1) {
  config.validate();
  spec.validate();
  RobustResult result;
  result.items.resize(static_cast<std::size_t>(spec.batch_size));

  parallel_for(result.items.size(), workers, [&](std::size_t i) {
    RobustItem& item = result.items[i];
    item.transform = sample_transform(spec, i);
    try {
      const ImageBuffer xi = apply_transform(x, item.transform, spec.noise_std);
      SearchConfig cfg = config;
      cfg.seed = derive_seed(config.seed, i);
      item.outcome = advlb_attack(xi, classifier, cfg);
    } catch (const std::exception& e) {
      item.error = e.what();
    }
  });

  std::vector<BeamParams> successes;
  for (const auto& item : result.items) {
    if (item.outcome && item.outcome->success) successes.push_back(item.outcome->theta);
  }
  result.range = effective_range(successes);
  return result;
}

}  // namespace advlb
