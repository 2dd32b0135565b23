#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "advlb/beam.hpp"

using namespace advlb;

namespace {

BeamParams beam(double lambda, double r, double b, double w, double alpha) {
  return BeamParams{Wavelength{lambda}, r, b, w, alpha};
}

// Nearest point on the parametrized line by dense scan; independent of BeamLine.
double scanned_distance(double px, double py, double r_deg, double b) {
  const double rad = r_deg * std::numbers::pi / 180.0;
  double best = std::numeric_limits<double>::infinity();
  for (double t = -100.0; t <= 100.0; t += 1e-4) {
    double x, y;
    if (std::abs(std::cos(rad)) < 1e-6) {
      x = b;
      y = t;
    } else {
      x = t;
      y = std::tan(rad) * t + b;
    }
    best = std::min(best, std::hypot(px - x, py - y));
  }
  return best;
}

}  // namespace

TEST(BeamGeometry, PointOnHorizontalLine) {
  EXPECT_NEAR(beam_geometry(5, 10, 0, 10, 32, 32).perp, 0.0, 1e-12);
}

TEST(BeamGeometry, VerticalConventionUsesInterceptAsX) {
  for (double y : {0.0, 7.0, 31.0}) {
    EXPECT_NEAR(beam_geometry(12 + 3, y, 90, 12, 32, 32).perp, 3.0, 1e-9);
  }
}

TEST(BeamGeometry, DiagonalMatchesScan) {
  const double scanned = scanned_distance(0, 1, 45, 0);
  EXPECT_NEAR(scanned, 0.7071067811865476, 1e-4);
  EXPECT_NEAR(beam_geometry(0, 1, 45, 0, 32, 32).perp, 0.7071067811865476, 1e-9);
}

TEST(BeamGeometry, RandomPointsMatchScan) {
  Rng rng(17);
  for (int i = 0; i < 12; ++i) {
    const double r = rng.uniform(0, 179);
    const double b = rng.uniform(0, 20);
    const double px = rng.uniform(0, 20), py = rng.uniform(0, 20);
    EXPECT_NEAR(beam_geometry(px, py, r, b, 32, 32).perp, scanned_distance(px, py, r, b), 2e-3)
        << "r=" << r << " b=" << b;
  }
}

TEST(BeamGeometry, AlongDistanceStartsAtEntry) {
  // Horizontal line enters at x = 0.
  EXPECT_NEAR(beam_geometry(0, 10, 0, 10, 32, 32).along, 0.0, 1e-12);
  EXPECT_NEAR(beam_geometry(7, 10, 0, 10, 32, 32).along, 7.0, 1e-12);
  // y = x + 5 enters the rectangle at (0, 5).
  EXPECT_NEAR(beam_geometry(3, 8, 45, 5, 32, 32).along, 3.0 * std::sqrt(2.0), 1e-9);
  // y = -x + 40 traversed toward decreasing x enters at (31, 9).
  const auto d = beam_geometry(31, 9, 135, 40, 32, 32);
  EXPECT_NEAR(d.perp, 0.0, 1e-9);
  EXPECT_NEAR(d.along, 0.0, 1e-9);
}

TEST(BeamGeometry, DistancesNonNegative) {
  Rng rng(3);
  for (int i = 0; i < 2000; ++i) {
    const auto d = beam_geometry(rng.uniform(-5, 40), rng.uniform(-5, 40), rng.uniform(0, 179.99),
                                 rng.uniform(-50, 80), 32, 24);
    ASSERT_GE(d.perp, 0.0);
    ASSERT_GE(d.along, 0.0);
  }
}

TEST(RenderBeam, ZeroIntensityIsZeroLayer) {
  const auto layer = render_beam(beam(580, 30, 5, 10, 0.0), 20, 16);
  for (float v : layer.data()) ASSERT_EQ(v, 0.0f);
}

TEST(RenderBeam, HorizontalBeamConfinedToRows) {
  const int h = 32;
  const auto layer = render_beam(beam(520, 0, h / 2, 4, 1.0), 32, h);
  bool any = false;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < 32; ++x) {
      const auto p = layer.pixel(x, y);
      if (p[0] + p[1] + p[2] > 0) {
        any = true;
        EXPECT_LE(std::abs(y - h / 2), 2.5) << "row " << y;
      }
    }
  }
  EXPECT_TRUE(any);
}

TEST(RenderBeam, EntryPixelOnAxisEqualsScaledColor) {
  const double alpha = 0.7;
  const auto layer = render_beam(beam(450, 0, 10, 3, alpha), 32, 32);
  const auto color = wavelength_to_rgb(Wavelength{450});
  const auto p = layer.pixel(0, 10);
  for (int c = 0; c < 3; ++c) EXPECT_NEAR(p[c], alpha * color[c], 1e-6);
}

TEST(RenderBeam, SupportAndChromaInvariants) {
  Rng rng(11);
  const ParamBounds bounds{};
  for (int i = 0; i < 200; ++i) {
    BeamParams theta = sample_random_beam(bounds, rng);
    theta.intercept = rng.uniform(-10, 40);
    const int w = 24 + static_cast<int>(rng.index(16)), h = 16 + static_cast<int>(rng.index(16));
    const auto layer = render_beam(theta, w, h);
    const auto color = wavelength_to_rgb(theta.lambda);
    const double cmax = std::max({color[0], color[1], color[2]});
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const auto p = layer.pixel(x, y);
        if (p[0] == 0 && p[1] == 0 && p[2] == 0) continue;
        const auto d = beam_geometry(x, y, theta.angle_deg, theta.intercept, w, h);
        ASSERT_LE(d.perp, theta.width / 2 + 0.5 + 1e-9);
        // Chroma: p = s * color for one scalar s.
        const int ref = color[0] == cmax ? 0 : (color[1] == cmax ? 1 : 2);
        const double s = p[ref] / color[ref];
        for (int c = 0; c < 3; ++c) ASSERT_NEAR(p[c], s * color[c], 1e-6);
        for (int c = 0; c < 3; ++c) {
          ASSERT_GE(p[c], 0.0f);
          ASSERT_LE(p[c], 1.0f);
        }
      }
    }
  }
}

TEST(RenderBeam, AttenuationMonotoneOnAxis) {
  EXPECT_EQ(attenuation(0.0, 50.0), 1.0);
  const auto layer = render_beam(beam(600, 0, 8, 3, 1.0), 64, 16);
  for (int x = 1; x < 64; ++x) {
    EXPECT_LE(layer.at(x, 8, 0), layer.at(x - 1, 8, 0));
  }
  EXPECT_LT(layer.at(63, 8, 0), layer.at(0, 8, 0));
}

TEST(RenderBeam, AttenuationCanBeDisabled) {
  RenderOptions opts;
  opts.attenuation = false;
  const auto layer = render_beam(beam(600, 0, 8, 3, 1.0), 64, 16, opts);
  EXPECT_EQ(layer.at(63, 8, 0), layer.at(0, 8, 0));
}

TEST(RenderBeam, SourceDistanceOverride) {
  RenderOptions opts;
  opts.source_distance = 10.0;
  const auto layer = render_beam(beam(600, 0, 8, 3, 1.0), 64, 16, opts);
  // A(10) with s0 = 10 is 0.25.
  EXPECT_NEAR(layer.at(10, 8, 0), 0.25 * layer.at(0, 8, 0), 1e-6);
}

TEST(RenderBeam, LinearInIntensity) {
  const auto base = render_beam(beam(500, 33, 4, 7, 1.0), 30, 30);
  for (double c : {0.0, 0.25, 0.5, 0.9}) {
    const auto scaled = render_beam(beam(500, 33, 4, 7, c), 30, 30);
    for (std::size_t i = 0; i < base.data().size(); ++i) {
      ASSERT_NEAR(scaled.data()[i], c * base.data()[i], 1e-6);
    }
  }
}

TEST(RenderBeam, Deterministic) {
  const auto a = render_beam(beam(471.3, 77.7, 3.3, 9.1, 0.83), 40, 30);
  const auto b = render_beam(beam(471.3, 77.7, 3.3, 9.1, 0.83), 40, 30);
  EXPECT_TRUE(a == b);
}

TEST(RenderBeam, OutOfRangeWavelengthThrows) {
  EXPECT_THROW(render_beam(beam(800, 0, 0, 3, 1.0), 8, 8), DomainError);
}

TEST(Fuse, ZeroLayerIsIdentity) {
  ImageBuffer x(8, 6, 0.0f);
  Rng rng(5);
  for (float& v : x.data()) v = static_cast<float>(rng.unit());
  EXPECT_TRUE(fuse(x, BeamLayer(8, 6, 0.0f)) == x);
}

TEST(Fuse, ClipsAtOne) {
  const auto out = fuse(ImageBuffer(2, 2, 0.9f), BeamLayer(2, 2, 0.5f));
  for (float v : out.data()) EXPECT_EQ(v, 1.0f);
}

TEST(Fuse, AdditiveOnBlack) {
  const auto layer = render_beam(beam(530, 20, 3, 5, 0.8), 16, 16);
  EXPECT_TRUE(fuse(ImageBuffer(16, 16, 0.0f), layer) == layer);
}

TEST(Fuse, ShapeMismatchThrows) {
  EXPECT_THROW(fuse(ImageBuffer(4, 4, 0.0f), BeamLayer(4, 5, 0.0f)), DomainError);
}

TEST(Fuse, OutputInUnitRange) {
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    ImageBuffer x(12, 12, 0.0f);
    for (float& v : x.data()) v = static_cast<float>(rng.unit());
    const auto out = apply_beam(x, sample_random_beam(ParamBounds{}, rng));
    for (float v : out.data()) {
      ASSERT_GE(v, 0.0f);
      ASSERT_LE(v, 1.0f);
    }
  }
}

TEST(ImageBuffer, RejectsBadShapes) {
  EXPECT_THROW(ImageBuffer(0, 4, 0.0f), DomainError);
  EXPECT_THROW(ImageBuffer(2, 2, std::vector<float>(5)), DomainError);
  EXPECT_THROW(image_from_interleaved(2, 2, 4, std::vector<float>(16)), DomainError);
}

TEST(SampleRandomBeam, SameSeedSameBeam) {
  EXPECT_EQ(sample_random_beam(ParamBounds{}, Seed{42}), sample_random_beam(ParamBounds{}, Seed{42}));
  EXPECT_NE(sample_random_beam(ParamBounds{}, Seed{42}), sample_random_beam(ParamBounds{}, Seed{43}));
}

TEST(SampleRandomBeam, DegenerateBoundsGiveThatVector) {
  const BeamParams v = beam(512.5, 33, 17, 6, 0.75);
  const ParamBounds bounds{v, v};
  EXPECT_EQ(sample_random_beam(bounds, Seed{9}), v);
}

TEST(SampleRandomBeam, InvertedBoundsThrow) {
  ParamBounds bounds{};
  bounds.min.width = 10;
  bounds.max.width = 5;
  EXPECT_THROW(sample_random_beam(bounds, Seed{1}), DomainError);
}

TEST(SampleRandomBeam, WavelengthMeanConcentrates) {
  // Simulated: over 2000 repetitions the mean of 1e4 draws stayed in [561.5, 568.2].
  Rng rng(2024);
  double sum = 0;
  for (int i = 0; i < 10000; ++i) sum += sample_random_beam(ParamBounds{}, rng).lambda.nanometers;
  const double mean = sum / 10000;
  EXPECT_GE(mean, 555.0);
  EXPECT_LE(mean, 575.0);
}

TEST(SampleRandomBeam, DrawsStayInBounds) {
  Rng rng(4);
  const ParamBounds bounds{};
  for (int i = 0; i < 1000; ++i) ASSERT_TRUE(bounds.contains(sample_random_beam(bounds, rng)));
}

TEST(ParamBounds, ValidationRules) {
  ParamBounds b{};
  EXPECT_NO_THROW(b.validate());
  b.max.lambda = Wavelength{760};
  EXPECT_THROW(b.validate(), DomainError);
  b = ParamBounds{};
  b.min.width = 0;
  EXPECT_THROW(b.validate(), DomainError);
  b = ParamBounds{};
  b.max.intensity = 1.5;
  EXPECT_THROW(b.validate(), DomainError);
}
