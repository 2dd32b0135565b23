#pragma once

#include <cmath>
#include <string>

#include "advlb/errors.hpp"
#include "advlb/image.hpp"

namespace advlb {

inline constexpr double kVisibleMinNm = 380.0;
inline constexpr double kVisibleMaxNm = 750.0;

struct Wavelength {
  double nanometers = 580.0;

  friend bool operator==(const Wavelength&, const Wavelength&) = default;
};

// Piecewise-linear visible spectrum approximation (segments at 440, 490, 510,
// 580, 645 nm), gamma 0.8, with intensity falling to 0.3 at both ends of the
// visible range over [380, 420] and [700, 750].
inline Rgb wavelength_to_rgb(Wavelength lambda) {
  constexpr double gamma = 0.8;
  const double nm = lambda.nanometers;
  if (!(nm >= kVisibleMinNm && nm <= kVisibleMaxNm)) {
    throw DomainError("wavelength " + std::to_string(nm) +
                      " nm outside visible range [380, 750]");
  }

  double r = 0.0, g = 0.0, b = 0.0;
  if (nm < 440.0) {
    r = -(nm - 440.0) / (440.0 - 380.0);
    b = 1.0;
  } else if (nm < 490.0) {
    g = (nm - 440.0) / (490.0 - 440.0);
    b = 1.0;
  } else if (nm < 510.0) {
    g = 1.0;
    b = -(nm - 510.0) / (510.0 - 490.0);
  } else if (nm < 580.0) {
    r = (nm - 510.0) / (580.0 - 510.0);
    g = 1.0;
  } else if (nm < 645.0) {
    r = 1.0;
    g = -(nm - 645.0) / (645.0 - 580.0);
  } else {
    r = 1.0;
  }

  double factor = 1.0;
  if (nm < 420.0) {
    factor = 0.3 + 0.7 * (nm - 380.0) / (420.0 - 380.0);
  } else if (nm > 700.0) {
    factor = 0.3 + 0.7 * (750.0 - nm) / (750.0 - 700.0);
  }

  const auto adjust = [&](double c) {
    return c <= 0.0 ? 0.0f : static_cast<float>(std::pow(c * factor, gamma));
  };
  return {adjust(r), adjust(g), adjust(b)};
}

}  // namespace advlb
