#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "advlb/beam.hpp"
#include "advlb/errors.hpp"
#include "advlb/harness/manifest.hpp"
#include "advlb/io/image_io.hpp"
#include "advlb/params.hpp"
#include "advlb/rng.hpp"

namespace advlb::io {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

struct AugmentEntry {
  std::filesystem::path source;
  std::filesystem::path output;
  LabelId label = 0;
  bool beamed = false;
  std::optional<BeamParams> theta;
  std::string error;
};

struct AugmentResult {
  std::vector<AugmentEntry> entries;
  std::filesystem::path manifest_path;
  std::size_t beamed = 0;
  std::size_t failures = 0;
};

// Random-beam data augmentation: each image independently gets one random
// beam with the given probability. Untouched images are copied byte for
// byte; beamed ones are written as PNG at their native resolution. Writes
// <out_dir>/manifest.csv with columns path,label,beamed,lambda,r,b,w,alpha.
inline AugmentResult augment_dataset(const DatasetManifest& manifest, const ParamBounds& bounds,
                                     double probability, Seed seed,
                                     const std::filesystem::path& out_dir,
                                     const RenderOptions& render = {}) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw DomainError("augment: probability must lie in [0, 1], got " + std::to_string(probability));
  }
  bounds.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw DomainError("augment: cannot create " + out_dir.string() + ": " + ec.message());

  AugmentResult result;
  result.entries.reserve(manifest.entries.size());
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& in = manifest.entries[i];
    AugmentEntry e;
    e.source = in.path;
    e.label = in.label;

    Rng rng(derive_seed(seed, i));
    e.beamed = rng.bernoulli(probability);
    char prefix[16];
    std::snprintf(prefix, sizeof prefix, "%06zu_", i);
    try {
      if (e.beamed) {
        e.theta = sample_random_beam(bounds, rng);
        e.output = out_dir / (prefix + in.path.stem().string() + ".png");
        save_png(e.output, apply_beam(load_image(in.path), *e.theta, render));
        ++result.beamed;
      } else {
        e.output = out_dir / (prefix + in.path.filename().string());
        std::filesystem::copy_file(in.path, e.output,
                                   std::filesystem::copy_options::overwrite_existing);
      }
    } catch (const std::exception& ex) {
      e.error = ex.what();
      ++result.failures;
    }
    result.entries.push_back(std::move(e));
  }

  result.manifest_path = out_dir / "manifest.csv";
  std::ofstream out(result.manifest_path, std::ios::binary);
  if (!out) throw DomainError("augment: cannot write " + result.manifest_path.string());
  out << "path,label,beamed,lambda,r,b,w,alpha\n";
  for (const auto& e : result.entries) {
    if (!e.error.empty()) continue;
    out << csv_field(e.output.filename().string()) << ',' << e.label << ',' << (e.beamed ? 1 : 0);
    if (e.theta) {
      for (double v : e.theta->as_array()) out << ',' << nlohmann::json(v).dump();
    } else {
      out << ",,,,,";
    }
    out << '\n';
  }
  return result;
}

}  // namespace advlb::io
