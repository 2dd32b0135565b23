#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "toml.hpp"

#include "advlb/classifier.hpp"
#include "advlb/errors.hpp"
#include "advlb/harness/eval.hpp"
#include "advlb/params.hpp"
#include "advlb/physical.hpp"
#include "advlb/search.hpp"

namespace advlb {

struct RemoteOptions {
  double timeout_s = 30.0;
  int retries = 2;

  friend bool operator==(const RemoteOptions&, const RemoteOptions&) = default;
};

// Fixed beams and value lists for the ablation sweeps.
struct SweepDefaults {
  std::vector<double> lambda_values{380.0, 480.0, 580.0, 680.0};
  BeamParams lambda_fixed{Wavelength{580.0}, 45.0, 0.0, 20.0, 1.0};
  std::vector<double> width_values{1.0, 5.0, 10.0, 20.0, 30.0, 40.0};
  BeamParams width_fixed{Wavelength{400.0}, 30.0, 50.0, 1.0, 1.0};
  std::vector<double> layout_angles = LayoutSpec::default_grid().angles;
  std::vector<double> layout_intercepts = LayoutSpec::default_grid().intercepts;
  BeamParams layout_fixed{Wavelength{580.0}, 0.0, 0.0, 20.0, 1.0};
  std::vector<int> k_values{1, 50, 100, 200};
};

// Everything a CLI run depends on. Serialized into every report.
struct ToolConfig {
  SearchConfig search;
  TransformSpec transforms;
  PreprocessSpec preprocess;
  bool softmax = false;  // apply softmax to embedded-model outputs
  std::optional<ToySpec> toy;
  RemoteOptions remote;
  std::vector<double> shift_bands{380.0, 470.0, 560.0, 650.0, 750.0};
  int shift_beams_per_image = 4;
  double augment_probability = 0.5;
  SweepDefaults sweep;
  std::size_t workers = 1;
};

// ---- JSON --------------------------------------------------------------------

using Json = nlohmann::json;

inline Json to_json_value(const BeamParams& p) {
  return Json{{"lambda", p.lambda.nanometers}, {"r", p.angle_deg}, {"b", p.intercept},
              {"w", p.width},                  {"alpha", p.intensity}};
}

inline BeamParams beam_from_json(const Json& j) {
  BeamParams p;
  for (Dim d : kAllDims) p.set(d, j.at(std::string(dim_name(d))).get<double>());
  return p;
}

inline Json to_json_value(const ParamBounds& b) {
  Json j = Json::object();
  for (Dim d : kAllDims) j[std::string(dim_name(d))] = {b.min.get(d), b.max.get(d)};
  return j;
}

inline ParamBounds bounds_from_json(const Json& j) {
  ParamBounds b;
  for (Dim d : kAllDims) {
    const auto& pair = j.at(std::string(dim_name(d)));
    b.min.set(d, pair.at(0).get<double>());
    b.max.set(d, pair.at(1).get<double>());
  }
  return b;
}

inline Json to_json_value(const SearchConfig& c) {
  Json cands = Json::array();
  for (const auto& q : c.candidates) cands.push_back({{"dim", dim_name(q.dim)}, {"unit", q.unit}});
  Json render{{"attenuation", c.render.attenuation}};
  render["source_distance"] =
      c.render.source_distance ? Json(*c.render.source_distance) : Json(nullptr);
  return Json{{"bounds", to_json_value(c.bounds)},
              {"candidates", cands},
              {"step_sizes", c.step_sizes},
              {"t_max", c.t_max},
              {"restarts", c.restarts},
              {"seed", c.seed},
              {"align_to_units", c.align_to_units},
              {"render", render}};
}

inline SearchConfig search_from_json(const Json& j) {
  SearchConfig c;
  c.bounds = bounds_from_json(j.at("bounds"));
  c.candidates.clear();
  for (const auto& q : j.at("candidates")) {
    c.candidates.push_back({dim_from_name(q.at("dim").get<std::string>()), q.at("unit").get<double>()});
  }
  c.step_sizes = j.at("step_sizes").get<std::vector<double>>();
  c.t_max = j.at("t_max").get<int>();
  c.restarts = j.at("restarts").get<int>();
  c.seed = j.at("seed").get<Seed>();
  c.align_to_units = j.at("align_to_units").get<bool>();
  const auto& r = j.at("render");
  c.render.attenuation = r.at("attenuation").get<bool>();
  if (!r.at("source_distance").is_null()) c.render.source_distance = r.at("source_distance").get<double>();
  return c;
}

inline Json to_json_value(const ToolConfig& c) {
  Json toy = nullptr;
  if (c.toy) toy = Json{{"weights", c.toy->weights}, {"bias", c.toy->bias}};
  const auto& s = c.sweep;
  return Json{
      {"search", to_json_value(c.search)},
      {"transforms",
       {{"rotation_deg", c.transforms.rotation_deg},
        {"translation_px", c.transforms.translation_px},
        {"noise_std", c.transforms.noise_std},
        {"batch_size", c.transforms.batch_size},
        {"seed", c.transforms.seed}}},
      {"preprocess",
       {{"width", c.preprocess.width},
        {"height", c.preprocess.height},
        {"mean", c.preprocess.mean},
        {"std", c.preprocess.stddev},
        {"channel_order", c.preprocess.channel_order == ChannelOrder::RGB ? "RGB" : "BGR"},
        {"softmax", c.softmax}}},
      {"toy", toy},
      {"remote", {{"timeout_s", c.remote.timeout_s}, {"retries", c.remote.retries}}},
      {"shift", {{"bands", c.shift_bands}, {"beams_per_image", c.shift_beams_per_image}}},
      {"augment", {{"probability", c.augment_probability}}},
      {"sweep",
       {{"lambda_values", s.lambda_values},
        {"lambda_fixed", to_json_value(s.lambda_fixed)},
        {"width_values", s.width_values},
        {"width_fixed", to_json_value(s.width_fixed)},
        {"layout_angles", s.layout_angles},
        {"layout_intercepts", s.layout_intercepts},
        {"layout_fixed", to_json_value(s.layout_fixed)},
        {"k_values", s.k_values}}},
      {"workers", c.workers}};
}

inline ChannelOrder channel_order_from(const std::string& s) {
  if (s == "RGB" || s == "rgb") return ChannelOrder::RGB;
  if (s == "BGR" || s == "bgr") return ChannelOrder::BGR;
  throw DomainError("channel_order must be RGB or BGR, got '" + s + "'");
}

inline ToolConfig config_from_json(const Json& j) {
  ToolConfig c;
  c.search = search_from_json(j.at("search"));
  const auto& t = j.at("transforms");
  c.transforms.rotation_deg = t.at("rotation_deg").get<double>();
  c.transforms.translation_px = t.at("translation_px").get<double>();
  c.transforms.noise_std = t.at("noise_std").get<double>();
  c.transforms.batch_size = t.at("batch_size").get<int>();
  c.transforms.seed = t.at("seed").get<Seed>();
  const auto& p = j.at("preprocess");
  c.preprocess.width = p.at("width").get<int>();
  c.preprocess.height = p.at("height").get<int>();
  c.preprocess.mean = p.at("mean").get<std::array<double, 3>>();
  c.preprocess.stddev = p.at("std").get<std::array<double, 3>>();
  c.preprocess.channel_order = channel_order_from(p.at("channel_order").get<std::string>());
  c.softmax = p.at("softmax").get<bool>();
  if (!j.at("toy").is_null()) {
    c.toy = ToySpec{j["toy"].at("weights").get<std::vector<std::array<double, 3>>>(),
                    j["toy"].at("bias").get<std::vector<double>>()};
  }
  c.remote.timeout_s = j.at("remote").at("timeout_s").get<double>();
  c.remote.retries = j.at("remote").at("retries").get<int>();
  c.shift_bands = j.at("shift").at("bands").get<std::vector<double>>();
  c.shift_beams_per_image = j.at("shift").at("beams_per_image").get<int>();
  c.augment_probability = j.at("augment").at("probability").get<double>();
  const auto& s = j.at("sweep");
  c.sweep.lambda_values = s.at("lambda_values").get<std::vector<double>>();
  c.sweep.lambda_fixed = beam_from_json(s.at("lambda_fixed"));
  c.sweep.width_values = s.at("width_values").get<std::vector<double>>();
  c.sweep.width_fixed = beam_from_json(s.at("width_fixed"));
  c.sweep.layout_angles = s.at("layout_angles").get<std::vector<double>>();
  c.sweep.layout_intercepts = s.at("layout_intercepts").get<std::vector<double>>();
  c.sweep.layout_fixed = beam_from_json(s.at("layout_fixed"));
  c.sweep.k_values = s.at("k_values").get<std::vector<int>>();
  c.workers = j.at("workers").get<std::size_t>();
  return c;
}

// ---- TOML --------------------------------------------------------------------

namespace detail {

inline std::vector<double> toml_doubles(const toml::node& node, const std::string& key) {
  const auto* arr = node.as_array();
  if (!arr) throw DomainError("config: '" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& el : *arr) {
    const auto v = el.value<double>();
    if (!v) throw DomainError("config: '" + key + "' must contain only numbers");
    out.push_back(*v);
  }
  return out;
}

template <typename T>
void read_scalar(const toml::table& table, const char* key, T& target, const std::string& section) {
  if (const auto* node = table.get(key)) {
    const auto v = node->value<T>();
    if (!v) throw DomainError("config: [" + section + "] " + key + " has the wrong type");
    target = *v;
  }
}

inline BeamParams read_beam(const toml::table& table, BeamParams base, const std::string& section) {
  for (Dim d : kAllDims) {
    double v = base.get(d);
    read_scalar(table, std::string(dim_name(d)).c_str(), v, section);
    base.set(d, v);
  }
  return base;
}

}  // namespace detail

// Sections: [bounds] [search] [transforms] [preprocess] [toy] [remote]
// [shift] [augment] [sweep] [sweep.*_fixed]. Missing keys keep defaults.
inline ToolConfig parse_toml_config(std::string_view text, const std::string& origin = "config") {
  toml::table root;
  try {
    root = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config: " << e.description() << " at " << e.source().begin;
    throw DomainError(msg.str());
  }

  ToolConfig c;
  if (const auto* bounds = root["bounds"].as_table()) {
    for (Dim d : kAllDims) {
      const std::string key(dim_name(d));
      if (const auto* node = bounds->get(key)) {
        const auto pair = detail::toml_doubles(*node, "bounds." + key);
        if (pair.size() != 2) throw DomainError("config: bounds." + key + " must be [min, max]");
        c.search.bounds.min.set(d, pair[0]);
        c.search.bounds.max.set(d, pair[1]);
      }
    }
  }
  if (const auto* s = root["search"].as_table()) {
    detail::read_scalar(*s, "t_max", c.search.t_max, "search");
    detail::read_scalar(*s, "restarts", c.search.restarts, "search");
    detail::read_scalar(*s, "align_to_units", c.search.align_to_units, "search");
    detail::read_scalar(*s, "attenuation", c.search.render.attenuation, "search");
    std::int64_t seed = static_cast<std::int64_t>(c.search.seed);
    detail::read_scalar(*s, "seed", seed, "search");
    c.search.seed = static_cast<Seed>(seed);
    if (const auto* node = s->get("source_distance")) {
      c.search.render.source_distance = node->value<double>();
    }
    if (const auto* node = s->get("step_sizes")) {
      c.search.step_sizes = detail::toml_doubles(*node, "search.step_sizes");
    }
    if (const auto* units = (*s)["units"].as_table()) {
      c.search.candidates.clear();
      for (Dim d : kAllDims) {
        if (const auto* node = units->get(std::string(dim_name(d)))) {
          const auto v = node->value<double>();
          if (!v) throw DomainError("config: search.units values must be numbers");
          c.search.candidates.push_back({d, *v});
        }
      }
    }
  }
  if (const auto* t = root["transforms"].as_table()) {
    detail::read_scalar(*t, "rotation_deg", c.transforms.rotation_deg, "transforms");
    detail::read_scalar(*t, "translation_px", c.transforms.translation_px, "transforms");
    detail::read_scalar(*t, "noise_std", c.transforms.noise_std, "transforms");
    detail::read_scalar(*t, "batch_size", c.transforms.batch_size, "transforms");
    std::int64_t seed = static_cast<std::int64_t>(c.transforms.seed);
    detail::read_scalar(*t, "seed", seed, "transforms");
    c.transforms.seed = static_cast<Seed>(seed);
  }
  if (const auto* p = root["preprocess"].as_table()) {
    detail::read_scalar(*p, "width", c.preprocess.width, "preprocess");
    detail::read_scalar(*p, "height", c.preprocess.height, "preprocess");
    detail::read_scalar(*p, "softmax", c.softmax, "preprocess");
    for (const char* key : {"mean", "std"}) {
      if (const auto* node = p->get(key)) {
        const auto v = detail::toml_doubles(*node, std::string("preprocess.") + key);
        if (v.size() != 3) throw DomainError(std::string("config: preprocess.") + key + " needs 3 values");
        auto& dst = std::string(key) == "mean" ? c.preprocess.mean : c.preprocess.stddev;
        dst = {v[0], v[1], v[2]};
      }
    }
    std::string order;
    detail::read_scalar(*p, "channel_order", order, "preprocess");
    if (!order.empty()) c.preprocess.channel_order = channel_order_from(order);
  }
  if (const auto* toy = root["toy"].as_table()) {
    ToySpec spec;
    if (const auto* rows = (*toy)["weights"].as_array()) {
      for (const auto& row : *rows) {
        const auto v = detail::toml_doubles(row, "toy.weights");
        if (v.size() != 3) throw DomainError("config: toy.weights rows need 3 values (R, G, B)");
        spec.weights.push_back({v[0], v[1], v[2]});
      }
    }
    if (const auto* node = toy->get("bias")) spec.bias = detail::toml_doubles(*node, "toy.bias");
    if (spec.bias.empty()) spec.bias.assign(spec.weights.size(), 0.0);
    c.toy = spec;
  }
  if (const auto* r = root["remote"].as_table()) {
    detail::read_scalar(*r, "timeout_s", c.remote.timeout_s, "remote");
    detail::read_scalar(*r, "retries", c.remote.retries, "remote");
  }
  if (const auto* sh = root["shift"].as_table()) {
    if (const auto* node = sh->get("bands")) c.shift_bands = detail::toml_doubles(*node, "shift.bands");
    detail::read_scalar(*sh, "beams_per_image", c.shift_beams_per_image, "shift");
  }
  if (const auto* a = root["augment"].as_table()) {
    detail::read_scalar(*a, "probability", c.augment_probability, "augment");
  }
  if (const auto* sw = root["sweep"].as_table()) {
    auto& s = c.sweep;
    if (const auto* n = sw->get("lambda_values")) s.lambda_values = detail::toml_doubles(*n, "sweep.lambda_values");
    if (const auto* n = sw->get("width_values")) s.width_values = detail::toml_doubles(*n, "sweep.width_values");
    if (const auto* n = sw->get("layout_angles")) s.layout_angles = detail::toml_doubles(*n, "sweep.layout_angles");
    if (const auto* n = sw->get("layout_intercepts")) s.layout_intercepts = detail::toml_doubles(*n, "sweep.layout_intercepts");
    if (const auto* n = sw->get("k_values")) {
      s.k_values.clear();
      for (double v : detail::toml_doubles(*n, "sweep.k_values")) s.k_values.push_back(static_cast<int>(v));
    }
    if (const auto* t = (*sw)["lambda_fixed"].as_table()) s.lambda_fixed = detail::read_beam(*t, s.lambda_fixed, "sweep.lambda_fixed");
    if (const auto* t = (*sw)["width_fixed"].as_table()) s.width_fixed = detail::read_beam(*t, s.width_fixed, "sweep.width_fixed");
    if (const auto* t = (*sw)["layout_fixed"].as_table()) s.layout_fixed = detail::read_beam(*t, s.layout_fixed, "sweep.layout_fixed");
  }
  if (const auto* run = root["run"].as_table()) {
    std::int64_t workers = static_cast<std::int64_t>(c.workers);
    detail::read_scalar(*run, "workers", workers, "run");
    c.workers = static_cast<std::size_t>(std::max<std::int64_t>(1, workers));
  }

  c.search.validate();
  c.transforms.validate();
  return c;
}

// Reads a TOML config, or a JSON config snapshot (as embedded in reports)
// when the file ends in .json.
inline ToolConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DomainError("config: cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  if (path.extension() == ".json") {
    Json j;
    try {
      j = Json::parse(ss.str());
    } catch (const Json::exception& e) {
      throw DomainError("config: " + path.string() + ": " + e.what());
    }
    const Json& cfg = j.contains("config") ? j.at("config") : j;
    ToolConfig c = config_from_json(cfg);
    c.search.validate();
    c.transforms.validate();
    return c;
  }
  return parse_toml_config(ss.str(), path.string());
}

}  // namespace advlb
