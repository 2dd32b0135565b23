// advlb: laser-beam attack toolkit command line.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "advlb/harness/config.hpp"
#include "advlb/harness/eval.hpp"
#include "advlb/harness/manifest.hpp"
#include "advlb/harness/report.hpp"
#include "advlb/io/augment.hpp"
#include "advlb/io/image_io.hpp"
#include "advlb/io/onnx_classifier.hpp"
#include "advlb/io/remote_classifier.hpp"
#include "advlb/physical.hpp"
#include "advlb/search.hpp"

namespace fs = std::filesystem;
using namespace advlb;

namespace {

enum ExitCode { kOk = 0, kDomain = 2, kTransport = 3 };

struct Options {
  std::string model;
  std::string remote;
  bool toy = false;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::string out = "advlb_out";
  std::string manifest;
  std::string image;
  std::string classes;
  std::string dim = "lambda";
  std::optional<double> probability;
  bool no_traces = false;
};

struct Backend {
  std::unique_ptr<Classifier> classifier;
  Json description;
  int width = 224;
  int height = 224;
};

ToolConfig resolve_config(const Options& o) {
  ToolConfig c = o.config.empty() ? ToolConfig{} : load_config(o.config);
  if (o.seed) {
    c.search.seed = *o.seed;
    c.transforms.seed = *o.seed;
  }
  if (o.workers) c.workers = std::max<std::size_t>(1, *o.workers);
  return c;
}

Backend open_backend(const Options& o, const ToolConfig& c) {
  const int chosen = !o.model.empty() + !o.remote.empty() + o.toy;
  if (chosen != 1) throw DomainError("choose exactly one backend: --model, --remote or --toy");
  Backend b;
  if (!o.model.empty()) {
    b.classifier = std::make_unique<io::OnnxClassifier>(o.model, c.preprocess, c.softmax);
    b.description = {{"kind", "embedded"}, {"model", fs::path(o.model).filename().string()}};
  } else if (!o.remote.empty()) {
    auto remote = std::make_unique<io::RemoteClassifier>(o.remote, c.remote, c.preprocess);
    b.description = {{"kind", "remote"}, {"url", o.remote}, {"model_id", remote->model_id()}};
    b.classifier = std::move(remote);
  } else {
    const ToySpec spec = c.toy.value_or(ToySpec::blue_sensitive());
    b.classifier = std::make_unique<ToyClassifier>(spec);
    b.description = {{"kind", "toy"}};
  }
  const PreprocessSpec frame = b.classifier->preprocess().value_or(c.preprocess);
  b.width = frame.width;
  b.height = frame.height;
  b.description["num_classes"] = b.classifier->num_classes();
  b.description["frame"] = {b.width, b.height};
  return b;
}

std::vector<std::string> class_names(const Options& o) {
  return o.classes.empty() ? std::vector<std::string>{} : load_class_names(o.classes);
}

io::ManifestSource open_manifest(const Options& o, const Backend& b) {
  if (o.manifest.empty()) throw DomainError("--manifest is required");
  return io::ManifestSource(load_manifest(o.manifest, b.classifier->num_classes()), b.width, b.height);
}

ImageBuffer open_image(const Options& o, const Backend& b) {
  if (o.image.empty()) throw DomainError("--image is required");
  return io::resize_image(io::load_image(o.image), b.width, b.height);
}

fs::path out_dir(const Options& o) {
  fs::create_directories(o.out);
  return o.out;
}

void finish(const Options& o, const std::string& command, const Backend& b, const ToolConfig& c,
            Json result) {
  const auto path = out_dir(o) / "report.json";
  write_json(path, make_report(command, b.description, c, std::move(result)));
  std::cerr << "wrote " << path.string() << "\n";
}

int cmd_attack(const Options& o) {
  const ToolConfig c = resolve_config(o);
  const Backend b = open_backend(o, c);
  const ImageBuffer x = open_image(o, b);
  const AttackOutcome out = advlb_attack(x, *b.classifier, c.search);
  io::save_png(out_dir(o) / "adversarial.png", apply_beam(x, out.theta, c.search.render));
  std::cout << (out.success ? "success" : "failure") << " queries=" << out.queries
            << " label " << out.clean_label << " -> " << out.adv_label << "\n";
  finish(o, "attack", b, c, to_json_value(out));
  return kOk;
}

int cmd_eval(const Options& o) {
  const ToolConfig c = resolve_config(o);
  const Backend b = open_backend(o, c);
  const auto source = open_manifest(o, b);
  const EvalReport r = run_eval(source, *b.classifier, c.search, {c.workers});
  std::cout << "attempted=" << r.attempted << " skipped=" << r.skipped_misclassified
            << " success_rate=" << r.success_rate << "% mean_queries_success=" << r.mean_queries_success
            << " mean_queries_all=" << r.mean_queries_all << " errors=" << r.errors << "\n";
  finish(o, "eval", b, c, to_json_value(r, !o.no_traces));
  return kOk;
}

int cmd_sweep(const Options& o) {
  const ToolConfig c = resolve_config(o);
  const Backend b = open_backend(o, c);
  const auto source = open_manifest(o, b);
  if (o.dim == "lambda" || o.dim == "width") {
    SweepSpec spec;
    spec.dim = o.dim == "lambda" ? Dim::Lambda : Dim::Width;
    spec.values = o.dim == "lambda" ? c.sweep.lambda_values : c.sweep.width_values;
    spec.fixed = o.dim == "lambda" ? c.sweep.lambda_fixed : c.sweep.width_fixed;
    spec.bounds = c.search.bounds;
    spec.render = c.search.render;
    spec.workers = c.workers;
    const SweepTable t = sweep_fixed_beam(spec, source, *b.classifier);
    write_text(out_dir(o) / ("sweep_" + o.dim + ".csv"), sweep_csv(t));
    std::cout << sweep_csv(t);
    finish(o, "sweep", b, c, to_json_value(t));
  } else if (o.dim == "layout") {
    LayoutSpec spec;
    spec.angles = c.sweep.layout_angles;
    spec.intercepts = c.sweep.layout_intercepts;
    spec.fixed = c.sweep.layout_fixed;
    spec.render = c.search.render;
    spec.workers = c.workers;
    const LayoutGrid g = layout_heatmap(spec, source, *b.classifier);
    write_text(out_dir(o) / "layout.csv", layout_csv(g));
    io::write_heatmap_png(out_dir(o) / "layout.png", g);
    finish(o, "sweep", b, c, to_json_value(g));
  } else if (o.dim == "k") {
    const auto rows = sweep_restarts(c.sweep.k_values, source, *b.classifier, c.search, {c.workers});
    write_text(out_dir(o) / "restarts.csv", restarts_csv(rows));
    std::cout << restarts_csv(rows);
    finish(o, "sweep", b, c, to_json_value(rows));
  } else {
    throw DomainError("unknown sweep dimension '" + o.dim + "'");
  }
  return kOk;
}

int cmd_shift(const Options& o) {
  const ToolConfig c = resolve_config(o);
  const Backend b = open_backend(o, c);
  const auto source = open_manifest(o, b);
  ShiftSpec spec;
  spec.band_edges = c.shift_bands;
  spec.beams_per_image = c.shift_beams_per_image;
  spec.top_k = std::min<std::size_t>(5, b.classifier->num_classes());
  spec.bounds = c.search.bounds;
  spec.render = c.search.render;
  spec.seed = c.search.seed;
  spec.workers = c.workers;
  const ShiftReport r = class_shift_report(source, *b.classifier, spec);
  const auto names = class_names(o);
  write_text(out_dir(o) / "shift.csv", shift_csv(r, names));
  std::cout << shift_csv(r, names);
  finish(o, "shift-report", b, c, to_json_value(r, names));
  return kOk;
}

int cmd_augment(const Options& o) {
  ToolConfig c = resolve_config(o);
  if (o.probability) c.augment_probability = *o.probability;
  if (o.manifest.empty()) throw DomainError("--manifest is required");
  std::size_t k = 0;
  if (!o.classes.empty()) k = class_names(o).size();
  if (k == 0 && c.toy) k = c.toy->num_classes();
  if (k == 0) k = 1000;
  const auto manifest = load_manifest(o.manifest, k);
  const auto r = io::augment_dataset(manifest, c.search.bounds, c.augment_probability,
                                     c.search.seed, out_dir(o), c.search.render);
  Json entries = Json::array();
  for (const auto& e : r.entries) {
    Json j{{"source", e.source.string()}, {"output", e.output.filename().string()},
           {"label", e.label}, {"beamed", e.beamed}};
    if (e.theta) j["theta"] = to_json_value(*e.theta);
    if (!e.error.empty()) j["error"] = e.error;
    entries.push_back(std::move(j));
  }
  std::cout << "beamed " << r.beamed << " of " << r.entries.size() << ", failures " << r.failures << "\n";
  finish(o, "augment", Backend{nullptr, Json{{"kind", "none"}}}, c,
         Json{{"beamed", r.beamed}, {"failures", r.failures}, {"manifest", "manifest.csv"},
              {"entries", entries}});
  return r.failures == 0 ? kOk : kDomain;
}

int cmd_robust(const Options& o) {
  const ToolConfig c = resolve_config(o);
  const Backend b = open_backend(o, c);
  const ImageBuffer x = open_image(o, b);
  const RobustResult r = robust_attack(x, *b.classifier, c.search, c.transforms, c.workers);
  std::cout << "successes " << r.support() << " of " << r.items.size() << "\n";
  if (r.range) {
    for (Dim d : kAllDims) {
      std::cout << "  " << dim_name(d) << ": [" << r.range->min.get(d) << ", " << r.range->max.get(d)
                << "]\n";
    }
  }
  finish(o, "robust-attack", b, c, to_json_value(r));
  return kOk;
}

void add_common(CLI::App* cmd, Options& o, bool needs_backend) {
  if (needs_backend) {
    auto* model = cmd->add_option("--model", o.model, "ONNX model file (embedded backend)");
    auto* remote = cmd->add_option("--remote", o.remote, "scoring service base URL");
    auto* toy = cmd->add_flag("--toy", o.toy, "closed-form toy backend from the [toy] config section");
    model->excludes(remote)->excludes(toy);
    remote->excludes(toy);
  }
  cmd->add_option("--config", o.config, "TOML config, or a JSON report to reuse its config");
  cmd->add_option("--seed", o.seed, "override the configured seed");
  cmd->add_option("--workers", o.workers, "parallel images");
  cmd->add_option("--out", o.out, "output directory")->capture_default_str();
  cmd->add_option("--classes", o.classes, "class name table, one per line");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laser-beam black-box adversarial attacks"};
  app.require_subcommand(1);
  Options o;

  auto* attack = app.add_subcommand("attack", "attack one image");
  add_common(attack, o, true);
  attack->add_option("--image", o.image, "input image")->required();

  auto* eval = app.add_subcommand("eval", "attack every correctly classified image of a manifest");
  add_common(eval, o, true);
  eval->add_option("--manifest", o.manifest, "CSV with path,label")->required();
  eval->add_flag("--no-traces", o.no_traces, "omit confidence traces from the report");

  auto* sweep = app.add_subcommand("sweep", "fixed-beam and restart ablations");
  add_common(sweep, o, true);
  sweep->add_option("--manifest", o.manifest, "CSV with path,label")->required();
  sweep->add_option("--dim", o.dim, "swept quantity")
      ->check(CLI::IsMember({"lambda", "width", "layout", "k"}))
      ->capture_default_str();

  auto* shift = app.add_subcommand("shift-report", "per-band class-shift statistics");
  add_common(shift, o, true);
  shift->add_option("--manifest", o.manifest, "CSV with path,label")->required();

  auto* augment = app.add_subcommand("augment", "random-beam data augmentation");
  add_common(augment, o, false);
  augment->add_option("--manifest", o.manifest, "CSV with path,label")->required();
  augment->add_option("--probability", o.probability, "per-image beam probability");

  auto* robust = app.add_subcommand("robust-attack", "attack a batch of transformed copies");
  add_common(robust, o, true);
  robust->add_option("--image", o.image, "input image")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*attack) return cmd_attack(o);
    if (*eval) return cmd_eval(o);
    if (*sweep) return cmd_sweep(o);
    if (*shift) return cmd_shift(o);
    if (*augment) return cmd_augment(o);
    if (*robust) return cmd_robust(o);
  } catch (const TransportError& e) {
    std::cerr << "backend error: " << e.what() << "\n";
    return kTransport;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDomain;
  }
  return kOk;
}
