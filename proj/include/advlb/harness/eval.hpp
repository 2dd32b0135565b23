#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advlb/beam.hpp"
#include "advlb/classifier.hpp"
#include "advlb/errors.hpp"
#include "advlb/harness/dataset.hpp"
#include "advlb/parallel.hpp"
#include "advlb/params.hpp"
#include "advlb/rng.hpp"
#include "advlb/search.hpp"

namespace advlb {

struct ImageResult {
  std::string name;
  LabelId true_label = 0;
  std::optional<LabelId> clean_label;
  bool skipped = false;
  std::optional<AttackOutcome> outcome;
  std::string error;
};

struct EvalReport {
  std::size_t total = 0;
  std::size_t skipped_misclassified = 0;
  std::size_t attempted = 0;
  std::size_t successes = 0;
  std::size_t errors = 0;
  double success_rate = 0.0;          // percent of attempted
  double mean_queries_success = 0.0;  // over successful attacks
  double mean_queries_all = 0.0;      // over attacks that ran to completion
  bool no_op = false;                 // nothing left to attack after skipping
  std::vector<ImageResult> images;
};

inline double percent(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : 100.0 * static_cast<double>(part) / static_cast<double>(whole);
}

struct EvalOptions {
  std::size_t workers = 1;
};

inline EvalReport summarize(std::vector<ImageResult> images) {
  EvalReport report;
  report.total = images.size();
  std::uint64_t q_success = 0, q_all = 0;
  std::size_t completed = 0;
  for (const auto& img : images) {
    if (img.skipped) {
      ++report.skipped_misclassified;
      continue;
    }
    ++report.attempted;
    if (!img.outcome) {
      ++report.errors;
      continue;
    }
    ++completed;
    q_all += img.outcome->queries;
    if (img.outcome->success) {
      ++report.successes;
      q_success += img.outcome->queries;
    }
  }
  report.success_rate = percent(report.successes, report.attempted);
  report.mean_queries_success =
      report.successes ? static_cast<double>(q_success) / static_cast<double>(report.successes) : 0.0;
  report.mean_queries_all =
      completed ? static_cast<double>(q_all) / static_cast<double>(completed) : 0.0;
  report.no_op = report.attempted == 0;
  report.images = std::move(images);
  return report;
}

// Attacks every image the clean model classifies correctly. The screening
// query is separate from the attack's own query count. Image i uses the
// search seed derived from (config.seed, i).
inline EvalReport run_eval(const ImageSource& source, const Classifier& classifier,
                           const SearchConfig& config, const EvalOptions& options = {}) {
  if (source.size() == 0) throw DomainError("run_eval: empty dataset");
  config.validate();

  std::vector<ImageResult> images(source.size());
  parallel_for(source.size(), options.workers, [&](std::size_t i) {
    ImageResult& r = images[i];
    r.name = source.name(i);
    r.true_label = source.label(i);
    try {
      const ImageBuffer x = source.load(i);
      r.clean_label = top1(classifier.score(x));
      if (*r.clean_label != r.true_label) {
        r.skipped = true;
        return;
      }
      SearchConfig cfg = config;
      cfg.seed = derive_seed(config.seed, i);
      r.outcome = advlb_attack(x, classifier, cfg);
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  });
  return summarize(std::move(images));
}

// ---------------------------------------------------------------------------
// Fixed-beam ablations: one predetermined beam per setting, no search.

struct SweepSpec {
  Dim dim = Dim::Lambda;
  std::vector<double> values;
  BeamParams fixed{Wavelength{580.0}, 45.0, 0.0, 20.0, 1.0};
  ParamBounds bounds;
  RenderOptions render;
  std::size_t workers = 1;
};

struct SweepRow {
  double value = 0.0;
  std::size_t flips = 0;
  std::size_t evaluated = 0;
  double success_rate = 0.0;
};

struct SweepTable {
  Dim dim = Dim::Lambda;
  std::size_t total = 0;
  std::size_t skipped_misclassified = 0;
  std::size_t errors = 0;
  std::vector<SweepRow> rows;
};

namespace detail {

struct CleanCache {
  std::vector<std::optional<ImageBuffer>> images;  // nullopt: skipped or failed
  std::size_t skipped = 0;
  std::size_t errors = 0;
};

inline CleanCache screen_correct(const ImageSource& source, const Classifier& classifier,
                                 std::size_t workers) {
  CleanCache cache;
  cache.images.resize(source.size());
  std::vector<int> status(source.size(), 0);  // 0 ok, 1 skipped, 2 error
  parallel_for(source.size(), workers, [&](std::size_t i) {
    try {
      ImageBuffer x = source.load(i);
      if (top1(classifier.score(x)) != source.label(i)) {
        status[i] = 1;
        return;
      }
      cache.images[i] = std::move(x);
    } catch (const std::exception&) {
      status[i] = 2;
    }
  });
  for (int s : status) {
    cache.skipped += s == 1;
    cache.errors += s == 2;
  }
  return cache;
}

// Counts top-1 flips of `theta` over the cached correctly classified images.
inline SweepRow flip_rate(const CleanCache& cache, const ImageSource& source,
                          const Classifier& classifier, const BeamParams& theta,
                          const RenderOptions& render, std::size_t workers) {
  std::vector<int> flipped(cache.images.size(), -1);
  parallel_for(cache.images.size(), workers, [&](std::size_t i) {
    if (!cache.images[i]) return;
    try {
      const auto s = classifier.score(apply_beam(*cache.images[i], theta, render));
      flipped[i] = top1(s) != source.label(i) ? 1 : 0;
    } catch (const std::exception&) {
      flipped[i] = -1;
    }
  });
  SweepRow row;
  for (int f : flipped) {
    if (f < 0) continue;
    ++row.evaluated;
    row.flips += static_cast<std::size_t>(f);
  }
  row.success_rate = percent(row.flips, row.evaluated);
  return row;
}

}  // namespace detail

inline SweepTable sweep_fixed_beam(const SweepSpec& spec, const ImageSource& source,
                                   const Classifier& classifier) {
  if (source.size() == 0) throw DomainError("sweep: empty dataset");
  spec.bounds.validate();
  for (double v : spec.values) {
    BeamParams theta = spec.fixed;
    theta.set(spec.dim, v);
    if (!spec.bounds.contains(theta)) {
      throw DomainError("sweep value " + std::to_string(v) + " for " +
                        std::string(dim_name(spec.dim)) + " is outside the parameter bounds");
    }
  }

  SweepTable table;
  table.dim = spec.dim;
  table.total = source.size();
  const auto cache = detail::screen_correct(source, classifier, spec.workers);
  table.skipped_misclassified = cache.skipped;
  table.errors = cache.errors;
  for (double v : spec.values) {
    BeamParams theta = spec.fixed;
    theta.set(spec.dim, v);
    SweepRow row = detail::flip_rate(cache, source, classifier, theta, spec.render, spec.workers);
    row.value = v;
    table.rows.push_back(row);
  }
  return table;
}

struct LayoutSpec {
  std::vector<double> angles;      // r grid, degrees
  std::vector<double> intercepts;  // b grid, pixels
  BeamParams fixed{Wavelength{580.0}, 0.0, 0.0, 20.0, 1.0};
  RenderOptions render;
  std::size_t workers = 1;

  // r in {0, 10, ..., 180} x b in {0, 20, ..., 400}.
  static LayoutSpec default_grid() {
    LayoutSpec s;
    for (int i = 0; i <= 18; ++i) s.angles.push_back(10.0 * i);
    for (int j = 0; j <= 20; ++j) s.intercepts.push_back(20.0 * j);
    return s;
  }
};

struct LayoutCell {
  double angle_deg = 0.0;
  double intercept = 0.0;
  double success_rate = 0.0;
  std::size_t flips = 0;
  std::size_t evaluated = 0;
};

struct LayoutGrid {
  std::size_t total = 0;
  std::size_t skipped_misclassified = 0;
  std::vector<double> angles;
  std::vector<double> intercepts;
  std::vector<LayoutCell> cells;  // row-major: angle-major, intercept-minor

  const LayoutCell& at(std::size_t ai, std::size_t bi) const {
    return cells.at(ai * intercepts.size() + bi);
  }
};

inline LayoutGrid layout_heatmap(const LayoutSpec& spec, const ImageSource& source,
                                 const Classifier& classifier) {
  if (source.size() == 0) throw DomainError("layout: empty dataset");
  if (spec.angles.empty() || spec.intercepts.empty()) throw DomainError("layout: empty grid");
  for (double r : spec.angles) {
    if (r < 0.0 || r > 180.0) throw DomainError("layout: r grid must lie within [0, 180]");
  }
  for (double b : spec.intercepts) {
    if (b < 0.0) throw DomainError("layout: b grid must be non-negative");
  }

  LayoutGrid grid;
  grid.total = source.size();
  grid.angles = spec.angles;
  grid.intercepts = spec.intercepts;
  const auto cache = detail::screen_correct(source, classifier, spec.workers);
  grid.skipped_misclassified = cache.skipped;
  for (double r : spec.angles) {
    for (double b : spec.intercepts) {
      BeamParams theta = spec.fixed;
      theta.angle_deg = r;
      theta.intercept = b;
      const SweepRow row =
          detail::flip_rate(cache, source, classifier, theta, spec.render, spec.workers);
      grid.cells.push_back({r, b, row.success_rate, row.flips, row.evaluated});
    }
  }
  return grid;
}

struct RestartRow {
  int k = 1;
  EvalReport report;
};

// run_eval per k with identical base seeds; restart i of image n always
// draws from derive_seed(derive_seed(seed, n), i), so larger k extends
// smaller k's restart sequence.
inline std::vector<RestartRow> sweep_restarts(const std::vector<int>& k_values,
                                              const ImageSource& source,
                                              const Classifier& classifier,
                                              const SearchConfig& config,
                                              const EvalOptions& options = {}) {
  for (int k : k_values) {
    if (k < 1) throw DomainError("sweep_restarts: k values must be >= 1");
  }
  std::vector<RestartRow> rows;
  for (int k : k_values) {
    SearchConfig cfg = config;
    cfg.restarts = k;
    rows.push_back({k, run_eval(source, classifier, cfg, options)});
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Class-shift statistics: which class's share of predictions rises most
// when random beams from a wavelength band are added.

struct ShiftSpec {
  std::vector<double> band_edges{380.0, 470.0, 560.0, 650.0, 750.0};
  int beams_per_image = 4;
  std::size_t top_k = 5;
  ParamBounds bounds;
  RenderOptions render;
  Seed seed = 0;
  std::size_t workers = 1;

  void validate() const {
    if (band_edges.size() < 2) throw DomainError("shift: need at least one band");
    if (band_edges.front() != kVisibleMinNm || band_edges.back() != kVisibleMaxNm) {
      throw DomainError("shift: bands must partition [380, 750]");
    }
    for (std::size_t i = 1; i < band_edges.size(); ++i) {
      if (!(band_edges[i] > band_edges[i - 1])) {
        throw DomainError("shift: band edges must be strictly increasing");
      }
    }
    if (beams_per_image < 1) throw DomainError("shift: beams_per_image must be >= 1");
    if (top_k < 1) throw DomainError("shift: top_k must be >= 1");
    bounds.validate();
  }
};

struct ShiftSample {
  std::size_t image = 0;
  BeamParams theta;
  LabelId top1 = 0;
  std::vector<LabelId> topk;
};

struct BandShift {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  LabelId top1_class = 0;
  double top1_before = 0.0;  // percent
  double top1_after = 0.0;
  LabelId topk_class = 0;
  double topk_before = 0.0;
  double topk_after = 0.0;
  std::vector<double> top1_share_after;  // per class, percent
  std::vector<double> topk_share_after;
  std::vector<ShiftSample> samples;
};

struct ShiftReport {
  std::size_t images = 0;
  std::size_t num_classes = 0;
  std::vector<double> top1_share_before;
  std::vector<double> topk_share_before;
  std::vector<LabelId> clean_top1;
  std::vector<std::vector<LabelId>> clean_topk;
  std::vector<BandShift> bands;
};

namespace detail {

inline LabelId max_rise(const std::vector<double>& before, const std::vector<double>& after) {
  LabelId best = 0;
  for (std::size_t c = 1; c < before.size(); ++c) {
    if (after[c] - before[c] > after[best] - before[best]) best = c;
  }
  return best;
}

}  // namespace detail

inline ShiftReport class_shift_report(const ImageSource& source, const Classifier& classifier,
                                      const ShiftSpec& spec) {
  if (source.size() == 0) throw DomainError("shift: empty dataset");
  spec.validate();
  const std::size_t n = source.size();
  const std::size_t k = classifier.num_classes();

  ShiftReport report;
  report.images = n;
  report.num_classes = k;
  report.clean_top1.resize(n);
  report.clean_topk.resize(n);
  parallel_for(n, spec.workers, [&](std::size_t i) {
    const auto s = classifier.score(source.load(i));
    report.clean_top1[i] = top1(s);
    report.clean_topk[i] = topk(s, spec.top_k);
  });
  report.top1_share_before.assign(k, 0.0);
  report.topk_share_before.assign(k, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    report.top1_share_before[report.clean_top1[i]] += 1.0;
    for (LabelId c : report.clean_topk[i]) report.topk_share_before[c] += 1.0;
  }
  for (std::size_t c = 0; c < k; ++c) {
    report.top1_share_before[c] *= 100.0 / static_cast<double>(n);
    report.topk_share_before[c] *= 100.0 / static_cast<double>(n);
  }

  const std::size_t per_image = static_cast<std::size_t>(spec.beams_per_image);
  for (std::size_t band = 0; band + 1 < spec.band_edges.size(); ++band) {
    BandShift shift;
    shift.lambda_lo = spec.band_edges[band];
    shift.lambda_hi = spec.band_edges[band + 1];
    ParamBounds band_bounds = spec.bounds;
    band_bounds.min.lambda.nanometers = shift.lambda_lo;
    band_bounds.max.lambda.nanometers = shift.lambda_hi;

    shift.samples.resize(n * per_image);
    parallel_for(n, spec.workers, [&](std::size_t i) {
      const ImageBuffer x = source.load(i);
      for (std::size_t j = 0; j < per_image; ++j) {
        Rng rng(derive_seed(derive_seed(derive_seed(spec.seed, band), i), j));
        ShiftSample& sample = shift.samples[i * per_image + j];
        sample.image = i;
        sample.theta = sample_random_beam(band_bounds, rng);
        const auto s = classifier.score(apply_beam(x, sample.theta, spec.render));
        sample.top1 = top1(s);
        sample.topk = topk(s, spec.top_k);
      }
    });

    shift.top1_share_after.assign(k, 0.0);
    shift.topk_share_after.assign(k, 0.0);
    for (const auto& sample : shift.samples) {
      shift.top1_share_after[sample.top1] += 1.0;
      for (LabelId c : sample.topk) shift.topk_share_after[c] += 1.0;
    }
    const double denom = static_cast<double>(shift.samples.size());
    for (std::size_t c = 0; c < k; ++c) {
      shift.top1_share_after[c] *= 100.0 / denom;
      shift.topk_share_after[c] *= 100.0 / denom;
    }
    shift.top1_class = detail::max_rise(report.top1_share_before, shift.top1_share_after);
    shift.top1_before = report.top1_share_before[shift.top1_class];
    shift.top1_after = shift.top1_share_after[shift.top1_class];
    shift.topk_class = detail::max_rise(report.topk_share_before, shift.topk_share_after);
    shift.topk_before = report.topk_share_before[shift.topk_class];
    shift.topk_after = shift.topk_share_after[shift.topk_class];
    report.bands.push_back(std::move(shift));
  }
  return report;
}

}  // namespace advlb
