#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "advlb/beam.hpp"
#include "advlb/classifier.hpp"
#include "advlb/errors.hpp"
#include "advlb/params.hpp"
#include "advlb/rng.hpp"

namespace advlb {

// One unit move along a single beam dimension.
struct CandidateStep {
  Dim dim = Dim::Lambda;
  double unit = 1.0;

  friend bool operator==(const CandidateStep&, const CandidateStep&) = default;
};

inline std::vector<CandidateStep> default_candidates() {
  return {{Dim::Lambda, 1.0}, {Dim::Angle, 1.0}, {Dim::Intercept, 1.0},
          {Dim::Width, 1.0},  {Dim::Intensity, 0.01}};
}

struct SearchConfig {
  ParamBounds bounds;
  std::vector<CandidateStep> candidates = default_candidates();
  std::vector<double> step_sizes{1.0, 2.0, 5.0, 10.0};
  int t_max = 200;
  int restarts = 200;
  Seed seed = 0;
  // Snap each random initialization onto bounds.min + integer multiples of
  // the candidate units, so every evaluated theta lies on the unit grid
  // (given integer step sizes).
  bool align_to_units = false;
  RenderOptions render;

  void validate() const {
    bounds.validate();
    if (candidates.empty()) throw DomainError("search: candidate set Q is empty");
    for (const auto& c : candidates) {
      if (!(c.unit > 0.0)) {
        throw DomainError("search: unit for " + std::string(dim_name(c.dim)) + " must be > 0");
      }
    }
    if (step_sizes.empty()) throw DomainError("search: step size set S is empty");
    for (double s : step_sizes) {
      if (!(s > 0.0)) throw DomainError("search: step sizes must be > 0");
    }
    if (t_max < 1) throw DomainError("search: t_max must be >= 1");
    if (restarts < 1) throw DomainError("search: restarts k must be >= 1");
  }

  // Upper bound on score calls for one attack: clean query plus, per
  // restart, one init and two per step.
  std::uint64_t query_budget() const {
    return 1 + static_cast<std::uint64_t>(restarts) * (1 + 2 * static_cast<std::uint64_t>(t_max));
  }
};

struct TracePoint {
  std::uint64_t query = 0;  // 1-based index of the score call
  int restart = 0;          // 0-based restart segment
  double confidence = 0.0;  // accepted f_y

  friend bool operator==(const TracePoint&, const TracePoint&) = default;
};

struct AttackOutcome {
  bool success = false;
  BeamParams theta;
  std::uint64_t queries = 0;
  LabelId clean_label = 0;
  LabelId adv_label = 0;
  double best_confidence = 0.0;
  double clean_confidence = 0.0;
  std::vector<TracePoint> trace;
  int restarts_used = 0;

  friend bool operator==(const AttackOutcome&, const AttackOutcome&) = default;
};

// Called for every evaluated theta with the scores it produced.
using EvalObserver = std::function<void(const BeamParams&, const ScoreVector&)>;

struct RestartResult {
  BeamParams theta;
  double best_confidence = 0.0;
  LabelId label = 0;
  bool success = false;
};

inline BeamParams align_to_grid(const BeamParams& theta, const SearchConfig& config) {
  BeamParams out = theta;
  for (const auto& c : config.candidates) {
    const double lo = config.bounds.min.get(c.dim);
    const double hi = config.bounds.max.get(c.dim);
    double v = lo + std::round((theta.get(c.dim) - lo) / c.unit) * c.unit;
    if (v > hi) v -= c.unit;
    out.set(c.dim, std::clamp(v, lo, hi));
  }
  return out;
}

// One greedy chain from theta_init. Evaluates the init, then up to t_max
// steps; each step tries theta + q*s and, only if that is rejected,
// theta - q*s. A candidate is accepted when its true-class score does not
// exceed the current restart's baseline. Stops as soon as the accepted
// image's top-1 differs from clean_label.
template <typename Scorer>
RestartResult greedy_restart(const ImageBuffer& x, Scorer& scorer, const BeamParams& theta_init,
                             const SearchConfig& config, LabelId clean_label, Rng& rng,
                             int restart_index, std::vector<TracePoint>* trace = nullptr,
                             const EvalObserver& observer = {}) {
  const auto evaluate = [&](const BeamParams& theta) {
    ScoreVector s = scorer(apply_beam(x, theta, config.render));
    if (observer) observer(theta, s);
    return s;
  };
  const auto record = [&](double conf) {
    if (trace) trace->push_back({scorer.queries(), restart_index, conf});
  };

  RestartResult result;
  result.theta = clip_params(theta_init, config.bounds);
  {
    const ScoreVector s = evaluate(result.theta);
    result.best_confidence = s.at(clean_label);
    result.label = top1(s);
    record(result.best_confidence);
    if (result.label != clean_label) {
      result.success = true;
      return result;
    }
  }

  for (int t = 0; t < config.t_max; ++t) {
    const CandidateStep& q = config.candidates[rng.index(config.candidates.size())];
    const double step = config.step_sizes[rng.index(config.step_sizes.size())];
    for (double direction : {1.0, -1.0}) {
      BeamParams candidate = result.theta;
      candidate.set(q.dim, candidate.get(q.dim) + direction * q.unit * step);
      candidate = clip_params(candidate, config.bounds);

      const ScoreVector s = evaluate(candidate);
      const double conf = s.at(clean_label);
      if (conf <= result.best_confidence) {
        result.theta = candidate;
        result.best_confidence = conf;
        result.label = top1(s);
        record(conf);
        if (result.label != clean_label) {
          result.success = true;
          return result;
        }
        break;
      }
    }
  }
  return result;
}

// Untargeted black-box laser-beam attack: greedy coordinate search with k
// random restarts minimizing the clean label's confidence.
inline AttackOutcome advlb_attack(const ImageBuffer& x, const Classifier& classifier,
                                  const SearchConfig& config, const EvalObserver& observer = {}) {
  config.validate();

  QueryCounter counter;
  CountingScorer scorer(classifier, counter);

  AttackOutcome out;
  const ScoreVector clean = scorer(x);
  out.clean_label = top1(clean);
  out.clean_confidence = clean[out.clean_label];
  out.adv_label = out.clean_label;
  out.best_confidence = std::numeric_limits<double>::infinity();

  for (int i = 0; i < config.restarts; ++i) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(i)));
    BeamParams init = sample_random_beam(config.bounds, rng);
    if (config.align_to_units) init = align_to_grid(init, config);

    const RestartResult r =
        greedy_restart(x, scorer, init, config, out.clean_label, rng, i, &out.trace, observer);
    out.restarts_used = i + 1;
    if (r.success) {
      out.success = true;
      out.theta = r.theta;
      out.adv_label = r.label;
      out.best_confidence = r.best_confidence;
      break;
    }
    if (r.best_confidence < out.best_confidence) {
      out.best_confidence = r.best_confidence;
      out.theta = r.theta;
      out.adv_label = r.label;
    }
  }
  out.queries = counter.count();
  return out;
}

}  // namespace advlb
