#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "advlb/errors.hpp"
#include "advlb/image.hpp"

namespace advlb {

using ScoreVector = std::vector<double>;
using LabelId = std::size_t;

// Index of the maximum score; ties go to the lowest index.
inline LabelId top1(std::span<const double> scores) {
  if (scores.empty()) throw DomainError("top1 of an empty score vector");
  LabelId best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
  }
  return best;
}

// The k highest-scoring labels in descending order, ties by lowest index.
inline std::vector<LabelId> topk(std::span<const double> scores, std::size_t k) {
  if (scores.empty()) throw DomainError("topk of an empty score vector");
  std::vector<LabelId> idx(scores.size());
  std::iota(idx.begin(), idx.end(), LabelId{0});
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](LabelId a, LabelId b) {
                      return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
                    });
  idx.resize(k);
  return idx;
}

inline ScoreVector softmax(std::span<const double> logits) {
  ScoreVector out(logits.begin(), logits.end());
  if (out.empty()) return out;
  const double peak = *std::max_element(out.begin(), out.end());
  double total = 0.0;
  for (double& v : out) {
    v = std::exp(v - peak);
    total += v;
  }
  for (double& v : out) v /= total;
  return out;
}

enum class ChannelOrder { RGB, BGR };

// How a backend wants its input: raster size (the frame beams are rendered
// in) and per-channel normalization applied before inference.
struct PreprocessSpec {
  int width = 224;
  int height = 224;
  std::array<double, 3> mean{0.485, 0.456, 0.406};
  std::array<double, 3> stddev{0.229, 0.224, 0.225};
  ChannelOrder channel_order = ChannelOrder::RGB;

  friend bool operator==(const PreprocessSpec&, const PreprocessSpec&) = default;
};

// Score-only black-box classifier. score() is the single capability the
// search sees.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::string_view kind() const = 0;
  virtual std::size_t num_classes() const = 0;

  // Fixed input raster, if the backend requires one. Images handed to
  // score() must already be in this frame.
  virtual std::optional<PreprocessSpec> preprocess() const { return std::nullopt; }

  // Whether scores are normalized probabilities.
  virtual bool probabilities() const { return false; }

  ScoreVector score(const ImageBuffer& image) const {
    if (image.empty()) throw DomainError("cannot score an empty image");
    if (auto pre = preprocess(); pre && (image.width() != pre->width || image.height() != pre->height)) {
      throw DomainError("image is " + std::to_string(image.width()) + "x" +
                        std::to_string(image.height()) + " but backend expects " +
                        std::to_string(pre->width) + "x" + std::to_string(pre->height));
    }
    ScoreVector s = score_impl(image);
    if (s.size() != num_classes()) {
      throw TransportError("backend returned " + std::to_string(s.size()) + " scores, expected " +
                           std::to_string(num_classes()));
    }
    for (double v : s) {
      if (!std::isfinite(v)) throw TransportError("backend returned a non-finite score");
    }
    return s;
  }

 protected:
  virtual ScoreVector score_impl(const ImageBuffer& image) const = 0;
};

// Counts score invocations; shared between a scorer and whoever reports
// query totals.
class QueryCounter {
 public:
  std::uint64_t count() const { return n_.load(std::memory_order_relaxed); }
  void increment() { n_.fetch_add(1, std::memory_order_relaxed); }
  void reset() { n_.store(0, std::memory_order_relaxed); }

 private:
  std::atomic<std::uint64_t> n_{0};
};

// Instrumented access to a classifier: every call is one query.
class CountingScorer {
 public:
  CountingScorer(const Classifier& classifier, QueryCounter& counter)
      : classifier_(&classifier), counter_(&counter) {}

  ScoreVector operator()(const ImageBuffer& image) const {
    counter_->increment();
    return classifier_->score(image);
  }

  const Classifier& classifier() const { return *classifier_; }
  std::uint64_t queries() const { return counter_->count(); }

 private:
  const Classifier* classifier_;
  QueryCounter* counter_;
};

// Closed-form backend: logits are affine in the image's per-channel mean
// intensity, followed by softmax.
struct ToySpec {
  std::vector<std::array<double, 3>> weights;  // one row per class
  std::vector<double> bias;

  std::size_t num_classes() const { return weights.size(); }

  // Class 0 by default; class 1 wins once enough blue light is added.
  static ToySpec blue_sensitive() {
    return ToySpec{{{0.0, 0.0, 0.0}, {-10.0, -5.0, 20.0}}, {0.0, -1.5}};
  }

  // Every class gets the same score for every image.
  static ToySpec constant(std::size_t k) {
    return ToySpec{std::vector<std::array<double, 3>>(k, {0.0, 0.0, 0.0}),
                   std::vector<double>(k, 0.0)};
  }
};

class ToyClassifier final : public Classifier {
 public:
  explicit ToyClassifier(ToySpec spec) : spec_(std::move(spec)) {
    if (spec_.num_classes() < 2) {
      throw DomainError("toy classifier needs K >= 2 classes, got " +
                        std::to_string(spec_.num_classes()));
    }
    if (spec_.bias.size() != spec_.weights.size()) {
      throw DomainError("toy classifier: bias length differs from weight rows");
    }
  }

  std::string_view kind() const override { return "toy"; }
  std::size_t num_classes() const override { return spec_.num_classes(); }
  bool probabilities() const override { return true; }
  const ToySpec& spec() const { return spec_; }

  ScoreVector logits(const std::array<double, 3>& means) const {
    ScoreVector z(spec_.num_classes());
    for (std::size_t k = 0; k < z.size(); ++k) {
      const auto& w = spec_.weights[k];
      z[k] = w[0] * means[0] + w[1] * means[1] + w[2] * means[2] + spec_.bias[k];
    }
    return z;
  }

 protected:
  ScoreVector score_impl(const ImageBuffer& image) const override {
    return softmax(logits(channel_means(image)));
  }

 private:
  ToySpec spec_;
};

inline ToyClassifier make_toy_classifier(ToySpec spec) { return ToyClassifier(std::move(spec)); }

// Adapts any callable into a backend. Useful for instrumented or synthetic
// classifiers in tests and for wrapping other scoring routes.
class FunctionClassifier final : public Classifier {
 public:
  using Fn = std::function<ScoreVector(const ImageBuffer&)>;

  FunctionClassifier(std::size_t num_classes, Fn fn, std::string kind = "function")
      : k_(num_classes), fn_(std::move(fn)), kind_(std::move(kind)) {}

  std::string_view kind() const override { return kind_; }
  std::size_t num_classes() const override { return k_; }

 protected:
  ScoreVector score_impl(const ImageBuffer& image) const override { return fn_(image); }

 private:
  std::size_t k_;
  Fn fn_;
  std::string kind_;
};

}  // namespace advlb
