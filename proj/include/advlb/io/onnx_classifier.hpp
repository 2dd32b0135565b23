#pragma once

#include <filesystem>
#include <mutex>
#include <optional>
#include <string>

#include <opencv2/core.hpp>
#include <opencv2/dnn.hpp>

#include "advlb/classifier.hpp"
#include "advlb/errors.hpp"
#include "advlb/image.hpp"

namespace advlb::io {

// Embedded backend: an ONNX model run through OpenCV's dnn module. Input is
// a 1x3xHxW float tensor normalized per channel; the output is flattened
// to K scores. cv::dnn::Net is not reentrant, so inference is serialized.
class OnnxClassifier final : public Classifier {
 public:
  OnnxClassifier(const std::filesystem::path& model, PreprocessSpec pre, bool apply_softmax)
      : pre_(pre), softmax_(apply_softmax) {
    if (!std::filesystem::exists(model)) {
      throw TransportError("model file not found: " + model.string());
    }
    try {
      net_ = cv::dnn::readNetFromONNX(model.string());
    } catch (const cv::Exception& e) {
      throw TransportError("failed to load ONNX model " + model.string() + ": " + e.what());
    }
    if (net_.empty()) throw TransportError("failed to load ONNX model " + model.string());
    net_.setPreferableBackend(cv::dnn::DNN_BACKEND_OPENCV);
    net_.setPreferableTarget(cv::dnn::DNN_TARGET_CPU);
    num_classes_ = infer(ImageBuffer(pre_.width, pre_.height, 0.5f)).size();
    if (num_classes_ < 2) throw TransportError("model produces fewer than 2 scores");
  }

  std::string_view kind() const override { return "embedded"; }
  std::size_t num_classes() const override { return num_classes_; }
  std::optional<PreprocessSpec> preprocess() const override { return pre_; }
  bool probabilities() const override { return softmax_; }

 protected:
  ScoreVector score_impl(const ImageBuffer& image) const override { return infer(image); }

 private:
  ScoreVector infer(const ImageBuffer& image) const {
    const int h = image.height(), w = image.width();
    const int dims[] = {1, 3, h, w};
    cv::Mat blob(4, dims, CV_32F);
    auto* dst = blob.ptr<float>();
    const std::size_t plane = static_cast<std::size_t>(h) * w;
    for (int c = 0; c < 3; ++c) {
      const int src = pre_.channel_order == ChannelOrder::RGB ? c : 2 - c;
      const double mean = pre_.mean[src], sd = pre_.stddev[src];
      for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
          dst[c * plane + static_cast<std::size_t>(y) * w + x] =
              static_cast<float>((image.at(x, y, src) - mean) / sd);
        }
      }
    }

    cv::Mat out;
    {
      std::lock_guard<std::mutex> lock(mutex_);
      try {
        net_.setInput(blob);
        out = net_.forward().clone();
      } catch (const cv::Exception& e) {
        throw TransportError(std::string("ONNX inference failed: ") + e.what());
      }
    }
    cv::Mat flat = out.reshape(1, 1);
    cv::Mat as_double;
    flat.convertTo(as_double, CV_64F);
    ScoreVector scores(as_double.begin<double>(), as_double.end<double>());
    return softmax_ ? softmax(scores) : scores;
  }

  PreprocessSpec pre_;
  bool softmax_;
  std::size_t num_classes_ = 0;
  mutable cv::dnn::Net net_;
  mutable std::mutex mutex_;
};

}  // namespace advlb::io
