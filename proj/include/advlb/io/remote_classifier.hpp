#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "httplib.h"
#include "json.hpp"

#include "advlb/classifier.hpp"
#include "advlb/errors.hpp"
#include "advlb/harness/config.hpp"
#include "advlb/io/base64.hpp"
#include "advlb/io/image_io.hpp"

namespace advlb::io {

// Client for the scoring service:
//   GET  /v1/meta   -> {"model_id", "num_classes", "input_size": [W, H], "mean", "std"}
//   GET  /v1/labels -> ["name", ...]
//   POST /v1/score  {"image": base64 PNG} -> {"probs": [...], "top1", "model_id"}
// Images are sent as PNG in the service's input frame. 400/413 are caller
// errors (DomainError); connection failures and 5xx are retried, then
// surface as TransportError.
class RemoteClassifier final : public Classifier {
 public:
  RemoteClassifier(std::string url, RemoteOptions options, PreprocessSpec fallback = {})
      : options_(options), pre_(fallback) {
    split_url(url);
    const auto meta = get_json("/v1/meta");
    if (meta) {
      model_id_ = meta->value("model_id", std::string{});
      num_classes_ = meta->value("num_classes", std::size_t{0});
      if (meta->contains("input_size")) {
        pre_.width = meta->at("input_size").at(0).get<int>();
        pre_.height = meta->at("input_size").at(1).get<int>();
      }
      if (meta->contains("mean")) pre_.mean = meta->at("mean").get<std::array<double, 3>>();
      if (meta->contains("std")) pre_.stddev = meta->at("std").get<std::array<double, 3>>();
    }
    if (num_classes_ == 0) num_classes_ = labels().size();
    if (num_classes_ < 2) throw TransportError("scoring service reports fewer than 2 classes");
  }

  std::string_view kind() const override { return "remote"; }
  std::size_t num_classes() const override { return num_classes_; }
  std::optional<PreprocessSpec> preprocess() const override { return pre_; }
  bool probabilities() const override { return true; }
  const std::string& model_id() const { return model_id_; }

  std::vector<std::string> labels() const {
    const auto j = get_json("/v1/labels");
    if (!j || !j->is_array()) throw TransportError("scoring service: /v1/labels unavailable");
    return j->get<std::vector<std::string>>();
  }

 protected:
  ScoreVector score_impl(const ImageBuffer& image) const override {
    const std::string body = nlohmann::json{{"image", base64_encode(encode_png(image))}}.dump();
    std::string last_error = "no attempt made";
    for (int attempt = 0; attempt <= options_.retries; ++attempt) {
      auto cli = client();
      const auto res = cli.Post(prefix_ + "/v1/score", body, "application/json");
      if (!res) {
        last_error = "request failed: " + httplib::to_string(res.error());
        continue;
      }
      if (res->status == 200) return parse_scores(res->body);
      if (res->status == 400 || res->status == 413) {
        throw DomainError("scoring service rejected image (HTTP " + std::to_string(res->status) +
                          "): " + res->body);
      }
      last_error = "HTTP " + std::to_string(res->status);
    }
    throw TransportError("scoring service " + base_ + ": " + last_error + " after " +
                         std::to_string(options_.retries + 1) + " attempts");
  }

 private:
  void split_url(const std::string& url) {
    const auto scheme_end = url.find("://");
    const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    const auto path_start = url.find('/', host_start);
    base_ = url.substr(0, path_start);
    if (path_start != std::string::npos) {
      prefix_ = url.substr(path_start);
      while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
    }
  }

  httplib::Client client() const {
    httplib::Client cli(base_);
    const auto timeout = std::chrono::duration<double>(options_.timeout_s);
    const auto usec = std::chrono::duration_cast<std::chrono::microseconds>(timeout).count();
    const auto sec = static_cast<time_t>(usec / 1000000);
    const auto rem = static_cast<time_t>(usec % 1000000);
    cli.set_connection_timeout(sec, rem);
    cli.set_read_timeout(sec, rem);
    cli.set_write_timeout(sec, rem);
    return cli;
  }

  std::optional<nlohmann::json> get_json(const std::string& path) const {
    std::string last_error;
    for (int attempt = 0; attempt <= options_.retries; ++attempt) {
      auto cli = client();
      const auto res = cli.Get(prefix_ + path);
      if (!res) {
        last_error = httplib::to_string(res.error());
        continue;
      }
      if (res->status == 404) return std::nullopt;
      if (res->status != 200) {
        last_error = "HTTP " + std::to_string(res->status);
        continue;
      }
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::exception& e) {
        throw TransportError("scoring service " + path + ": malformed JSON: " + e.what());
      }
    }
    throw TransportError("scoring service " + base_ + path + ": " + last_error);
  }

  ScoreVector parse_scores(const std::string& body) const {
    try {
      const auto j = nlohmann::json::parse(body);
      return j.at("probs").get<ScoreVector>();
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(std::string("scoring service: malformed score response: ") + e.what());
    }
  }

  RemoteOptions options_;
  PreprocessSpec pre_;
  std::string base_;
  std::string prefix_;
  std::string model_id_;
  std::size_t num_classes_ = 0;
};

}  // namespace advlb::io
