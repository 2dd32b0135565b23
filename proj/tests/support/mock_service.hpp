#pragma once

// In-process scoring service speaking the remote backend's wire protocol,
// backed by any local classifier.

#include <atomic>
#include <chrono>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "advlb/classifier.hpp"
#include "advlb/io/base64.hpp"
#include "advlb/io/image_io.hpp"

namespace advlb::planted {

class MockService {
 public:
  MockService(const Classifier& model, int width, int height, bool serve_meta = true)
      : model_(model) {
    using nlohmann::json;
    server_.Get("/v1/meta", [=, this](const httplib::Request&, httplib::Response& res) {
      if (!serve_meta) {
        res.status = 404;
        return;
      }
      const json meta{{"model_id", "mock"},
                      {"num_classes", model_.num_classes()},
                      {"input_size", {width, height}},
                      {"mean", {0.485, 0.456, 0.406}},
                      {"std", {0.229, 0.224, 0.225}}};
      res.set_content(meta.dump(), "application/json");
    });
    server_.Get("/v1/labels", [this](const httplib::Request&, httplib::Response& res) {
      json names = json::array();
      for (std::size_t i = 0; i < model_.num_classes(); ++i) names.push_back("class" + std::to_string(i));
      res.set_content(names.dump(), "application/json");
    });
    server_.Post("/v1/score", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests;
      if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms.load()));
      if (fail_next > 0) {
        --fail_next;
        res.status = 503;
        return;
      }
      if (req.body.size() > max_body) {
        res.status = 413;
        return;
      }
      std::optional<std::vector<std::uint8_t>> bytes;
      try {
        bytes = io::base64_decode(json::parse(req.body).at("image").get<std::string>());
      } catch (const std::exception&) {
      }
      if (!bytes) {
        res.status = 400;
        return;
      }
      ImageBuffer img(1, 1);
      try {
        img = io::decode_image(*bytes);
      } catch (const std::exception&) {
        res.status = 400;
        return;
      }
      const auto probs = model_.score(img);
      res.set_content(json{{"probs", probs}, {"top1", top1(probs)}, {"model_id", "mock"}}.dump(),
                      "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockService() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> fail_next{0};
  std::atomic<int> delay_ms{0};
  std::atomic<int> requests{0};
  std::size_t max_body = 1 << 22;

 private:
  const Classifier& model_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

}  // namespace advlb::planted
