#pragma once

// Local chat-completion endpoint for exercising the live client.

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <functional>
#include <json.hpp>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace slroute::testing {

struct SeenRequest {
  std::string path;
  std::string authorization;
  nlohmann::json body;
};

class MockCompletionServer {
 public:
  /// `reply` maps the request body to (status, response body).
  using Reply = std::function<std::pair<int, std::string>(const nlohmann::json&)>;

  explicit MockCompletionServer(Reply reply) : reply_(std::move(reply)) {
    server_.Post(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      int now = ++in_flight_;
      for (int seen = peak_.load(); now > seen && !peak_.compare_exchange_weak(seen, now);) {
      }
      auto body = nlohmann::json::parse(req.body, nullptr, false);
      {
        std::lock_guard lock(mutex_);
        requests_.push_back({req.path, req.get_header_value("Authorization"), body});
      }
      auto [status, text] = reply_(body);
      res.status = status;
      res.set_content(text, "application/json");
      --in_flight_;
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockCompletionServer() {
    server_.stop();
    thread_.join();
  }

  std::string base_url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
  int peak_in_flight() const { return peak_.load(); }
  std::vector<SeenRequest> requests() const {
    std::lock_guard lock(mutex_);
    return requests_;
  }

  static std::string completion(const std::string& content) {
    nlohmann::json j;
    j["choices"] = nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", content}}}}});
    return j.dump();
  }

 private:
  Reply reply_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> in_flight_{0};
  std::atomic<int> peak_{0};
  mutable std::mutex mutex_;
  std::vector<SeenRequest> requests_;
};

}  // namespace slroute::testing
