#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <condition_variable>
#include <cstdlib>
#include <json.hpp>
#include <regex>

#include "slroute/gateway.hpp"

namespace slroute::gateway {

using nlohmann::json;

// Counting gate bounding in-flight requests.
struct LiveClient::Slots {
  std::mutex mutex;
  std::condition_variable cv;
  int free = 0;
};

namespace {

class SlotGuard {
 public:
  explicit SlotGuard(LiveClient::Slots& slots) : slots_(slots) {
    std::unique_lock lock(slots_.mutex);
    slots_.cv.wait(lock, [&] { return slots_.free > 0; });
    --slots_.free;
  }
  ~SlotGuard() {
    {
      std::lock_guard lock(slots_.mutex);
      ++slots_.free;
    }
    slots_.cv.notify_one();
  }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  LiveClient::Slots& slots_;
};

std::string scrub(std::string text, const std::string& secret) {
  if (secret.empty()) return text;
  for (auto at = text.find(secret); at != std::string::npos; at = text.find(secret, at))
    text.replace(at, secret.size(), "***");
  return text;
}

bool retryable(const GatewayError& e) {
  return e.kind == ErrorKind::Timeout || e.kind == ErrorKind::Transport ||
         (e.kind == ErrorKind::HttpStatus && e.http_status >= 500);
}

}  // namespace

LiveClient::LiveClient(GatewayConfig cfg) : cfg_(std::move(cfg)), slots_(std::make_unique<Slots>()) {
  cfg_.validate();
  slots_->free = cfg_.max_in_flight;
}

LiveClient::~LiveClient() = default;

CompletionResult LiveClient::complete(const std::string& prompt) {
  const char* key = std::getenv(cfg_.api_key_env.c_str());
  if (key == nullptr || *key == '\0')
    return GatewayError{ErrorKind::MissingApiKey, 0,
                        "environment variable " + cfg_.api_key_env + " is not set"};
  SlotGuard slot(*slots_);
  CompletionResult r;
  for (int attempt_no = 0; attempt_no <= cfg_.retries; ++attempt_no) {
    r = attempt(prompt, key);
    const auto* err = std::get_if<GatewayError>(&r);
    if (err == nullptr || !retryable(*err)) break;
  }
  return r;
}

CompletionResult LiveClient::attempt(const std::string& prompt, const std::string& key) {
  static const std::regex kUrl(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(cfg_.base_url, m, kUrl))
    return GatewayError{ErrorKind::Transport, 0, "invalid base URL " + cfg_.base_url};
  std::string path = m[2].matched ? m[2].str() : "";
  while (!path.empty() && path.back() == '/') path.pop_back();
  path += "/chat/completions";

  httplib::Client client(m[1].str());
  const auto timeout = std::chrono::duration<double>(cfg_.timeout_seconds);
  const auto as_us = std::chrono::duration_cast<std::chrono::microseconds>(timeout);
  client.set_connection_timeout(as_us);
  client.set_read_timeout(as_us);
  client.set_write_timeout(as_us);
  client.set_bearer_token_auth(key);

  json body;
  body["model"] = cfg_.model;
  body["messages"] = json::array({json{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = cfg_.temperature;
  body["max_tokens"] = cfg_.max_tokens;

  const auto started = std::chrono::steady_clock::now();
  auto res = client.Post(path, body.dump(), "application/json");
  const auto elapsed = std::chrono::steady_clock::now() - started;

  if (!res) {
    const httplib::Error err = res.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           elapsed >= std::chrono::duration<double>(cfg_.timeout_seconds * 0.9);
    return GatewayError{timed_out ? ErrorKind::Timeout : ErrorKind::Transport, 0,
                        scrub(httplib::to_string(err), key)};
  }
  if (res->status != 200)
    return GatewayError{ErrorKind::HttpStatus, res->status, scrub(res->body.substr(0, 200), key)};

  json reply = json::parse(res->body, nullptr, false);
  try {
    if (!reply.is_discarded()) return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception&) {
  }
  return GatewayError{ErrorKind::BadResponse, res->status, "missing choices[0].message.content"};
}

}  // namespace slroute::gateway
