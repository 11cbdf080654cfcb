#include <openssl/evp.h>

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "slroute/gateway.hpp"

namespace slroute::gateway {

using nlohmann::json;

GatewayConfig GatewayConfig::from(const KeyValues& kv) {
  GatewayConfig c;
  if (auto v = kv.get("gateway.base_url")) c.base_url = *v;
  if (auto v = kv.get("gateway.model")) c.model = *v;
  if (auto v = kv.get_number("gateway.temperature")) c.temperature = *v;
  if (auto v = kv.get_number("gateway.max_tokens")) c.max_tokens = static_cast<int>(*v);
  if (auto v = kv.get_number("gateway.timeout_seconds")) c.timeout_seconds = *v;
  if (auto v = kv.get_number("gateway.retries")) c.retries = static_cast<int>(*v);
  if (auto v = kv.get("gateway.api_key_env")) c.api_key_env = *v;
  if (auto v = kv.get_number("gateway.max_in_flight")) c.max_in_flight = static_cast<int>(*v);
  c.validate();
  return c;
}

void GatewayConfig::validate() const {
  if (!(temperature >= 0)) throw ConfigError("gateway.temperature must be >= 0");
  if (!(timeout_seconds > 0)) throw ConfigError("gateway.timeout_seconds must be > 0");
  if (retries < 0) throw ConfigError("gateway.retries must be >= 0");
  if (max_tokens <= 0) throw ConfigError("gateway.max_tokens must be > 0");
  if (max_in_flight < 1) throw ConfigError("gateway.max_in_flight must be >= 1");
  if (api_key_env.empty()) throw ConfigError("gateway.api_key_env must not be empty");
}

std::string sha256_hex(std::string_view text) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  std::ostringstream out;
  out << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) out << std::setw(2) << static_cast<int>(digest[i]);
  return out.str();
}

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

Exchange Exchange::make(std::string prompt, std::string response) {
  Exchange e;
  e.prompt_sha256 = sha256_hex(prompt);
  e.prompt = std::move(prompt);
  e.response = std::move(response);
  e.timestamp = utc_now();
  return e;
}

std::string Exchange::to_json_line() const {
  json j;
  j["prompt_sha256"] = prompt_sha256;
  j["prompt"] = prompt;
  j["response"] = response;
  j["timestamp"] = timestamp;
  return j.dump();
}

Exchange Exchange::from_json_line(std::string_view line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw std::invalid_argument("malformed JSON");
  Exchange e;
  try {
    e.prompt = j.at("prompt").get<std::string>();
    e.response = j.at("response").get<std::string>();
    e.prompt_sha256 = j.at("prompt_sha256").get<std::string>();
    e.timestamp = j.value("timestamp", "");
  } catch (const json::exception& ex) {
    throw std::invalid_argument(std::string("bad exchange: ") + ex.what());
  }
  if (sha256_hex(e.prompt) != e.prompt_sha256)
    throw std::invalid_argument("prompt_sha256 does not match prompt");
  return e;
}

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Timeout: return "Timeout";
    case ErrorKind::Transport: return "Transport";
    case ErrorKind::HttpStatus: return "HttpStatus";
    case ErrorKind::BadResponse: return "BadResponse";
    case ErrorKind::ReplayMiss: return "ReplayMiss";
    case ErrorKind::MissingApiKey: return "MissingApiKey";
  }
  return "?";
}

std::string GatewayError::describe() const {
  std::string out(to_string(kind));
  if (kind == ErrorKind::HttpStatus) out += " " + std::to_string(http_status);
  if (!message.empty()) out += ": " + message;
  return out;
}

// -- replay ------------------------------------------------------------------

namespace {

void load_file(const std::filesystem::path& file, std::map<std::string, std::string>& out) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read replay file " + file.string());
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Exchange e = Exchange::from_json_line(line);
      out[e.prompt_sha256] = std::move(e.response);
    } catch (const std::invalid_argument& ex) {
      throw std::runtime_error(file.string() + ":" + std::to_string(number) + ": " + ex.what());
    }
  }
}

}  // namespace

ReplayClient::ReplayClient(const std::string& path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (fs::is_directory(path, ec)) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(path))
      if (entry.is_regular_file() && entry.path().extension() == ".jsonl")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) load_file(f, by_hash_);
  } else if (fs::is_regular_file(path, ec)) {
    load_file(path, by_hash_);
  } else {
    throw std::runtime_error("replay store not found: " + path);
  }
}

ReplayClient::ReplayClient(const std::vector<Exchange>& exchanges) {
  for (const auto& e : exchanges) by_hash_[e.prompt_sha256] = e.response;
}

CompletionResult ReplayClient::complete(const std::string& prompt) {
  const std::string hash = sha256_hex(prompt);
  auto it = by_hash_.find(hash);
  if (it == by_hash_.end())
    return GatewayError{ErrorKind::ReplayMiss, 0, "no stored response for prompt " + hash};
  return it->second;
}

// -- recording ---------------------------------------------------------------

RecordingClient::RecordingClient(std::shared_ptr<LlmClient> inner, std::string dir)
    : inner_(std::move(inner)) {
  std::filesystem::create_directories(dir);
  path_ = (std::filesystem::path(dir) / "exchanges.jsonl").string();
}

CompletionResult RecordingClient::complete(const std::string& prompt) {
  CompletionResult r = inner_->complete(prompt);
  if (const auto* text = std::get_if<std::string>(&r)) {
    const std::string line = Exchange::make(prompt, *text).to_json_line();
    std::lock_guard lock(write_mutex_);
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    out << line << '\n';
    if (!out) throw std::runtime_error("cannot append to " + path_);
  }
  return r;
}

}  // namespace slroute::gateway
