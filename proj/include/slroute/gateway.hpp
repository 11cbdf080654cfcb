#pragma once

// Prompt construction and chat-completion clients (live, replay, recording).

#include <chrono>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "slroute/config.hpp"
#include "slroute/ir.hpp"

namespace slroute::gateway {

struct GatewayConfig {
  std::string base_url = "https://api.openai.com/v1";
  std::string model = "gpt-4";
  double temperature = 0.0;
  int max_tokens = 1024;
  double timeout_seconds = 60.0;
  int retries = 0;
  std::string api_key_env = "OPENAI_API_KEY";
  int max_in_flight = 4;

  /// Defaults overridden by `gateway.*` keys. Throws ConfigError when an
  /// invariant (temperature >= 0, timeout > 0, retries >= 0,
  /// max_in_flight >= 1) fails.
  static GatewayConfig from(const KeyValues& kv);
  void validate() const;
};

/// Lower-case hex SHA-256 of the bytes of `text`.
std::string sha256_hex(std::string_view text);

struct Exchange {
  std::string prompt;
  std::string response;
  std::string prompt_sha256;
  std::string timestamp;  // ISO-8601 UTC

  static Exchange make(std::string prompt, std::string response);
  std::string to_json_line() const;
  /// Throws std::invalid_argument on malformed JSON, missing fields or a
  /// hash that does not match the prompt.
  static Exchange from_json_line(std::string_view line);
};

enum class ErrorKind { Timeout, Transport, HttpStatus, BadResponse, ReplayMiss, MissingApiKey };
std::string_view to_string(ErrorKind kind);

struct GatewayError {
  ErrorKind kind = ErrorKind::Transport;
  int http_status = 0;
  std::string message;

  std::string describe() const;
};

using CompletionResult = std::variant<std::string, GatewayError>;

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual CompletionResult complete(const std::string& prompt) = 0;
};

/// Prompt-hash keyed responses loaded from `*.jsonl` files. Read-only after
/// construction, so concurrent complete() calls are safe.
class ReplayClient : public LlmClient {
 public:
  /// `path` is a directory of .jsonl files or a single .jsonl file. Throws
  /// std::runtime_error naming file and line on unreadable or malformed data.
  explicit ReplayClient(const std::string& path);
  explicit ReplayClient(const std::vector<Exchange>& exchanges);

  CompletionResult complete(const std::string& prompt) override;
  std::size_t size() const { return by_hash_.size(); }

 private:
  std::map<std::string, std::string> by_hash_;
};

/// Single user message over HTTP(S) to {base_url}/chat/completions.
/// The bearer token is read from the environment variable named by the
/// config at call time and never stored in errors.
class LiveClient : public LlmClient {
 public:
  explicit LiveClient(GatewayConfig cfg);
  ~LiveClient() override;

  CompletionResult complete(const std::string& prompt) override;

  struct Slots;

 private:
  CompletionResult attempt(const std::string& prompt, const std::string& key);

  GatewayConfig cfg_;
  std::unique_ptr<Slots> slots_;
};

/// Appends every successful exchange of `inner` to `<dir>/exchanges.jsonl`.
class RecordingClient : public LlmClient {
 public:
  RecordingClient(std::shared_ptr<LlmClient> inner, std::string dir);

  CompletionResult complete(const std::string& prompt) override;

 private:
  std::shared_ptr<LlmClient> inner_;
  std::string path_;
  std::mutex write_mutex_;
};

// -- prompts ---------------------------------------------------------------

/// "A) x B) y ...".
std::string render_options(const std::vector<std::string>& options);

/// The selection prompt with context, question and options substituted.
std::string build_selection_prompt(const Problem& p);

/// Translation prompt for language `k`: grammar summary, two worked
/// examples and the problem.
std::string build_translation_prompt(const Problem& p, SlKind k);

/// Grammar summary embedded in translation prompts.
std::string_view grammar_summary(SlKind k);

/// Replaces each `{name}` in one left-to-right pass; substituted text is not
/// rescanned and unknown placeholders are left as they are.
std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values);

}  // namespace slroute::gateway
