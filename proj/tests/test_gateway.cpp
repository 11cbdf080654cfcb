#include <cstdlib>
#include <thread>

#include <gtest/gtest.h>

#include "slroute/gateway.hpp"
#include "support/mock_server.hpp"
#include "support/temp_dir.hpp"

namespace slroute::gateway {
namespace {

using slroute::testing::MockCompletionServer;
using slroute::testing::TempDir;

constexpr const char* kKeyEnv = "SLROUTE_TEST_API_KEY";
constexpr const char* kDummyKey = "sk-dummy-7f3a9c21e4b8d6059aa1";

Problem tiger() {
  return {"tiger",
          {"The tiger is big.", "If something is big then it visits the rabbit."},
          "Is the following statement true, false, or unknown? The rabbit does not need the lion.",
          {"True", "False", "Unknown"},
          1};
}

GatewayConfig local(const MockCompletionServer& server) {
  GatewayConfig cfg;
  cfg.base_url = server.base_url();
  cfg.api_key_env = kKeyEnv;
  cfg.timeout_seconds = 5;
  return cfg;
}

class WithKey : public ::testing::Test {
 protected:
  void SetUp() override { ::setenv(kKeyEnv, kDummyKey, 1); }
  void TearDown() override { ::unsetenv(kKeyEnv); }
};

TEST(Sha256, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Exchange, JsonLineRoundTrip) {
  auto e = Exchange::make("prompt text\nwith lines", "FOL");
  EXPECT_EQ(e.prompt_sha256, sha256_hex(e.prompt));
  EXPECT_EQ(e.timestamp.size(), 20u);
  auto back = Exchange::from_json_line(e.to_json_line());
  EXPECT_EQ(back.prompt, e.prompt);
  EXPECT_EQ(back.response, e.response);
  EXPECT_EQ(back.timestamp, e.timestamp);
  EXPECT_EQ(e.to_json_line().find('\n'), std::string::npos);
}

TEST(Exchange, HashMismatchRejected) {
  auto e = Exchange::make("a", "b");
  e.prompt_sha256 = sha256_hex("other");
  EXPECT_THROW(Exchange::from_json_line(e.to_json_line()), std::invalid_argument);
  EXPECT_THROW(Exchange::from_json_line("{not json"), std::invalid_argument);
  EXPECT_THROW(Exchange::from_json_line(R"({"prompt":"a"})"), std::invalid_argument);
}

TEST(Replay, HitAndMiss) {
  ReplayClient client(std::vector<Exchange>{Exchange::make("p", "FOL")});
  EXPECT_EQ(std::get<std::string>(client.complete("p")), "FOL");
  auto miss = client.complete("q");
  ASSERT_TRUE(std::holds_alternative<GatewayError>(miss));
  EXPECT_EQ(std::get<GatewayError>(miss).kind, ErrorKind::ReplayMiss);
}

TEST(Replay, DirectoryLoadsAllFilesLastEntryWins) {
  TempDir dir;
  slroute::testing::write_file(dir / "a.jsonl", Exchange::make("p", "old").to_json_line() + "\n");
  slroute::testing::write_file(dir / "b.jsonl", "\n" + Exchange::make("p", "new").to_json_line() +
                                                    "\n" + Exchange::make("q", "x").to_json_line());
  slroute::testing::write_file(dir / "notes.txt", "ignored");
  ReplayClient client(dir.path().string());
  EXPECT_EQ(client.size(), 2u);
  EXPECT_EQ(std::get<std::string>(client.complete("p")), "new");
}

TEST(Replay, MalformedLineNamesFileAndLine) {
  TempDir dir;
  slroute::testing::write_file(dir / "x.jsonl", Exchange::make("p", "a").to_json_line() + "\n{oops\n");
  try {
    ReplayClient client(dir / "x.jsonl");
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("x.jsonl:2"), std::string::npos) << e.what();
  }
}

TEST(Replay, MissingPathThrows) {
  EXPECT_THROW(ReplayClient("/nonexistent/replay/store"), std::runtime_error);
}

TEST(Prompts, SelectionPromptVerbatimAndComplete) {
  auto p = build_selection_prompt(tiger());
  EXPECT_NE(p.find("You are an expert in symbolic logic and reasoning systems."), std::string::npos);
  EXPECT_NE(p.find("select the most appropriate symbolic language"), std::string::npos);
  EXPECT_NE(p.find("The tiger is big. If something is big then it visits the rabbit."),
            std::string::npos);
  EXPECT_NE(p.find("A) True B) False C) Unknown"), std::string::npos);
  EXPECT_EQ(p.find("{context}"), std::string::npos);
  EXPECT_EQ(p.find("{question}"), std::string::npos);
  EXPECT_EQ(p.find("{options}"), std::string::npos);
}

TEST(Prompts, EmptyContextKeepsTemplate) {
  Problem a = tiger();
  a.context.clear();
  auto with = build_selection_prompt(tiger());
  auto without = build_selection_prompt(a);
  EXPECT_NE(without.find("Context: \n"), std::string::npos);
  const std::string ctx = "The tiger is big. If something is big then it visits the rabbit.";
  std::string stripped = with;
  stripped.erase(stripped.find(ctx), ctx.size());
  EXPECT_EQ(stripped, without);
}

TEST(Prompts, ByteStable) {
  EXPECT_EQ(build_selection_prompt(tiger()), build_selection_prompt(tiger()));
  for (SlKind k : kAllSlKinds)
    EXPECT_EQ(build_translation_prompt(tiger(), k), build_translation_prompt(tiger(), k));
}

TEST(Prompts, TranslationPromptsEmbedGrammarAndExamples) {
  auto lp = build_translation_prompt(tiger(), SlKind::LP);
  EXPECT_NE(lp.find(std::string(grammar_summary(SlKind::LP))), std::string::npos);
  EXPECT_NE(lp.find("visits(X, rabbit) :- big(X)."), std::string::npos);
  EXPECT_NE(build_translation_prompt(tiger(), SlKind::FOL).find("~ & | -> <->"), std::string::npos);
  auto sat = build_translation_prompt(tiger(), SlKind::SAT);
  EXPECT_NE(sat.find(std::string(grammar_summary(SlKind::SAT))), std::string::npos);
  for (SlKind k : kAllSlKinds) {
    auto p = build_translation_prompt(tiger(), k);
    EXPECT_NE(p.find("Prompt version: translate-"), std::string::npos);
    EXPECT_EQ(p.find("{grammar}"), std::string::npos);
    EXPECT_NE(p.find(tiger().question), std::string::npos);
  }
}

TEST(Prompts, SubstituteIsSinglePass) {
  EXPECT_EQ(substitute("{a} {b} {c}", {{"a", "{b}"}, {"b", "B"}}), "{b} B {c}");
  EXPECT_EQ(substitute("{unclosed", {{"unclosed", "x"}}), "{unclosed");
  EXPECT_EQ(render_options({"x", "y"}), "A) x B) y");
}

TEST(Config, FromKeyValuesAndValidation) {
  auto cfg = GatewayConfig::from(KeyValues::parse(
      "gateway.model = gpt-4o\ngateway.temperature = 0.2\ngateway.retries = 2\n"
      "gateway.api_key_env = MY_KEY\ngateway.max_in_flight = 3\n"));
  EXPECT_EQ(cfg.model, "gpt-4o");
  EXPECT_DOUBLE_EQ(cfg.temperature, 0.2);
  EXPECT_EQ(cfg.retries, 2);
  EXPECT_EQ(cfg.api_key_env, "MY_KEY");
  EXPECT_EQ(cfg.max_in_flight, 3);
  EXPECT_EQ(GatewayConfig{}.temperature, 0.0);
  EXPECT_EQ(GatewayConfig{}.retries, 0);
  EXPECT_THROW(GatewayConfig::from(KeyValues::parse("gateway.temperature = -0.1")), ConfigError);
  EXPECT_THROW(GatewayConfig::from(KeyValues::parse("gateway.timeout_seconds = 0")), ConfigError);
}

TEST_F(WithKey, LiveSuccessSendsSingleUserMessage) {
  MockCompletionServer server([](const nlohmann::json&) {
    return std::pair{200, MockCompletionServer::completion("Answer: SAT")};
  });
  LiveClient client(local(server));
  auto r = client.complete("hello prompt");
  ASSERT_TRUE(std::holds_alternative<std::string>(r)) << std::get<GatewayError>(r).describe();
  EXPECT_EQ(std::get<std::string>(r), "Answer: SAT");
  auto seen = server.requests();
  ASSERT_EQ(seen.size(), 1u);
  EXPECT_EQ(seen[0].path, "/v1/chat/completions");
  EXPECT_EQ(seen[0].authorization, std::string("Bearer ") + kDummyKey);
  EXPECT_EQ(seen[0].body["model"], "gpt-4");
  EXPECT_EQ(seen[0].body["temperature"], 0.0);
  EXPECT_EQ(seen[0].body["max_tokens"], 1024);
  ASSERT_EQ(seen[0].body["messages"].size(), 1u);
  EXPECT_EQ(seen[0].body["messages"][0]["role"], "user");
  EXPECT_EQ(seen[0].body["messages"][0]["content"], "hello prompt");
}

TEST_F(WithKey, ServerErrorRetriedThenReported) {
  MockCompletionServer server([](const nlohmann::json&) { return std::pair{500, std::string("boom")}; });
  auto cfg = local(server);
  cfg.retries = 2;
  LiveClient client(cfg);
  auto r = client.complete("x");
  ASSERT_TRUE(std::holds_alternative<GatewayError>(r));
  EXPECT_EQ(std::get<GatewayError>(r).kind, ErrorKind::HttpStatus);
  EXPECT_EQ(std::get<GatewayError>(r).http_status, 500);
  EXPECT_EQ(server.requests().size(), 3u);
}

TEST_F(WithKey, ClientErrorNotRetried) {
  MockCompletionServer server([](const nlohmann::json&) { return std::pair{400, std::string("bad")}; });
  auto cfg = local(server);
  cfg.retries = 3;
  LiveClient client(cfg);
  auto r = client.complete("x");
  EXPECT_EQ(std::get<GatewayError>(r).http_status, 400);
  EXPECT_EQ(server.requests().size(), 1u);
}

TEST_F(WithKey, SlowServerTimesOut) {
  MockCompletionServer server([](const nlohmann::json&) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1500));
    return std::pair{200, MockCompletionServer::completion("late")};
  });
  auto cfg = local(server);
  cfg.timeout_seconds = 0.3;
  LiveClient client(cfg);
  auto started = std::chrono::steady_clock::now();
  auto r = client.complete("x");
  auto elapsed = std::chrono::steady_clock::now() - started;
  ASSERT_TRUE(std::holds_alternative<GatewayError>(r));
  EXPECT_EQ(std::get<GatewayError>(r).kind, ErrorKind::Timeout);
  EXPECT_LT(elapsed, std::chrono::milliseconds(1400));
}

TEST_F(WithKey, MalformedBodyIsBadResponse) {
  MockCompletionServer server([](const nlohmann::json&) { return std::pair{200, std::string("{\"choices\":[]}")}; });
  LiveClient client(local(server));
  EXPECT_EQ(std::get<GatewayError>(client.complete("x")).kind, ErrorKind::BadResponse);
}

TEST_F(WithKey, UnreachableEndpointFails) {
  GatewayConfig cfg;
  cfg.base_url = "http://127.0.0.1:1/v1";
  cfg.api_key_env = kKeyEnv;
  cfg.timeout_seconds = 1;
  LiveClient client(cfg);
  auto r = client.complete("x");
  ASSERT_TRUE(std::holds_alternative<GatewayError>(r));
  auto kind = std::get<GatewayError>(r).kind;
  EXPECT_TRUE(kind == ErrorKind::Transport || kind == ErrorKind::Timeout);
}

TEST(Live, MissingKeyNeverContactsServer) {
  ::unsetenv(kKeyEnv);
  MockCompletionServer server([](const nlohmann::json&) {
    return std::pair{200, MockCompletionServer::completion("FOL")};
  });
  LiveClient client(local(server));
  auto r = client.complete("x");
  EXPECT_EQ(std::get<GatewayError>(r).kind, ErrorKind::MissingApiKey);
  EXPECT_TRUE(server.requests().empty());
}

TEST_F(WithKey, InFlightRequestsCapped) {
  MockCompletionServer server([](const nlohmann::json&) {
    std::this_thread::sleep_for(std::chrono::milliseconds(60));
    return std::pair{200, MockCompletionServer::completion("LP")};
  });
  auto cfg = local(server);
  cfg.max_in_flight = 2;
  LiveClient client(cfg);
  std::vector<std::thread> workers;
  for (int i = 0; i < 6; ++i) workers.emplace_back([&] { client.complete("x"); });
  for (auto& w : workers) w.join();
  EXPECT_EQ(server.requests().size(), 6u);
  EXPECT_LE(server.peak_in_flight(), 2);
}

TEST_F(WithKey, RecordingSerializesConcurrentWrites) {
  MockCompletionServer server([](const nlohmann::json& body) {
    return std::pair{200, MockCompletionServer::completion(
                              "echo " + body["messages"][0]["content"].get<std::string>())};
  });
  TempDir dir;
  RecordingClient client(std::make_shared<LiveClient>(local(server)), dir.path().string());
  std::vector<std::thread> workers;
  for (int i = 0; i < 8; ++i)
    workers.emplace_back([&, i] { client.complete("prompt " + std::to_string(i)); });
  for (auto& w : workers) w.join();
  ReplayClient replay(dir / "exchanges.jsonl");
  EXPECT_EQ(replay.size(), 8u);
  EXPECT_EQ(std::get<std::string>(replay.complete("prompt 3")), "echo prompt 3");
}

TEST_F(WithKey, KeyNeverLeaksIntoErrorsOrRecordings) {
  // A hostile endpoint echoes the Authorization header back in its errors.
  MockCompletionServer server([](const nlohmann::json& body) {
    const std::string content = body["messages"][0]["content"];
    if (content == "fail") return std::pair{503, std::string("auth was Bearer ") + kDummyKey};
    return std::pair{200, MockCompletionServer::completion("ok")};
  });
  TempDir dir;
  RecordingClient client(std::make_shared<LiveClient>(local(server)), dir.path().string());
  auto bad = client.complete("fail");
  ASSERT_TRUE(std::holds_alternative<GatewayError>(bad));
  EXPECT_EQ(std::get<GatewayError>(bad).describe().find(kDummyKey), std::string::npos);
  ASSERT_TRUE(std::holds_alternative<std::string>(client.complete("fine")));
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir.path()))
    if (entry.is_regular_file())
      EXPECT_EQ(slroute::testing::read_file(entry.path()).find(kDummyKey), std::string::npos);
}

TEST(Fixtures, CommittedStoresCarryNoCredentials) {
  for (const auto& entry : std::filesystem::recursive_directory_iterator(SLROUTE_FIXTURES)) {
    if (!entry.is_regular_file()) continue;
    std::string text = slroute::testing::read_file(entry.path());
    EXPECT_EQ(text.find(kDummyKey), std::string::npos) << entry.path();
    EXPECT_EQ(text.find("Bearer "), std::string::npos) << entry.path();
    EXPECT_EQ(text.find("sk-"), std::string::npos) << entry.path();
  }
}

}  // namespace
}  // namespace slroute::gateway
