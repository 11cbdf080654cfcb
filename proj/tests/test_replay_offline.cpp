// Replay mode must never touch the network. The executable defines socket()
// and connect() itself, so every call made by the process (including ones
// inside the HTTP client) lands here first and is counted before forwarding.

#include <dlfcn.h>
#include <sys/socket.h>

#include <atomic>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "support/temp_dir.hpp"

namespace {
std::atomic<int> g_sockets{0};
std::atomic<int> g_connects{0};
}  // namespace

extern "C" int socket(int domain, int type, int protocol) {
  using Fn = int (*)(int, int, int);
  static Fn next = reinterpret_cast<Fn>(::dlsym(RTLD_NEXT, "socket"));
  ++g_sockets;
  return next(domain, type, protocol);
}

extern "C" int connect(int fd, const struct sockaddr* addr, socklen_t len) {
  using Fn = int (*)(int, const struct sockaddr*, socklen_t);
  static Fn next = reinterpret_cast<Fn>(::dlsym(RTLD_NEXT, "connect"));
  ++g_connects;
  return next(fd, addr, len);
}

namespace slroute::cli {
namespace {

const std::string kFixtures = SLROUTE_FIXTURES;

int cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  return run(args, out, err);
}

TEST(ReplayOffline, InterpositionIsActive) {
  const int before = g_sockets.load();
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  ASSERT_GE(fd, 0);
  ::close(fd);
  EXPECT_EQ(g_sockets.load(), before + 1);
}

TEST(ReplayOffline, EvalAndSolveOpenNoSockets) {
  const int sockets = g_sockets.load();
  const int connects = g_connects.load();
  testing::TempDir dir;
  EXPECT_EQ(cli({"eval", "--strategies", "fixed-lp,fixed-fol,fixed-sat,random,adaptive", "--replay",
                 kFixtures + "/corpus30/replay", "--output", dir.path().string(),
                 kFixtures + "/corpus30/dataset.jsonl"}),
            kExitOk);
  for (const char* s : {"fixed-lp", "fixed-fol", "fixed-sat", "random", "adaptive"})
    EXPECT_EQ(cli({"solve", "--strategy", s, "--replay", kFixtures + "/tiger/replay",
                   kFixtures + "/tiger/problem.json"}),
              kExitOk)
        << s;
  EXPECT_EQ(cli({"translate", "--sl", "lp", "--replay", kFixtures + "/tiger/replay",
                 kFixtures + "/tiger/problem.json"}),
            kExitOk);
  EXPECT_EQ(g_sockets.load(), sockets);
  EXPECT_EQ(g_connects.load(), connects);
}

TEST(ReplayOffline, ReplayMissStaysOffline) {
  const int sockets = g_sockets.load();
  testing::TempDir dir;
  testing::write_file(dir / "empty.jsonl", "");
  EXPECT_EQ(cli({"solve", "--strategy", "adaptive", "--replay", dir / "empty.jsonl",
                 kFixtures + "/tiger/problem.json"}),
            kExitNotExecuted);
  EXPECT_EQ(g_sockets.load(), sockets);
}

}  // namespace
}  // namespace slroute::cli
