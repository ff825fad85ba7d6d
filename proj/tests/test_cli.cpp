#include <csignal>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include "specforge/cli.hpp"
#include "support.hpp"

using namespace specforge;
namespace fs = std::filesystem;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string corpus(const char* rel) { return (support::corpus_dir() / rel).string(); }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), {}};
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) { ::setenv(name, value, 1); }
  ~ScopedEnv() { ::unsetenv(name_); }

 private:
  const char* name_;
};

// The trailing comment sits before a keyword, where the printer has no place for it.
const char* kCommented =
    "// counter\n"
    "machine M\nvariables\n  x : 0..2 // trailing\ninvariants\n  i: x <= 2\ninit\n  a: x := 0\nevents\n"
    "  event inc\n    where\n      g: x < 2\n    then\n      a: x := x + 1\n  end\nend\n";

}  // namespace

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(cli({"--help"}).code, exit_code::ok);
  EXPECT_EQ(cli({}).code, exit_code::usage);
  EXPECT_EQ(cli({"frobnicate"}).code, exit_code::usage);
  EXPECT_EQ(cli({"check"}).code, exit_code::usage);
  EXPECT_EQ(cli({"check", corpus("hd/r1.ebs"), "--max-states", "many"}).code, exit_code::usage);
}

TEST(Cli, CheckProvedRefinement) {
  CliResult r = cli({"check", corpus("hd/r2.ebs"), "--refines", corpus("hd/r1.ebs")});
  EXPECT_EQ(r.code, exit_code::ok) << r.out << r.err;
  EXPECT_NE(r.out.find("machine R2 refines R1"), std::string::npos);
  EXPECT_EQ(r.out.find("violated"), std::string::npos);
}

TEST(Cli, CheckViolationPrintsTrace) {
  CliResult r = cli({"check", corpus("mutants/mut_tick.ebs")});
  EXPECT_EQ(r.code, exit_code::violated);
  EXPECT_NE(r.out.find("inv1"), std::string::npos);
  EXPECT_NE(r.out.find("violated (depth 62)"), std::string::npos);
  EXPECT_NE(r.out.find("0: INITIALISATION"), std::string::npos);
  EXPECT_NE(r.out.find("dialyserDisconnectionClock"), std::string::npos);
}

TEST(Cli, CheckOnlySelectsKinds) {
  CliResult r = cli({"check", corpus("mutants/mut_tick.ebs"), "--only", "DLK"});
  EXPECT_EQ(r.code, exit_code::ok) << r.out << r.err;
  EXPECT_EQ(r.out.find("INV "), std::string::npos);
  EXPECT_NE(r.out.find("DLK"), std::string::npos);
}

TEST(Cli, CheckJson) {
  CliResult r = cli({"check", corpus("mutants/mut_sim.ebs"), "--json"});
  EXPECT_EQ(r.code, exit_code::violated);
  nlohmann::json j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["machine"], "MUT_SIM");
  bool found = false;
  for (const auto& o : j["obligations"]) {
    if (o["kind"] == "SIM_REF" && o["subject"] == "disconnectDialyserPreparation") {
      found = true;
      EXPECT_EQ(o["verdict"], "violated");
      EXPECT_TRUE(o.contains("trace"));
    }
  }
  EXPECT_TRUE(found);
}

TEST(Cli, CheckGluingUnderspecified) {
  CliResult r = cli({"check", corpus("mutants/mut_glue.ebs")});
  EXPECT_EQ(r.code, exit_code::violated);
  EXPECT_NE(r.err.find("GluingUnderspecified"), std::string::npos) << r.err;
}

TEST(Cli, CheckStateLimit) {
  {
    ScopedEnv env("SPECFORGE_MAX_STATES", "10");
    CliResult r = cli({"check", corpus("hd/r2.ebs")});
    EXPECT_EQ(r.code, exit_code::bound_exhausted);
    EXPECT_NE(r.out.find("bound-exhausted"), std::string::npos);
  }
  {
    ScopedEnv env("SPECFORGE_MAX_STATES", "ten");
    EXPECT_EQ(cli({"check", corpus("hd/r2.ebs")}).code, exit_code::usage);
  }
  EXPECT_EQ(cli({"check", corpus("hd/r2.ebs"), "--max-states", "10"}).code, exit_code::bound_exhausted);
}

TEST(Cli, CheckMissingAndBadModels) {
  support::TempDir dir;
  EXPECT_EQ(cli({"check", (dir.path() / "missing.ebs").string()}).code, exit_code::io);
  std::ofstream(dir.path() / "bad.ebs") << "machine M variables x : 0..3 init a: x := end";
  CliResult r = cli({"check", (dir.path() / "bad.ebs").string()});
  EXPECT_EQ(r.code, exit_code::bad_model);
  EXPECT_NE(r.err.find("bad.ebs:"), std::string::npos) << r.err;
  std::ofstream(dir.path() / "typed.ebs") << "machine M variables x : 0..3 init a: x := TRUE end";
  EXPECT_EQ(cli({"check", (dir.path() / "typed.ebs").string()}).code, exit_code::bad_model);
}

TEST(Cli, GenerateWritesC) {
  support::TempDir dir;
  const fs::path out = dir.path() / "r2det.c";
  CliResult r = cli({"generate", corpus("hd/r2det.ebs"), "-o", out.string()});
  ASSERT_EQ(r.code, exit_code::ok) << r.out << r.err;
  EXPECT_NE(r.out.find("wrote"), std::string::npos);
  const std::string c = slurp(out);
  EXPECT_NE(c.find("int main"), std::string::npos);
  EXPECT_NE(c.find("guard_heatUp"), std::string::npos);
}

TEST(Cli, GenerateRejectsOutsideSubset) {
  support::TempDir dir;
  const fs::path out = dir.path() / "r2.c";
  CliResult r = cli({"generate", corpus("hd/r2.ebs"), "-o", out.string()});
  EXPECT_EQ(r.code, exit_code::violated);
  EXPECT_NE(r.out.find("parameters not in subset"), std::string::npos) << r.out;
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, GenerateUnwritableOutput) {
  support::TempDir dir;
  // A directory in place of the output file cannot be opened even as root.
  EXPECT_EQ(cli({"generate", corpus("hd/r2det.ebs"), "-o", dir.path().string()}).code, exit_code::cannot_create);
  EXPECT_EQ(cli({"generate", corpus("hd/r2det.ebs"), "-o", (dir.path() / "no/such/dir/x.c").string()}).code,
            exit_code::cannot_create);
}

TEST(Cli, ScenarioPassAndFail) {
  CliResult ok = cli({"scenario", corpus("hd/r2.ebs"), corpus("scenarios/over-temp-preparation.scn"),
                      corpus("scenarios/over-temp-therapy.scn")});
  EXPECT_EQ(ok.code, exit_code::ok) << ok.out << ok.err;
  EXPECT_NE(ok.out.find("PASS over-temp-preparation"), std::string::npos) << ok.out;
  EXPECT_NE(ok.out.find("PASS over-temp-therapy"), std::string::npos) << ok.out;

  CliResult bad = cli({"scenario", corpus("hd/r2.ebs"), corpus("scenarios/wrong-alarm.scn")});
  EXPECT_EQ(bad.code, exit_code::violated);
  EXPECT_NE(bad.out.find("FAIL wrong-alarm at step 4"), std::string::npos) << bad.out;

  EXPECT_EQ(cli({"scenario", corpus("hd/r2.ebs"), "/nonexistent.scn"}).code, exit_code::io);
}

TEST(Cli, FmtKeepsCommentsUnlessAsked) {
  support::TempDir dir;
  const fs::path f = dir.path() / "m.ebs";
  std::ofstream(f) << kCommented;

  CliResult printed = cli({"fmt", f.string(), "--stdout"});
  EXPECT_EQ(printed.code, exit_code::ok);
  EXPECT_NE(printed.out.find("machine M"), std::string::npos);

  EXPECT_EQ(cli({"fmt", f.string()}).code, exit_code::violated);
  EXPECT_EQ(slurp(f), kCommented);

  EXPECT_EQ(cli({"fmt", f.string(), "--drop-comments"}).code, exit_code::ok);
  EXPECT_EQ(slurp(f), printed.out);
  EXPECT_NE(printed.out.find("// counter"), std::string::npos);
  EXPECT_EQ(cli({"fmt", f.string(), "--check"}).code, exit_code::ok);

  std::ofstream(f) << "// kept\nmachine M variables x : 0..2 init a: x := 0 end";
  EXPECT_EQ(cli({"fmt", f.string(), "--check"}).code, exit_code::violated);
  EXPECT_EQ(cli({"fmt", f.string()}).code, exit_code::ok);
  EXPECT_EQ(slurp(f).rfind("// kept\nmachine M\n", 0), 0u);
}

TEST(Cli, ServeBadModel) {
  support::TempDir dir;
  std::ofstream(dir.path() / "bad.ebs") << "machine";
  EXPECT_EQ(cli({"serve", (dir.path() / "bad.ebs").string(), "--port", "0"}).code, exit_code::bad_model);
  EXPECT_EQ(cli({"serve", (dir.path() / "missing.ebs").string()}).code, exit_code::io);
}

TEST(Cli, ServePortInUse) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  ASSERT_GE(fd, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ASSERT_EQ(::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr), 0);
  ASSERT_EQ(::listen(fd, 1), 0);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  const int port = ntohs(addr.sin_port);
  CliResult r =
      cli({"serve", corpus("hd/r2.ebs"), "--host", "127.0.0.1", "--port", std::to_string(port)});
  ::close(fd);
  EXPECT_EQ(r.code, exit_code::port_in_use) << r.err;
}

TEST(Cli, ServeAnswersOverHttp) {
  int pipefd[2];
  ASSERT_EQ(::pipe(pipefd), 0);
  const std::string exe = SPECFORGE_EXE;
  const std::string model = corpus("hd/r2.ebs");
  const pid_t pid = ::fork();
  ASSERT_GE(pid, 0);
  if (pid == 0) {
    ::dup2(pipefd[1], STDOUT_FILENO);
    ::close(pipefd[0]);
    ::close(pipefd[1]);
    ::execl(exe.c_str(), exe.c_str(), "serve", model.c_str(), "--host", "127.0.0.1", "--port", "0",
            static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(pipefd[1]);
  std::string line;
  char ch;
  while (::read(pipefd[0], &ch, 1) == 1 && ch != '\n') line += ch;
  ::close(pipefd[0]);

  const std::string prefix = "specforge animator for R2 at http://127.0.0.1:";
  ASSERT_EQ(line.rfind(prefix, 0), 0u) << line;
  const int port = std::stoi(line.substr(prefix.size()));
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/api/state");
  ::kill(pid, SIGTERM);
  int status = 0;
  ::waitpid(pid, &status, 0);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  nlohmann::json j = nlohmann::json::parse(res->body);
  EXPECT_EQ(j.dump().find("softwareMode") != std::string::npos, true) << res->body;
}
