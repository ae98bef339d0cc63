#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <json.hpp>

#include "stellar/io.hpp"
#include "stellar/stellar.hpp"

using nlohmann::json;
using namespace stellar;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p)
{
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
protected:
  fs::path dir;

  void SetUp() override
  {
    dir = fs::temp_directory_path() /
          ("stellar_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  fs::path write(const std::string& name, const std::string& content)
  {
    const fs::path p = dir / name;
    std::ofstream(p) << content;
    return p;
  }

  RunResult run(const std::string& args)
  {
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string(STELLAR_ZEROS_BIN) + " " + args + " 2>" + err.string();
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int st = pclose(pipe);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    r.err = slurp(err);
    return r;
  }

  fs::path fock_descriptor(std::size_t n)
  {
    json core = json::array();
    for (std::size_t k = 0; k <= n; ++k) core.push_back(json::array({k == n ? 1.0 : 0.0, 0.0}));
    return write("fock" + std::to_string(n) + ".json", json{{"rank", n}, {"core", core}}.dump());
  }
};

std::vector<std::string> lines(const std::string& s)
{
  std::vector<std::string> out;
  std::istringstream is(s);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

} // namespace

TEST_F(Cli, ZerosOfFockTwo)
{
  const RunResult r = run("zeros --state " + fock_descriptor(2).string());
  ASSERT_EQ(r.status, 0) << r.err;
  const json j = json::parse(r.out);
  ASSERT_EQ(j["zeros"].size(), 2u);
  std::vector<double> re;
  for (const json& z : j["zeros"]) {
    re.push_back(z[0].get<double>());
    EXPECT_LT(std::abs(z[1].get<double>()), 1e-14);
  }
  std::sort(re.begin(), re.end());
  EXPECT_NEAR(re[0], -0.7071067811865476, 1e-15);
  EXPECT_NEAR(re[1], 0.7071067811865476, 1e-15);
}

TEST_F(Cli, EvolveRankZeroIsHeaderOnly)
{
  const RunResult r = run("evolve --random 0,3 --hamiltonian 0.5,0.5,0,0,0,0.5");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_EQ(r.out, "t,k,re,im,method\n");
}

TEST_F(Cli, EvolveBothMethods)
{
  const RunResult r = run("evolve --random 2,5 --time 0,1,5");
  ASSERT_EQ(r.status, 0) << r.err;
  const std::vector<std::string> ls = lines(r.out);
  ASSERT_EQ(ls.size(), 1u + 2 * 2 * 5);
  EXPECT_EQ(ls[0], "t,k,re,im,method");
  int ode = 0, closed = 0;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    if (ls[i].ends_with(",ode")) ++ode;
    if (ls[i].ends_with(",closed")) ++closed;
  }
  EXPECT_EQ(ode, 10);
  EXPECT_EQ(closed, 10);
}

TEST_F(Cli, AuditRankOne)
{
  const fs::path st = write("r1.json", R"({"g2":[-0.5,0],"g1":[0,0],"g0":[-0.28618247146235,0],"zeros":[[0,1]],"leading":[1,0]})");
  const RunResult r = run("audit --state " + st.string());
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("events=2"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("verdict=GuaranteedAndObserved"), std::string::npos) << r.out;
}

TEST_F(Cli, CrossingsJsonLines)
{
  const fs::path st = write("r1.json", R"({"g2":[-0.5,0],"g1":[0,0],"g0":[-0.28618247146235,0],"zeros":[[0,1]],"leading":[1,0]})");
  const RunResult r = run("crossings --state " + st.string());
  ASSERT_EQ(r.status, 0) << r.err;
  const std::vector<std::string> ls = lines(r.out);
  ASSERT_EQ(ls.size(), 2u);
  for (const std::string& l : ls) {
    const json j = json::parse(l);
    EXPECT_EQ(j["k"], 0);
    EXPECT_EQ(j["flag"], "crossing");
    EXPECT_NEAR(std::abs(j["x"].get<double>()), 1.0, 1e-9);
  }
}

TEST_F(Cli, BuildRoundTrip)
{
  const fs::path out = dir / "form.json";
  ASSERT_EQ(run("build --random 3,9 --out " + out.string()).status, 0);
  const WavefunctionForm direct = build_wavefunction(random_stellar_state(3, 9, 0.2));
  const RunResult r = run("zeros --state " + out.string());
  ASSERT_EQ(r.status, 0) << r.err;
  std::vector<cplx> z;
  const json parsed = json::parse(r.out);
  for (const json& p : parsed["zeros"]) z.emplace_back(p[0].get<double>(), p[1].get<double>());
  EXPECT_LT(matching_distance(z, direct.zeros), 1e-12);
  EXPECT_FALSE(fs::exists(dir / "form.json.tmp"));
}

TEST_F(Cli, Deterministic)
{
  const fs::path a = dir / "a.csv", b = dir / "b.csv";
  ASSERT_EQ(run("evolve --random 3,2 --time 0,2,9 --out " + a.string()).status, 0);
  ASSERT_EQ(run("evolve --random 3,2 --time 0,2,9 --out " + b.string()).status, 0);
  EXPECT_EQ(slurp(a), slurp(b));
}

TEST_F(Cli, NumbersRoundTrip)
{
  const RunResult r = run("build --random 2,1");
  ASSERT_EQ(r.status, 0);
  const WavefunctionForm direct = build_wavefunction(random_stellar_state(2, 1, 0.2));
  const WavefunctionForm parsed = io::form_from_json(json::parse(r.out));
  EXPECT_EQ(parsed.g2, direct.g2);
  EXPECT_EQ(parsed.g1, direct.g1);
  EXPECT_EQ(parsed.zeros, direct.zeros);
}

TEST_F(Cli, ConfigFileWithFlagPrecedence)
{
  const fs::path cfg = write("cfg.json", R"({"random":"2,4","time":"0,1,3","method":"ode"})");
  const RunResult from_file = run("evolve --config " + cfg.string());
  ASSERT_EQ(from_file.status, 0) << from_file.err;
  EXPECT_EQ(lines(from_file.out).size(), 1u + 2 * 3);
  const RunResult flag_wins = run("evolve --config " + cfg.string() + " --method closed");
  ASSERT_EQ(flag_wins.status, 0) << flag_wins.err;
  EXPECT_NE(flag_wins.out.find(",closed"), std::string::npos);
  EXPECT_EQ(flag_wins.out.find(",ode"), std::string::npos);
}

TEST_F(Cli, VerifyPasses)
{
  const RunResult r = run("verify --random 2,7 --hamiltonian 0.5,0.5,0,0,0,0");
  ASSERT_EQ(r.status, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_LE(j["oracle_vs_closed_max"].get<double>(), 1e-4);
}

TEST_F(Cli, InputErrorsExitOne)
{
  for (const std::string& args :
       {std::string("zeros"), std::string("zeros --state ") + (dir / "missing.json").string(),
        std::string("evolve --random 1,1 --hamiltonian 1,2,3"), std::string("evolve --random 1,1 --time 0,1,1"),
        std::string("evolve --random 1,1 --method sideways"), std::string("zeros --random x,1"),
        std::string("verify --random 1,1 --tol -1"), std::string("frobnicate")}) {
    const RunResult r = run(args);
    EXPECT_EQ(r.status, 1) << args;
    EXPECT_EQ(lines(r.err).size(), 1u) << args << ": " << r.err;
    EXPECT_EQ(r.err.rfind("error: ", 0), 0u) << r.err;
  }
  const RunResult bad = run("zeros --state " + write("bad.json", "{not json").string());
  EXPECT_EQ(bad.status, 1);
  const RunResult unnormalized = run("zeros --state " + write("u.json", R"({"rank":1,"core":[[1,0],[1,0]]})").string());
  EXPECT_EQ(unnormalized.status, 1);
}

TEST_F(Cli, ContractViolationExitsTwo)
{
  const RunResult r = run("verify --random 2,7 --tol 1e-300");
  EXPECT_EQ(r.status, 2);
  EXPECT_EQ(lines(r.err).size(), 1u);
}
