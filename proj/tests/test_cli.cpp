#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <gdeconv/graphs.hpp>
#include <gdeconv/serialization.hpp>
#include <gdeconv_cli/cli.hpp>

#include "fixtures.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun gd(std::vector<std::string> args) {
  args.insert(args.begin(), "gdeconv");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = gdeconv::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path workdir() {
  static const fs::path dir = [] {
    const std::string name = ::testing::UnitTest::GetInstance()->current_test_info()->name();
    const fs::path d = fs::temp_directory_path() / ("gdeconv_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string p(const std::string& name) { return (workdir() / name).string(); }

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(gd({"--help"}).code, gdeconv::cli::kExitOk);
  EXPECT_EQ(gd({}).code, gdeconv::cli::kExitUsage);
  EXPECT_EQ(gd({"frobnicate"}).code, gdeconv::cli::kExitUsage);
  EXPECT_EQ(gd({"simulate"}).code, gdeconv::cli::kExitUsage);  // missing --out
  EXPECT_EQ(gd({"solve", "--bundle", p("absent.json")}).code, gdeconv::cli::kExitUsage);
  EXPECT_EQ(gd({"grid", "--n", "10", "--axis1", "Q=1", "--out", p("q.csv")}).code, gdeconv::cli::kExitUsage);
}

TEST(Cli, GenGraph) {
  const CliRun r = gd({"gen-graph", "--n", "20", "--p", "0.3", "--seed", "4", "--connected", "--out", p("g.txt")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("n=20"), std::string::npos);
  EXPECT_NE(r.out.find("connected=true"), std::string::npos);
  EXPECT_TRUE(gdeconv::is_connected(gdeconv::load_edge_list(p("g.txt"))));
}

TEST(Cli, SimulateSolveCertify) {
  CliRun r = gd({"simulate", "--n", "30", "--s", "10", "--P", "10", "--seed", "3", "--out", p("b.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  r = gd({"solve", "--bundle", p("b.json"), "--out", p("res.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("e_X=", 0), 0u);
  const json res = json::parse(slurp(p("res.json")));
  EXPECT_LT(res.at("e_X").get<double>(), 0.01);
  EXPECT_EQ(res.at("h_hat").size(), 5u);

  r = gd({"certify", "--bundle", p("b.json"), "--out", p("cert.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("C1="), std::string::npos);
  EXPECT_TRUE(json::parse(slurp(p("cert.json"))).contains("c2_margin"));
}

TEST(Cli, IdentityFilterIsExact) {
  ASSERT_EQ(gd({"simulate", "--n", "20", "--alpha", "0", "--s", "8", "--P", "6", "--out", p("a0.json")}).code, 0);
  const CliRun r = gd({"solve", "--bundle", p("a0.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("e_X=0.000000", 0), 0u) << r.out;
}

TEST(Cli, BundleProblems) {
  ASSERT_EQ(gd({"simulate", "--n", "12", "--s", "4", "--P", "3", "--out", p("c.json")}).code, 0);
  json doc = json::parse(slurp(p("c.json")));
  doc["support"] = json::array({"a"});
  std::ofstream(p("bad_support.json")) << doc.dump();
  EXPECT_EQ(gd({"certify", "--bundle", p("bad_support.json")}).code, gdeconv::cli::kExitUsage);

  doc = json::parse(slurp(p("c.json")));
  doc.erase("truth");
  doc.erase("support");
  std::ofstream(p("no_truth.json")) << doc.dump();
  EXPECT_EQ(gd({"certify", "--bundle", p("no_truth.json")}).code, gdeconv::cli::kExitUsage);
  const CliRun r = gd({"solve", "--bundle", p("no_truth.json")});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("e_X=n/a", 0), 0u);
}

TEST(Cli, Ambiguity) {
  {
    std::ofstream out(p("path3.txt"));
    gdeconv::write_edge_list(fixtures::path3(), out);
  }
  const CliRun r = gd({"ambiguity", "--graph", p("path3.txt"), "--shift", "adjacency", "--out", p("amb.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ambiguous=true pairs=1"), std::string::npos);
  EXPECT_NE(r.out.find("pair (0,2)"), std::string::npos);
  EXPECT_EQ(gd({"ambiguity"}).code, gdeconv::cli::kExitUsage);
}

TEST(Cli, GridDeterministicAndReplay) {
  const std::vector<std::string> base{"grid", "--n", "20", "--axis1", "S=4,8", "--axis2", "P=2:4:2",
                                      "--trials", "3", "--seed", "11"};
  auto with = [&](std::vector<std::string> extra) {
    std::vector<std::string> a = base;
    a.insert(a.end(), extra.begin(), extra.end());
    return gd(a);
  };
  ASSERT_EQ(with({"--workers", "1", "--out", p("g1.csv")}).code, 0);
  ASSERT_EQ(with({"--workers", "8", "--out", p("g8.csv")}).code, 0);
  EXPECT_EQ(slurp(p("g1.csv")), slurp(p("g8.csv")));
  EXPECT_EQ(slurp(p("g1.csv")).rfind("S,P,success_rate", 0), 0u);
  EXPECT_TRUE(fs::exists(p("g1.json")));

  const CliRun r = gd({"replay", "--grid-result", p("g1.json"), "--cell", "S=8,P=4", "--trial", "2", "--bundle-out",
                    p("replay.json")});
  ASSERT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_NE(r.out.find("match=true"), std::string::npos);
  EXPECT_NO_THROW(gdeconv::bundle_from_json(slurp(p("replay.json"))));
  EXPECT_EQ(gd({"replay", "--grid-result", p("g1.json"), "--cell", "S=9,P=4", "--trial", "0"}).code,
            gdeconv::cli::kExitUsage);
  EXPECT_EQ(gd({"replay", "--grid-result", p("g1.json"), "--cell", "S=8,P=4", "--trial", "3"}).code,
            gdeconv::cli::kExitUsage);
}

TEST(Cli, ExecutableExitCodes) {
  const std::string exe = GDECONV_EXE;
  auto status = [](const std::string& cmd) {
    const int s = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status(exe + " --help"), 0);
  EXPECT_EQ(status(exe + " simulate --n 10"), 2);
  EXPECT_EQ(status(exe + " gen-graph --n 10 --out " + p("exe_g.txt")), 0);
}
