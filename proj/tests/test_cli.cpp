#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "cli.hpp"
#include "mpst/projection.hpp"
#include "mpst/properties.hpp"
#include "mpst/typecheck.hpp"

using json = nlohmann::json;

namespace {

const std::string kData = MPST_TEST_DATA;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result mpst_run(std::vector<std::string> args) {
  args.insert(args.begin(), "mpst");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = mpst::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string data(const char* name) { return kData + "/" + name; }

}  // namespace

TEST(Cli, ProjectPrintsTheLocalType) {
  auto r = mpst_run({"project", data("gex.gt"), "--role", "r"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "q & { l2(int). end }\n");
}

TEST(Cli, ProjectAllRoles) {
  auto r = mpst_run({"project", data("gex.gt")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("p : rec X . q (+) { l0(int). X, l1(int). end }\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("r : q & { l2(int). end }\n"), std::string::npos);
}

TEST(Cli, LiveRefutesTheRunningExampleWithALasso) {
  auto r = mpst_run({"live", data("gamma_ex.env")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("not live"), std::string::npos);
  EXPECT_NE(r.out.find("cycle:"), std::string::npos);
  EXPECT_NE(r.out.find("--(p,q)l0-->"), std::string::npos);

  auto j = json::parse(mpst_run({"live", data("gamma_ex.env"), "--json"}).out);
  EXPECT_EQ(j["verdict"]["live"], false);
  EXPECT_EQ(j["counterexample"]["fair"], true);
  EXPECT_EQ(j["counterexample"]["live"], false);
  ASSERT_EQ(j["counterexample"]["cycle"].size(), 1u);
  EXPECT_EQ(j["counterexample"]["cycle"][0]["label"], "(p,q)l0");
  EXPECT_EQ(j["stats"]["states"], 3);
}

TEST(Cli, AssocOnTheRelaxedLabelPair) {
  EXPECT_EQ(mpst_run({"assoc", data("remark.env"), data("remark.gt")}).code, 0);
  // The running example is associated only once the balance check is off.
  EXPECT_EQ(mpst_run({"assoc", data("gamma_ex.env"), data("gex.gt")}).code, 1);
  EXPECT_EQ(mpst_run({"assoc", data("gamma_ex.env"), data("gex.gt"), "--no-balance-check"}).code, 0);
  auto j = json::parse(mpst_run({"assoc", data("remark.env"), data("remark.gt"), "--json"}).out);
  EXPECT_EQ(j["verdict"]["associated"], true);
  EXPECT_EQ(j["verdict"]["entries"]["p"]["projection"], "q (+) { l0(int). end, l1(int). end }");
  EXPECT_EQ(j["verdict"]["entries"]["p"]["actual"], "q (+) { l0(int). end }");
}

TEST(Cli, SafetyAndSubtype) {
  auto r = mpst_run({"safety", data("unsafe.env")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("unsafe"), std::string::npos);
  EXPECT_EQ(mpst_run({"safety", data("gamma_ex.env")}).code, 0);

  EXPECT_EQ(mpst_run({"subtype", data("send_nat.lt"), data("send_int.lt")}).code, 0);
  auto j = json::parse(mpst_run({"subtype", data("send_int.lt"), data("send_nat.lt"), "--json"}).out);
  EXPECT_EQ(j["exit_code"], 1);
  EXPECT_EQ(j["verdict"]["result"], false);
  EXPECT_EQ(j["counterexample"]["sub"], "q (+) { l0(int). end, l1(bool). end }");
}

TEST(Cli, SessionCommands) {
  EXPECT_EQ(mpst_run({"dlock", data("stuck.sn")}).code, 1);
  EXPECT_EQ(mpst_run({"dlock", data("ex.sn")}).code, 0);
  EXPECT_EQ(mpst_run({"slive", data("stuck.sn"), "--depth", "8"}).code, 1);
  EXPECT_EQ(mpst_run({"slive", data("ex.sn"), "--depth", "16"}).code, 0);
  EXPECT_EQ(mpst_run({"typecheck", data("ex.sn"), "--env", data("gamma_ex.env"), "--global", data("ex.gt"),
                      "--no-balance-check"})
                .code,
            0);
  auto r = mpst_run({"typecheck", data("badsort.sn"), "--env", data("gamma_ex.env")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("badsort.sn:1:6: SortMismatch"), std::string::npos) << r.out;

  auto s = mpst_run({"simulate", data("ex.sn"), "--steps", "10"});
  EXPECT_EQ(s.code, 0);
  EXPECT_EQ(s.out,
            "   0  (p,q)l0\n   1  (p,q)l1\n   2  (q,r)l2\nend: Terminated\n  p <| 0 || q <| 0 || r <| 0\n");
  EXPECT_EQ(mpst_run({"simulate", data("stuck.sn")}).code, 1);
  EXPECT_EQ(mpst_run({"simulate", data("gamma_ex.env"), "--policy", "first", "--steps", "5"}).code, 0);
  EXPECT_EQ(mpst_run({"simulate", data("gex.gt"), "--policy", "random", "--seed", "3"}).code, 0);
}

TEST(Cli, ExitCodesForBadInputAndBudgets) {
  EXPECT_EQ(mpst_run({}).code, 2);
  EXPECT_EQ(mpst_run({"bogus"}).code, 2);
  EXPECT_EQ(mpst_run({"live", data("missing.env")}).code, 2);
  EXPECT_EQ(mpst_run({"live", data("gex.gt")}).code, 2);  // not an environment
  EXPECT_EQ(mpst_run({"live", data("gamma_ex.env"), "--max-states", "2"}).code, 3);
  EXPECT_EQ(mpst_run({"slive", data("ex.sn"), "--depth", "16", "--max-states", "2"}).code, 3);
  EXPECT_EQ(mpst_run({"--help"}).code, 0);
  auto j = json::parse(mpst_run({"live", data("gamma_ex.env"), "--max-states", "2", "--json"}).out);
  EXPECT_EQ(j["error"]["code"], "StateBudgetExceeded");
}

TEST(Cli, EmitDotHighlightsTheCycle) {
  auto r = mpst_run({"live", data("gamma_ex.env"), "--emit", "dot"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.out.rfind("digraph env {", 0), 0u);
  EXPECT_NE(r.out.find("s0 -> s0 [label=\"(p,q)l0\", color=red"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("s0 -> s1 [label=\"(p,q)l1\"];"), std::string::npos);
}

TEST(Cli, ReportsAreDeterministic) {
  for (std::vector<std::string> args : {std::vector<std::string>{"live", data("gamma_ex.env"), "--json"},
                                        {"assoc", data("remark.env"), data("remark.gt"), "--json"},
                                        {"selftest", "--json"}}) {
    auto a = mpst_run(args), b = mpst_run(args);
    EXPECT_EQ(a.out, b.out);
    auto j = json::parse(a.out);
    EXPECT_EQ(j["schema_version"], mpst::cli::kSchemaVersion);
    EXPECT_EQ(j["tool_version"], mpst::cli::kToolVersion);
    EXPECT_EQ(j.dump(2) + "\n", a.out);  // keys already sorted
  }
  auto j = json::parse(mpst_run({"live", data("gamma_ex.env"), "--json"}).out);
  std::ifstream in(data("gamma_ex.env"), std::ios::binary);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(mpst::cli::fnv1a(bytes)));
  EXPECT_EQ(j["inputs"][0]["fnv1a"], buf);
}

TEST(Cli, Fnv1aReferenceValues) {
  EXPECT_EQ(mpst::cli::fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(mpst::cli::fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(mpst::cli::fnv1a("foobar"), 0x85944171f73967e8ULL);
}

TEST(Cli, Selftest) {
  auto r = mpst_run({"selftest"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST(Cli, GenWritesFilesThatCheck) {
  auto dir = std::filesystem::temp_directory_path() / "mpst_cli_gen";
  std::filesystem::remove_all(dir);
  auto r = mpst_run({"gen", "--seed", "11", "--count", "4", "--out", dir.string(), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto again = mpst_run({"gen", "--seed", "11", "--count", "4", "--out", dir.string(), "--json"});
  EXPECT_EQ(r.out, again.out);
  auto j = json::parse(r.out);
  ASSERT_EQ(j["verdict"]["protocols"].size(), 4u);
  for (const auto& p : j["verdict"]["protocols"]) {
    std::string gt = p["global"], env = p["env"], sn = p["session"];
    EXPECT_EQ(mpst_run({"assoc", env, gt}).code, 0) << gt;
    EXPECT_EQ(mpst_run({"safety", env}).code, 0);
    EXPECT_EQ(mpst_run({"live", env}).code, 0);
    EXPECT_EQ(mpst_run({"typecheck", sn, "--env", env, "--global", gt}).code, 0) << sn;
    EXPECT_EQ(mpst_run({"dlock", sn}).code, 0);
  }
  auto smallest = mpst_run({"gen", "--seed", "1", "--count", "1", "--out", dir.string(), "--max-participants",
                            "2", "--max-labels", "1", "--max-depth", "1"});
  EXPECT_EQ(smallest.code, 0);
  EXPECT_NE(smallest.out.find("p -> q { l0("), std::string::npos) << smallest.out;
  EXPECT_EQ(mpst_run({"gen", "--max-participants", "1", "--out", dir.string()}).code, 2);
  std::filesystem::remove_all(dir);
}

TEST(Cli, BinaryExitCodes) {
  auto sh = [](const std::string& args) {
    int status = std::system((std::string(MPST_BIN) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  EXPECT_EQ(sh("project " + data("gex.gt") + " --role r"), 0);
  EXPECT_EQ(sh("live " + data("gamma_ex.env")), 1);
  EXPECT_EQ(sh("assoc " + data("remark.env") + " " + data("remark.gt")), 0);
  EXPECT_EQ(sh("live " + data("nope.env")), 2);
  EXPECT_EQ(sh("live " + data("gamma_ex.env") + " --max-states 1"), 3);
}
