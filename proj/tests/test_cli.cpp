#include "evalkit/cli.hpp"
#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace evalkit {
namespace {

namespace fs = std::filesystem;

const std::string kData = NA_EVALKIT_DATA;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result runCli(std::vector<std::string> args) {
  args.insert(args.begin(), "na-evalkit");
  std::vector<const char*> argv;
  for (const auto& a : args) {
    argv.push_back(a.c_str());
  }
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), {out, err});
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("evalkit-cli-" + std::string(::testing::UnitTest::GetInstance()
                                             ->current_test_info()
                                             ->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto path = (dir_ / name).string();
    std::ofstream(path) << text;
    return path;
  }

  fs::path dir_;
};

const std::string kArch = kData + "/table1.json";
const std::string kSample = kData + "/sample.rsqasm";

TEST_F(Cli, ValidateOk) {
  const auto r = runCli({"validate", kSample, "-a", kArch});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("ok (5 stages, 30 atoms)"), std::string::npos);
}

TEST_F(Cli, ValidateIllegalIsDomainError) {
  const auto bad = write("bad.rsqasm", "RSQASM 1.0;\nmove q[0], q[1];\n");
  const auto r = runCli({"validate", bad, "-a", kArch});
  EXPECT_EQ(r.code, cli::kExitDomain);
  EXPECT_NE(r.err.find("error: IllegalStage"), std::string::npos);
  EXPECT_NE(r.err.find("MoveToOccupiedCell"), std::string::npos);
}

TEST_F(Cli, ParseErrorIsDomainError) {
  const auto bad = write("bad.rsqasm", "RSQASM 1.0;\nfoo q[0];\n");
  const auto r = runCli({"evaluate", bad, "-a", kArch});
  EXPECT_EQ(r.code, cli::kExitDomain);
  EXPECT_NE(r.err.find("line 2, column 1"), std::string::npos);
}

TEST_F(Cli, MissingFileIsIoError) {
  const auto r = runCli({"evaluate", (dir_ / "nope.rsqasm").string(), "-a", kArch});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("cannot open"), std::string::npos);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(runCli({}).code, cli::kExitUsage);
  EXPECT_EQ(runCli({"evaluate", kSample}).code, cli::kExitUsage);
  EXPECT_EQ(runCli({"evaluate", kSample, "-a", kArch, "-m", "qiskit"}).code,
            cli::kExitUsage);
  EXPECT_EQ(runCli({"evaluate", kSample, "-a", kArch, "-f", "xml"}).code,
            cli::kExitUsage);
  EXPECT_EQ(runCli({"--help"}).code, cli::kExitOk);
}

TEST_F(Cli, EvaluateFormats) {
  const auto table = runCli({"evaluate", kSample, "-a", kArch, "-m", "dasatom"});
  EXPECT_EQ(table.code, cli::kExitOk);
  EXPECT_NE(table.out.find("model: dasatom"), std::string::npos);
  EXPECT_NE(table.out.find(std::string(kFidelityHeader)), std::string::npos);

  const auto json = runCli({"evaluate", kSample, "-a", kArch, "-f", "json"});
  ASSERT_EQ(json.code, cli::kExitOk);
  const auto j = nlohmann::json::parse(json.out);
  EXPECT_EQ(j["model"], "unified");
  EXPECT_EQ(j["move_count"], 4);
  EXPECT_EQ(j["stage_count"], 5);

  const auto csv = runCli({"evaluate", kSample, "-a", kArch, "-f", "csv", "-m", "enola"});
  ASSERT_EQ(csv.code, cli::kExitOk);
  EXPECT_EQ(std::count(csv.out.begin(), csv.out.end(), '\n'), 2);
  EXPECT_NE(csv.out.find(",enola,"), std::string::npos);
}

TEST_F(Cli, ArchitectureWarningsGoToStderr) {
  auto doc = nlohmann::json::parse(testing::kTable1Json);
  doc["note"] = 1;
  const auto arch = write("arch.json", doc.dump());
  const auto circuit = write("c.rsqasm", "RSQASM 1.0;\ncz q[0], q[1];\n");
  const auto r = runCli({"evaluate", circuit, "-a", arch});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.err.find("warning:"), std::string::npos);
  EXPECT_NE(r.err.find("note"), std::string::npos);
}

TEST_F(Cli, InteractionRadiusWarns) {
  const auto circuit = write("c.rsqasm", "RSQASM 1.0;\ncz q[0], q[9];\n");
  const auto r = runCli({"validate", circuit, "-a", kArch, "--interaction-radius", "2"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.err.find("interaction radius"), std::string::npos);
}

TEST_F(Cli, NormalizeEmitsValidProgram) {
  const auto arch = kData + "/nested_arch.json";
  const auto emitted = (dir_ / "out.rsqasm").string();
  const auto r = runCli({"normalize", kData + "/nested.rsqasm", "-a", arch, "--emit",
                         emitted, "-f", "json"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["moves_before"], 4);
  EXPECT_EQ(j["moves_after"], 0);
  EXPECT_EQ(runCli({"validate", emitted, "-a", arch}).code, cli::kExitOk);
  EXPECT_EQ(cli::readFile(emitted),
            "RSQASM 1.0;\ncz q[1029], q[1028];cz q[1034], q[1033];\nh q[1029];\n");
}

TEST_F(Cli, NormalizeIrredundantSavesNothing) {
  const auto r = runCli({"normalize", kSample, "-a", kArch});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("4  4  0.00  0"), std::string::npos) << r.out;
}

TEST_F(Cli, CompareKeepsOrderAndReportsFailures) {
  const auto good = write("good.rsqasm", "RSQASM 1.0;\ncz q[0], q[1];\n");
  const auto bad = write("bad.rsqasm", "RSQASM 1.0;\nh q[40];\n");
  const auto ok = runCli({"compare", kSample, good, kSample, "-a", kArch, "-j", "3"});
  EXPECT_EQ(ok.code, cli::kExitOk);
  EXPECT_LT(ok.out.find(kSample), ok.out.find(good));
  const auto mixed =
      runCli({"compare", good, bad, kSample, "-a", kArch, "-f", "json", "-j", "2"});
  EXPECT_EQ(mixed.code, cli::kExitDomain);
  const auto j = nlohmann::json::parse(mixed.out);
  ASSERT_EQ(j["rows"].size(), 3U);
  EXPECT_TRUE(j["rows"][0]["ok"].get<bool>());
  EXPECT_FALSE(j["rows"][1]["ok"].get<bool>());
  EXPECT_TRUE(j["rows"][2]["ok"].get<bool>());
  EXPECT_EQ(j["rows"][0]["circuit"], good);
  // identical inputs give identical rows whatever the thread count
  const auto one = runCli({"compare", good, kSample, "-a", kArch, "-f", "csv", "-j", "1"});
  const auto many = runCli({"compare", good, kSample, "-a", kArch, "-f", "csv", "-j", "8"});
  EXPECT_EQ(one.out, many.out);
}

TEST_F(Cli, WhatIf) {
  const auto r = runCli({"whatif", "-a", kArch, "--old-idle", "2747600", "--saved-distance",
                         "6003.69", "--moves-before", "1828", "--moves-after", "937",
                         "--n", "30"});
  EXPECT_EQ(r.code, cli::kExitOk);
  EXPECT_NE(r.out.find("19.44  82.91"), std::string::npos) << r.out;
  const auto bad = runCli({"whatif", "-a", kArch, "--old-idle", "10", "--saved-distance",
                           "6003.69", "--moves-before", "1828", "--moves-after", "937",
                           "--n", "30"});
  EXPECT_EQ(bad.code, cli::kExitDomain);
}

TEST_F(Cli, IngestWritesRsqasm) {
  const auto out = (dir_ / "barrier.rsqasm").string();
  const auto r = runCli({"ingest", kData + "/barrier.qasm", "-a", kArch, "-o", out});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(cli::readFile(out), "RSQASM 1.0;\ncz q[1], q[2];h q[0];\n");
  const auto serial = runCli({"ingest", kData + "/barrier.qasm", "-a", kArch, "--packing",
                              "one-per-stage"});
  EXPECT_EQ(serial.out, "RSQASM 1.0;\ncz q[1], q[2];\nh q[0];\n");
  const auto unsupported = write("m.qasm", "qreg q[1];\nmeasure q[0] -> c[0];\n");
  EXPECT_EQ(runCli({"ingest", unsupported, "-a", kArch}).code, cli::kExitDomain);
}

TEST(CliColor, Setting) {
  EXPECT_TRUE(cli::colorEnabled("always", false));
  EXPECT_FALSE(cli::colorEnabled("never", true));
  EXPECT_TRUE(cli::colorEnabled(nullptr, true));
  EXPECT_FALSE(cli::colorEnabled("auto", false));
}

TEST(CliColor, ErrorsAreColoredOnlyWhenEnabled) {
  std::ostringstream out;
  std::ostringstream err;
  const std::vector<const char*> argv = {"na-evalkit", "validate", "/nonexistent", "-a",
                                         "/nonexistent"};
  EXPECT_EQ(cli::run(5, argv.data(), {out, err, false, true}), cli::kExitUsage);
  EXPECT_NE(err.str().find("\033[31merror:"), std::string::npos);
}

// The installed binary follows the same exit-code contract.
int spawn(const std::string& args) {
  const std::string cmd = std::string(NA_EVALKIT_BIN) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(CliBinary, ExitCodes) {
  EXPECT_EQ(spawn("validate " + kSample + " -a " + kArch), 0);
  EXPECT_EQ(spawn("validate /nonexistent/x.rsqasm -a " + kArch), 1);
  EXPECT_EQ(spawn("frobnicate"), 1);
  EXPECT_EQ(spawn("whatif -a " + kArch +
                  " --old-idle 1 --saved-distance 5 --moves-before 2 --moves-after 1 --n 3"),
            2);
}

} // namespace
} // namespace evalkit
