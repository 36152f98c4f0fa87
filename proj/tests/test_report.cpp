#include "evalkit/report.hpp"
#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace evalkit {
namespace {

TEST(Report, FormatPercent) {
  EXPECT_EQ(formatPercent(0.1557), "15.57");
  EXPECT_EQ(formatPercent(1.0), "100.00");
  EXPECT_EQ(formatPercent(0.0), "0.00");
  EXPECT_EQ(formatPercent(0.0546), "5.46");
  EXPECT_EQ(formatPercent(0.19444253813357368), "19.44");
  EXPECT_EQ(formatPercent(0.8291042559762868), "82.91");
  EXPECT_EQ(formatPercent(0.00004), "0.00");
}

TEST(Report, FidelityRowUsesStoredValues) {
  FidelityBreakdown b;
  b.fDecoherence = 0.1557;
  b.fGates = 0.5053;
  b.fMovements = 0.6937;
  b.asp = 0.0546;
  EXPECT_EQ(fidelityRow(b), "15.57  50.53  69.37  5.46");
}

TEST(Report, FormatExactRoundTrips) {
  for (const double v : {0.1, 2420126.0, 1e-300, 0.9995960769108985}) {
    EXPECT_EQ(std::stod(formatExact(v)), v);
  }
}

TEST(Report, CsvFieldQuoting) {
  EXPECT_EQ(csvField("plain.rsqasm"), "plain.rsqasm");
  EXPECT_EQ(csvField("a,b"), "\"a,b\"");
  EXPECT_EQ(csvField("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Report, EvaluationJsonAndCsvAgree) {
  const auto spec = testing::table1Spec(30);
  const EvaluationReport r{"c.rsqasm", "a.json",
                           evaluateUnified(testing::parse("cz q[0], q[1];"), spec)};
  const auto j = nlohmann::json::parse(renderEvaluation(r, ReportFormat::Json));
  EXPECT_EQ(j["tool_version"], "0.1.0");
  EXPECT_EQ(j["model"], "unified");
  EXPECT_EQ(j["two_qubit_gate_count"], 1);
  EXPECT_EQ(j["asp"].get<double>(), r.breakdown.asp);
  const auto csv = renderEvaluation(r, ReportFormat::Csv);
  const auto header = csv.substr(0, csv.find('\n'));
  const auto row = csv.substr(csv.find('\n') + 1);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','),
            std::count(row.begin(), row.end(), ','));
  EXPECT_NE(row.find(formatExact(r.breakdown.asp)), std::string::npos);
  const auto table = renderEvaluation(r, ReportFormat::Table);
  EXPECT_NE(table.find(std::string(kFidelityHeader)), std::string::npos);
  EXPECT_NE(table.find("100.00  99.96  100.00  99.96"), std::string::npos);
}

TEST(Report, ComparisonKeepsRowOrderAndErrors) {
  std::vector<CompareRow> rows(2);
  rows[0] = {"b.rsqasm", true, {}, {}};
  rows[1] = {"a.rsqasm", false, {}, "boom, badly"};
  const auto csv = renderComparison(rows, Model::Enola, "x.json", ReportFormat::Csv);
  EXPECT_LT(csv.find("b.rsqasm"), csv.find("a.rsqasm"));
  std::istringstream lines(csv);
  std::string line;
  std::vector<long> commas;
  while (std::getline(lines, line)) {
    long n = 0;
    bool quoted = false;
    for (const char c : line) {
      quoted ^= c == '"';
      n += !quoted && c == ',';
    }
    commas.push_back(n);
  }
  ASSERT_EQ(commas.size(), 3U);
  EXPECT_EQ(commas[0], commas[1]);
  EXPECT_EQ(commas[0], commas[2]);
  const auto j = nlohmann::json::parse(
      renderComparison(rows, Model::Enola, "x.json", ReportFormat::Json));
  EXPECT_EQ(j["rows"][1]["error"], "boom, badly");
  EXPECT_FALSE(j["rows"][1]["ok"].get<bool>());
}

TEST(Report, WhatIfTable) {
  const auto w = whatIfCollapse({2747600.0, 6003.69, 1828, 937, 30}, testing::table1Spec(1));
  const auto text = renderWhatIf(w, ReportFormat::Table);
  EXPECT_EQ(text, "dT_move_us  dt_idle_us  t_idle_us  F_decoh  F_moves\n"
                  "10915.80  327474.00  2420126.00  19.44  82.91\n");
}

TEST(Report, NormalizationJson) {
  NormalizationReport r;
  r.movesBefore = 4;
  r.rewrites = {{CollapseRule::Reversal, 1, 4}, {CollapseRule::Path, 2, 3}};
  const auto j = nlohmann::json::parse(renderNormalization(r, "n.rsqasm", ReportFormat::Json));
  EXPECT_EQ(j["rewrites"][0]["rule"], "R1");
  EXPECT_EQ(j["rewrites"][1]["stages"], nlohmann::json({2, 3}));
  EXPECT_EQ(j["moves_before"], 4);
}

} // namespace
} // namespace evalkit
