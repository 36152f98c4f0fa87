#pragma once

#include "evalkit/eval.hpp"
#include "evalkit/models.hpp"
#include "evalkit/normalize.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

namespace evalkit {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class ReportFormat { Table, Json, Csv };

/// 100 * fraction with two decimals, ties to even ("15.57", "100.00").
[[nodiscard]] inline std::string formatPercent(double fraction) {
  // nearbyint honours the default round-to-nearest-even mode
  const auto hundredths = static_cast<std::int64_t>(std::nearbyint(fraction * 1e4));
  const auto whole = hundredths / 100;
  const auto frac = hundredths % 100;
  std::string out = std::to_string(whole) + ".";
  if (frac < 10) {
    out += '0';
  }
  out += std::to_string(frac);
  return out;
}

[[nodiscard]] inline std::string formatFixed(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  return buf;
}

/// Shortest text that parses back to the same double.
[[nodiscard]] inline std::string formatExact(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return {buf, ptr};
}

[[nodiscard]] inline std::string csvField(std::string_view text) {
  if (text.find_first_of(",\"\n\r") == std::string_view::npos) {
    return std::string(text);
  }
  std::string out = "\"";
  for (const char c : text) {
    if (c == '"') {
      out += '"';
    }
    out += c;
  }
  out += '"';
  return out;
}

/// The four fidelity columns of a table row, e.g. `15.57  50.53  69.37  5.46`.
[[nodiscard]] inline std::string fidelityRow(const FidelityBreakdown& b) {
  return formatPercent(b.fDecoherence) + "  " + formatPercent(b.fGates) + "  " +
         formatPercent(b.fMovements) + "  " + formatPercent(b.asp);
}

inline constexpr std::string_view kFidelityHeader = "F_decoh  F_gates  F_moves  ASP";

inline void addBreakdown(nlohmann::ordered_json& j, const FidelityBreakdown& b) {
  j["f_decoherence"] = b.fDecoherence;
  j["f_gates"] = b.fGates;
  j["f_movements"] = b.fMovements;
  j["asp"] = b.asp;
  j["t_total_us"] = b.tTotal;
  j["t_idle_us"] = b.tIdle;
  j["gate_count"] = b.gateCount;
  j["one_qubit_gate_count"] = b.oneQubitGateCount;
  j["two_qubit_gate_count"] = b.twoQubitGateCount;
  j["move_count"] = b.moveCount;
  j["stage_count"] = b.stageCount;
  j["total_move_distance_cells"] = b.totalMoveDistance;
}

inline constexpr std::string_view kBreakdownCsvHeader =
    "f_decoherence,f_gates,f_movements,asp,t_total_us,t_idle_us,gate_count,"
    "one_qubit_gate_count,two_qubit_gate_count,move_count,stage_count,"
    "total_move_distance_cells";

[[nodiscard]] inline std::string breakdownCsv(const FidelityBreakdown& b) {
  return formatExact(b.fDecoherence) + "," + formatExact(b.fGates) + "," +
         formatExact(b.fMovements) + "," + formatExact(b.asp) + "," +
         formatExact(b.tTotal) + "," + formatExact(b.tIdle) + "," +
         std::to_string(b.gateCount) + "," + std::to_string(b.oneQubitGateCount) +
         "," + std::to_string(b.twoQubitGateCount) + "," +
         std::to_string(b.moveCount) + "," + std::to_string(b.stageCount) + "," +
         formatExact(b.totalMoveDistance);
}

struct EvaluationReport {
  std::string circuit;
  std::string architecture;
  FidelityBreakdown breakdown;
};

[[nodiscard]] inline std::string renderEvaluation(const EvaluationReport& r,
                                                  ReportFormat format) {
  const auto& b = r.breakdown;
  switch (format) {
  case ReportFormat::Json: {
    nlohmann::ordered_json j;
    j["tool_version"] = kToolVersion;
    j["model"] = toString(b.model);
    j["circuit"] = r.circuit;
    j["architecture"] = r.architecture;
    addBreakdown(j, b);
    return j.dump(2) + "\n";
  }
  case ReportFormat::Csv:
    return "tool_version,model,circuit,architecture," +
           std::string(kBreakdownCsvHeader) + "\n" + std::string(kToolVersion) +
           "," + std::string(toString(b.model)) + "," + csvField(r.circuit) + "," +
           csvField(r.architecture) + "," + breakdownCsv(b) + "\n";
  case ReportFormat::Table:
    break;
  }
  std::string out = "model: " + std::string(toString(b.model)) + "\n";
  out += "circuit: " + r.circuit + "\n";
  out += std::string(kFidelityHeader) + "\n" + fidelityRow(b) + "\n";
  out += "T_total_us  t_idle_us  gates  1q  2q  moves  stages  distance_cells\n";
  out += formatFixed(b.tTotal) + "  " + formatFixed(b.tIdle) + "  " +
         std::to_string(b.gateCount) + "  " + std::to_string(b.oneQubitGateCount) +
         "  " + std::to_string(b.twoQubitGateCount) + "  " +
         std::to_string(b.moveCount) + "  " + std::to_string(b.stageCount) + "  " +
         formatFixed(b.totalMoveDistance) + "\n";
  return out;
}

/// One compare row: either a breakdown or the error that stopped it.
struct CompareRow {
  std::string circuit;
  bool ok = false;
  FidelityBreakdown breakdown;
  std::string error;
};

[[nodiscard]] inline std::string renderComparison(const std::vector<CompareRow>& rows,
                                                  Model model,
                                                  const std::string& architecture,
                                                  ReportFormat format) {
  switch (format) {
  case ReportFormat::Json: {
    nlohmann::ordered_json j;
    j["tool_version"] = kToolVersion;
    j["model"] = toString(model);
    j["architecture"] = architecture;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
      nlohmann::ordered_json r;
      r["circuit"] = row.circuit;
      r["ok"] = row.ok;
      if (row.ok) {
        addBreakdown(r, row.breakdown);
      } else {
        r["error"] = row.error;
      }
      j["rows"].push_back(std::move(r));
    }
    return j.dump(2) + "\n";
  }
  case ReportFormat::Csv: {
    std::string out = "circuit,ok,error," + std::string(kBreakdownCsvHeader) + "\n";
    for (const auto& row : rows) {
      out += csvField(row.circuit) + ",";
      if (row.ok) {
        out += "true,," + breakdownCsv(row.breakdown) + "\n";
      } else {
        out += "false," + csvField(row.error) + ",,,,,,,,,,,,\n";
      }
    }
    return out;
  }
  case ReportFormat::Table:
    break;
  }
  std::string out = "model: " + std::string(toString(model)) + "\n";
  out += "circuit  " + std::string(kFidelityHeader) + "\n";
  for (const auto& row : rows) {
    out += row.circuit + "  " +
           (row.ok ? fidelityRow(row.breakdown) : "error: " + row.error) + "\n";
  }
  return out;
}

[[nodiscard]] inline std::string renderNormalization(const NormalizationReport& r,
                                                     const std::string& circuit,
                                                     ReportFormat format) {
  switch (format) {
  case ReportFormat::Json: {
    nlohmann::ordered_json j;
    j["tool_version"] = kToolVersion;
    j["circuit"] = circuit;
    j["moves_before"] = r.movesBefore;
    j["moves_after"] = r.movesAfter;
    j["distance_before_cells"] = r.distanceBefore;
    j["distance_after_cells"] = r.distanceAfter;
    j["saved_distance_cells"] = r.savedDistance;
    j["rewrites"] = nlohmann::ordered_json::array();
    for (const auto& w : r.rewrites) {
      j["rewrites"].push_back({{"rule", toString(w.rule)},
                               {"stages", {w.firstStage, w.secondStage}}});
    }
    j["skipped"] = r.skipped;
    return j.dump(2) + "\n";
  }
  case ReportFormat::Csv:
    return "circuit,moves_before,moves_after,distance_before_cells,"
           "distance_after_cells,saved_distance_cells,rewrites\n" +
           csvField(circuit) + "," + std::to_string(r.movesBefore) + "," +
           std::to_string(r.movesAfter) + "," + formatExact(r.distanceBefore) +
           "," + formatExact(r.distanceAfter) + "," +
           formatExact(r.savedDistance) + "," + std::to_string(r.rewrites.size()) +
           "\n";
  case ReportFormat::Table:
    break;
  }
  return "circuit: " + circuit +
         "\nmoves_before  moves_after  saved_distance_cells  rewrites\n" +
         std::to_string(r.movesBefore) + "  " + std::to_string(r.movesAfter) +
         "  " + formatFixed(r.savedDistance) + "  " +
         std::to_string(r.rewrites.size()) + "\n";
}

[[nodiscard]] inline std::string renderWhatIf(const WhatIfResult& w,
                                              ReportFormat format) {
  switch (format) {
  case ReportFormat::Json: {
    nlohmann::ordered_json j;
    j["tool_version"] = kToolVersion;
    j["delta_t_move_us"] = w.deltaMoveTime;
    j["delta_t_idle_us"] = w.deltaIdle;
    j["t_idle_us"] = w.newIdle;
    j["f_decoherence"] = w.fDecoherence;
    j["f_movements"] = w.fMovements;
    return j.dump(2) + "\n";
  }
  case ReportFormat::Csv:
    return "delta_t_move_us,delta_t_idle_us,t_idle_us,f_decoherence,f_movements\n" +
           formatExact(w.deltaMoveTime) + "," + formatExact(w.deltaIdle) + "," +
           formatExact(w.newIdle) + "," + formatExact(w.fDecoherence) + "," +
           formatExact(w.fMovements) + "\n";
  case ReportFormat::Table:
    break;
  }
  return "dT_move_us  dt_idle_us  t_idle_us  F_decoh  F_moves\n" +
         formatFixed(w.deltaMoveTime) + "  " + formatFixed(w.deltaIdle) + "  " +
         formatFixed(w.newIdle) + "  " + formatPercent(w.fDecoherence) + "  " +
         formatPercent(w.fMovements) + "\n";
}

} // namespace evalkit
