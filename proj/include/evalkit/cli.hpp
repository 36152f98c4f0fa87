#pragma once

#include "evalkit/arch.hpp"
#include "evalkit/error.hpp"
#include "evalkit/eval.hpp"
#include "evalkit/grid.hpp"
#include "evalkit/ingest.hpp"
#include "evalkit/models.hpp"
#include "evalkit/normalize.hpp"
#include "evalkit/report.hpp"
#include "evalkit/rsqasm.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace evalkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1; // also I/O failures
inline constexpr int kExitDomain = 2;

struct Io {
  std::ostream& out;
  std::ostream& err;
  bool colorOut = false;
  bool colorErr = false;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "'");
  }
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (in.bad()) {
    throw IoError("cannot read '" + path + "'");
  }
  return text;
}

inline void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out || !(out << text) || !out.flush()) {
    throw IoError("cannot write '" + path + "'");
  }
}

/// NA_EVALKIT_COLOR: "always", "never", or "auto" (the default) which defers
/// to whether the stream is a terminal.
[[nodiscard]] inline bool colorEnabled(const char* setting, bool isTerminal) {
  const std::string_view mode = setting == nullptr ? "auto" : setting;
  if (mode == "always") {
    return true;
  }
  if (mode == "never") {
    return false;
  }
  return isTerminal;
}

namespace detail {

inline void printError(const Io& io, const std::string& message) {
  io.err << (io.colorErr ? "\033[31merror:\033[0m " : "error: ") << message
         << "\n";
}

inline void printWarnings(const Io& io, const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) {
    io.err << (io.colorErr ? "\033[33mwarning:\033[0m " : "warning: ") << w
           << "\n";
  }
}

/// Bold first line in colored table output.
inline std::string emphasizeHeader(const Io& io, std::string text,
                                   ReportFormat format) {
  if (!io.colorOut || format != ReportFormat::Table) {
    return text;
  }
  std::string out;
  std::istringstream lines(text);
  std::string line;
  bool first = true;
  while (std::getline(lines, line)) {
    const bool header = line.find("F_decoh") != std::string::npos ||
                        line.find("moves_before") != std::string::npos;
    out += (header || first) ? "\033[1m" + line + "\033[0m\n" : line + "\n";
    first = false;
  }
  return out;
}

inline ArchitectureSpec loadArchitecture(const Io& io, const std::string& path) {
  std::vector<std::string> warnings;
  auto spec = parseArchitecture(readFile(path), &warnings);
  printWarnings(io, warnings);
  return spec;
}

/// Runs `body`, translating failures into the exit-code contract.
template <typename Body> int guarded(const Io& io, Body&& body) {
  try {
    return body();
  } catch (const IoError& e) {
    printError(io, e.what());
    return kExitUsage;
  } catch (const Error& e) {
    printError(io, e.what());
    return kExitDomain;
  }
}

inline const std::map<std::string, ReportFormat> kFormats = {
    {"table", ReportFormat::Table},
    {"json", ReportFormat::Json},
    {"csv", ReportFormat::Csv}};

inline const std::map<std::string, Model> kModels = {
    {"unified", Model::Unified},
    {"hybridmapper", Model::HybridMapper},
    {"dasatom", Model::DasAtom},
    {"enola", Model::Enola}};

inline const std::map<std::string, Packing> kPackings = {
    {"greedy", Packing::Greedy}, {"one-per-stage", Packing::OnePerStage}};

} // namespace detail

/**
 * Entry point shared by the `na-evalkit` binary and the tests.
 *
 * Exit status: 0 on success, 1 for usage or I/O problems, 2 for domain errors
 * (parse failures, illegal programs, model errors). Reports go to `io.out`,
 * diagnostics to `io.err`.
 */
inline int run(int argc, const char* const* argv, const Io& io) {
  CLI::App app{"Evaluate routed and scheduled neutral-atom circuits (RSQASM)",
               "na-evalkit"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string archPath;
  std::string circuitPath;
  std::vector<std::string> circuitPaths;
  std::string emitPath;
  std::string outputPath;
  Model model = Model::Unified;
  ReportFormat format = ReportFormat::Table;
  Packing packing = Packing::Greedy;
  std::optional<double> radius;
  unsigned jobs = 0;
  WhatIfInput whatIf;

  auto addArch = [&](CLI::App* cmd) {
    cmd->add_option("-a,--arch", archPath, "Architecture JSON file")
        ->required();
  };
  auto addFormat = [&](CLI::App* cmd) {
    cmd->add_option("-f,--format", format, "Report format: table, json or csv")
        ->transform(CLI::CheckedTransformer(detail::kFormats, CLI::ignore_case));
  };
  auto addModel = [&](CLI::App* cmd) {
    cmd->add_option("-m,--model", model,
                    "Fidelity model: unified, hybridmapper, dasatom or enola")
        ->transform(CLI::CheckedTransformer(detail::kModels, CLI::ignore_case));
  };
  auto addRadius = [&](CLI::App* cmd) {
    cmd->add_option("--interaction-radius", radius,
                    "Warn about cz operands farther apart than this (um)");
  };

  auto* validate = app.add_subcommand(
      "validate", "Parse a circuit and simulate it on the architecture grid");
  addArch(validate);
  validate->add_option("circuit", circuitPath, "RSQASM file")->required();
  addRadius(validate);

  auto* evaluateCmd =
      app.add_subcommand("evaluate", "Compute fidelities and success probability");
  addArch(evaluateCmd);
  evaluateCmd->add_option("circuit", circuitPath, "RSQASM file")->required();
  addModel(evaluateCmd);
  addFormat(evaluateCmd);
  addRadius(evaluateCmd);

  auto* normalizeCmd = app.add_subcommand(
      "normalize", "Collapse redundant movement and report the savings");
  addArch(normalizeCmd);
  normalizeCmd->add_option("circuit", circuitPath, "RSQASM file")->required();
  normalizeCmd->add_option("--emit", emitPath, "Write the collapsed RSQASM here");
  addFormat(normalizeCmd);

  auto* compare =
      app.add_subcommand("compare", "Evaluate several circuits on one architecture");
  addArch(compare);
  compare->add_option("circuits", circuitPaths, "RSQASM files")->required();
  addModel(compare);
  addFormat(compare);
  compare->add_option("-j,--jobs", jobs, "Worker threads (0 = hardware)");

  auto* whatif = app.add_subcommand(
      "whatif", "Estimate fidelities after collapsing, from summary numbers");
  addArch(whatif);
  whatif->add_option("--old-idle", whatIf.oldIdle, "Idle time before (us)")
      ->required();
  whatif->add_option("--saved-distance", whatIf.savedDistance,
                     "Saved travel distance (cells)")
      ->required();
  whatif->add_option("--moves-before", whatIf.oldMoveCount)->required();
  whatif->add_option("--moves-after", whatIf.newMoveCount)->required();
  whatif->add_option("--n", whatIf.qubits, "Qubit count")->required();
  addFormat(whatif);

  auto* ingest = app.add_subcommand(
      "ingest", "Turn a native-gate OpenQASM 2 circuit into RSQASM");
  addArch(ingest);
  ingest->add_option("circuit", circuitPath, "OpenQASM file")->required();
  ingest->add_option("--packing", packing, "greedy or one-per-stage")
      ->transform(CLI::CheckedTransformer(detail::kPackings, CLI::ignore_case));
  ingest->add_option("-o,--output", outputPath, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, io.out, io.err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto warnRadius = [&](const Program& program, const ArchitectureSpec& spec) {
    if (radius) {
      detail::printWarnings(io, interactionRadiusWarnings(program, spec, *radius));
    }
  };

  if (*validate) {
    return detail::guarded(io, [&] {
      const auto spec = detail::loadArchitecture(io, archPath);
      const auto program = parseProgram(readFile(circuitPath));
      const auto final = simulateProgram(program, spec);
      warnRadius(program, spec);
      io.out << circuitPath << ": ok (" << program.stages.size() << " stages, "
             << final.occupancy.size() << " atoms)\n";
      return kExitOk;
    });
  }
  if (*evaluateCmd) {
    return detail::guarded(io, [&] {
      const auto spec = detail::loadArchitecture(io, archPath);
      const auto program = parseProgram(readFile(circuitPath));
      warnRadius(program, spec);
      const EvaluationReport report{circuitPath, archPath,
                                    evaluate(model, program, spec)};
      io.out << detail::emphasizeHeader(io, renderEvaluation(report, format),
                                        format);
      return kExitOk;
    });
  }
  if (*normalizeCmd) {
    return detail::guarded(io, [&] {
      const auto spec = detail::loadArchitecture(io, archPath);
      const auto program = parseProgram(readFile(circuitPath));
      const auto result = collapse(program, spec);
      for (const auto& s : result.report.skipped) {
        detail::printWarnings(io, {"skipped rewrite " + s});
      }
      if (!emitPath.empty()) {
        writeFile(emitPath, serializeProgram(result.program));
      }
      io.out << detail::emphasizeHeader(
          io, renderNormalization(result.report, circuitPath, format), format);
      return kExitOk;
    });
  }
  if (*compare) {
    return detail::guarded(io, [&] {
      const auto spec = detail::loadArchitecture(io, archPath);
      std::vector<CompareRow> rows(circuitPaths.size());
      std::atomic<std::size_t> nextIndex{0};
      auto worker = [&] {
        for (auto i = nextIndex++; i < rows.size(); i = nextIndex++) {
          auto& row = rows[i];
          row.circuit = circuitPaths[i];
          try {
            row.breakdown = evaluate(model, parseProgram(readFile(row.circuit)), spec);
            row.ok = true;
          } catch (const std::exception& e) {
            row.error = e.what();
          }
        }
      };
      const unsigned hw = std::max(1U, std::thread::hardware_concurrency());
      const auto workers = static_cast<std::size_t>(
          std::min<std::size_t>(jobs == 0 ? hw : jobs, rows.size()));
      std::vector<std::thread> pool;
      for (std::size_t t = 1; t < workers; ++t) {
        pool.emplace_back(worker);
      }
      worker();
      for (auto& th : pool) {
        th.join();
      }
      io.out << detail::emphasizeHeader(
          io, renderComparison(rows, model, archPath, format), format);
      bool failed = false;
      for (const auto& row : rows) {
        if (!row.ok) {
          detail::printError(io, row.circuit + ": " + row.error);
          failed = true;
        }
      }
      return failed ? kExitDomain : kExitOk;
    });
  }
  if (*whatif) {
    return detail::guarded(io, [&] {
      const auto spec = detail::loadArchitecture(io, archPath);
      io.out << detail::emphasizeHeader(
          io, renderWhatIf(whatIfCollapse(whatIf, spec), format), format);
      return kExitOk;
    });
  }
  if (*ingest) {
    return detail::guarded(io, [&] {
      const auto spec = detail::loadArchitecture(io, archPath);
      const auto circuit = parseFlatQasm(readFile(circuitPath));
      const auto text = serializeProgram(toRsqasm(circuit, spec, packing));
      if (outputPath.empty()) {
        io.out << text;
      } else {
        writeFile(outputPath, text);
      }
      return kExitOk;
    });
  }
  return kExitUsage;
}

} // namespace evalkit::cli
