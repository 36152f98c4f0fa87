#pragma once

#include "evalkit/arch.hpp"
#include "evalkit/error.hpp"
#include "evalkit/grid.hpp"
#include "evalkit/rsqasm.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string_view>
#include <vector>

namespace evalkit {

enum class Model { Unified, HybridMapper, DasAtom, Enola };

[[nodiscard]] constexpr std::string_view toString(Model model) noexcept {
  switch (model) {
  case Model::Unified:
    return "unified";
  case Model::HybridMapper:
    return "hybridmapper";
  case Model::DasAtom:
    return "dasatom";
  case Model::Enola:
    return "enola";
  }
  return "unknown";
}

enum class StageKind { Gates, Moves, Mixed };

struct StageTiming {
  double duration = 0.0; // us, longest instruction of the stage
  StageKind kind = StageKind::Gates;

  bool operator==(const StageTiming&) const = default;
};

struct Runtime {
  double total = 0.0; // us
  std::vector<StageTiming> stages;
};

/// Per-circuit metrics. asp is always the product of the three factors.
struct FidelityBreakdown {
  Model model = Model::Unified;
  double fDecoherence = 1.0;
  double fGates = 1.0;
  double fMovements = 1.0;
  double asp = 1.0;
  double tTotal = 0.0; // us
  double tIdle = 0.0;  // us, summed over qubits
  std::size_t gateCount = 0;
  std::size_t oneQubitGateCount = 0;
  std::size_t twoQubitGateCount = 0;
  std::size_t moveCount = 0;
  std::size_t stageCount = 0;
  double totalMoveDistance = 0.0; // cell units
  /// Time each atom spends inside gates, in us.
  std::map<AtomId, double> busyTime;

  bool operator==(const FidelityBreakdown&) const = default;
};

[[nodiscard]] inline double moveDuration(double distanceCells,
                                         const ArchitectureSpec& spec) {
  return 2.0 * spec.aodTransferTime +
         distanceCells * spec.interQubitDistance / spec.moveSpeed;
}

/// Gate: its configured time. Move: two transfers plus travel at move speed.
[[nodiscard]] inline double instructionDuration(const Instruction& op,
                                                const ArchitectureSpec& spec) {
  if (const auto* move = std::get_if<MoveOp>(&op)) {
    return moveDuration(cellDistance(move->src, move->dst, spec.gridSide), spec);
  }
  return spec.gateTime(std::get<GateOp>(op).name);
}

[[nodiscard]] inline StageKind classify(const Stage& stage) {
  const bool moves = std::any_of(stage.ops.begin(), stage.ops.end(), isMove);
  const bool gates = std::any_of(stage.ops.begin(), stage.ops.end(),
                                 [](const Instruction& op) { return !isMove(op); });
  if (moves && gates) {
    return StageKind::Mixed;
  }
  return moves ? StageKind::Moves : StageKind::Gates;
}

/// Sum over stages of the longest instruction. Verifies legality on the way.
[[nodiscard]] inline Runtime totalRuntime(const Program& program,
                                          const ArchitectureSpec& spec) {
  Runtime rt;
  simulateProgram(program, spec,
                  [&](std::size_t, const GridState&, const Stage& stage) {
                    double longest = 0.0;
                    for (const auto& op : stage.ops) {
                      longest = std::max(longest, instructionDuration(op, spec));
                    }
                    rt.stages.push_back({longest, classify(stage)});
                    rt.total += longest;
                  });
  return rt;
}

namespace detail {

struct StageProfile {
  std::vector<double> gateDurations;
  std::vector<double> moveDistances; // cell units
  double duration = 0.0;             // unified stage time
};

/// Everything the fidelity models need, collected in one simulation pass.
struct ProgramProfile {
  std::vector<StageProfile> stages;
  double totalTime = 0.0;
  double gateTimeSum = 0.0;
  double gateFidelityProduct = 1.0;
  std::size_t oneQubitGates = 0;
  std::size_t twoQubitGates = 0;
  std::size_t moves = 0;
  double moveDistance = 0.0;
  std::map<AtomId, double> busy;
};

inline ProgramProfile profileProgram(const Program& program,
                                     const ArchitectureSpec& spec) {
  ProgramProfile prof;
  for (const auto& q : spec.qubits) {
    prof.busy[q.id] = 0.0;
  }
  simulateProgram(
      program, spec,
      [&](std::size_t, const GridState& state, const Stage& stage) {
        StageProfile sp;
        for (const auto& op : stage.ops) {
          const double t = instructionDuration(op, spec);
          sp.duration = std::max(sp.duration, t);
          if (const auto* move = std::get_if<MoveOp>(&op)) {
            const double d = cellDistance(move->src, move->dst, spec.gridSide);
            sp.moveDistances.push_back(d);
            prof.moveDistance += d;
            ++prof.moves;
            continue;
          }
          const auto& gate = std::get<GateOp>(op);
          sp.gateDurations.push_back(t);
          prof.gateTimeSum += t;
          prof.gateFidelityProduct *= spec.gateFidelity(gate.name);
          if (gate.operands.size() == 2) {
            ++prof.twoQubitGates;
          } else {
            ++prof.oneQubitGates;
          }
          for (const Cell c : gate.operands) {
            prof.busy[state.occupancy.at(c)] += t;
          }
        }
        prof.totalTime += sp.duration;
        prof.stages.push_back(std::move(sp));
      });
  return prof;
}

/// n*T minus subtracted busy time; rounding noise below zero is clamped.
inline double idleTime(double n, double total, double subtracted) {
  const double idle = n * total - subtracted;
  if (idle >= 0.0) {
    return idle;
  }
  if (idle > -1e-9 * std::max(1.0, n * total)) {
    return 0.0;
  }
  throw Error(ErrorCode::NegativeIdleTime,
              "idle time " + std::to_string(idle) + " us is negative");
}

inline FidelityBreakdown baseBreakdown(Model model, const ProgramProfile& prof,
                                       const Program& program) {
  FidelityBreakdown out;
  out.model = model;
  out.oneQubitGateCount = prof.oneQubitGates;
  out.twoQubitGateCount = prof.twoQubitGates;
  out.gateCount = prof.oneQubitGates + prof.twoQubitGates;
  out.moveCount = prof.moves;
  out.stageCount = program.stages.size();
  out.totalMoveDistance = prof.moveDistance;
  out.busyTime = prof.busy;
  return out;
}

} // namespace detail

/**
 * Unified success-probability model:
 *   F_decoh = exp(-t_idle / T_eff),  t_idle = n*T - sum of gate times
 *   F_gates = product of gate fidelities
 *   F_moves = f_trans^(2 * moves)
 * n is the number of placed qubits; movement time only enters through T.
 */
[[nodiscard]] inline FidelityBreakdown evaluateUnified(const Program& program,
                                                       const ArchitectureSpec& spec) {
  const auto prof = detail::profileProgram(program, spec);
  auto out = detail::baseBreakdown(Model::Unified, prof, program);
  const auto n = static_cast<double>(spec.qubitCount());
  out.tTotal = prof.totalTime;
  out.tIdle = detail::idleTime(n, prof.totalTime, prof.gateTimeSum);
  out.fDecoherence = std::exp(-out.tIdle / effectiveCoherenceTime(spec));
  out.fGates = prof.gateFidelityProduct;
  out.fMovements =
      std::pow(spec.transferFidelity, 2.0 * static_cast<double>(prof.moves));
  out.asp = out.fDecoherence * out.fGates * out.fMovements;
  return out;
}

} // namespace evalkit
