#pragma once

#include "evalkit/arch.hpp"
#include "evalkit/error.hpp"
#include "evalkit/rsqasm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace evalkit {

/// Occupancy of the square trap grid. Cells are row-major: c = y * side + x.
struct GridState {
  std::uint32_t side = 1;
  std::map<Cell, AtomId> occupancy;

  bool operator==(const GridState&) const = default;

  [[nodiscard]] std::uint64_t cellCount() const noexcept {
    return static_cast<std::uint64_t>(side) * side;
  }
  [[nodiscard]] bool inRange(Cell c) const noexcept { return c < cellCount(); }
  [[nodiscard]] bool occupied(Cell c) const { return occupancy.contains(c); }

  [[nodiscard]] std::optional<AtomId> atomAt(Cell c) const {
    const auto it = occupancy.find(c);
    if (it == occupancy.end()) {
      return std::nullopt;
    }
    return it->second;
  }

  /// atom id -> cell
  [[nodiscard]] std::map<AtomId, Cell> positions() const {
    std::map<AtomId, Cell> out;
    for (const auto& [cell, atom] : occupancy) {
      out.emplace(atom, cell);
    }
    return out;
  }
};

[[nodiscard]] inline GridState initialState(const ArchitectureSpec& spec) {
  GridState state{spec.gridSide, {}};
  for (const auto& q : spec.qubits) {
    state.occupancy.emplace(spec.cellOf(q), q.id);
  }
  return state;
}

/// Euclidean distance between two cells in cell units. Multiply by the
/// inter-qubit distance for micrometers.
[[nodiscard]] inline double cellDistance(Cell a, Cell b, std::uint32_t side) {
  const auto count = static_cast<std::uint64_t>(side) * side;
  if (a >= count || b >= count) {
    throw Error(ErrorCode::CellOutOfRange,
                "cell " + std::to_string(a >= count ? a : b) +
                    " outside a grid of " + std::to_string(count) + " cells");
  }
  const auto dx = static_cast<std::int64_t>(a % side) - (b % side);
  const auto dy = static_cast<std::int64_t>(a / side) - (b / side);
  return std::sqrt(static_cast<double>(dx * dx + dy * dy));
}

struct Violation {
  ErrorCode kind;
  std::size_t opIndex; // position inside the stage
  Cell cell;

  bool operator==(const Violation&) const = default;
};

struct StageDiagnosis {
  std::vector<Violation> violations;

  [[nodiscard]] bool legal() const noexcept { return violations.empty(); }

  [[nodiscard]] bool has(ErrorCode kind) const {
    return std::any_of(violations.begin(), violations.end(),
                       [&](const Violation& v) { return v.kind == kind; });
  }

  [[nodiscard]] std::string describe() const {
    std::string out;
    for (const auto& v : violations) {
      if (!out.empty()) {
        out += "; ";
      }
      out += std::string(toString(v.kind)) + " at cell " +
             std::to_string(v.cell) + " (instruction " +
             std::to_string(v.opIndex + 1) + ")";
    }
    return out;
  }
};

/**
 * Checks a stage against the occupancy at its start. Gate operands and move
 * sources must be occupied, move destinations empty, and every cell must be
 * inside the grid and used at most once in the stage.
 */
[[nodiscard]] inline StageDiagnosis validateStage(const GridState& state,
                                                  const Stage& stage) {
  StageDiagnosis diag;
  std::set<Cell> used;
  for (std::size_t i = 0; i < stage.ops.size(); ++i) {
    const auto& op = stage.ops[i];
    for (const Cell c : cellsOf(op)) {
      if (!state.inRange(c)) {
        diag.violations.push_back({ErrorCode::CellOutOfRange, i, c});
      } else if (!used.insert(c).second) {
        diag.violations.push_back({ErrorCode::DuplicateCellInStage, i, c});
      }
    }
    if (const auto* move = std::get_if<MoveOp>(&op)) {
      if (state.inRange(move->src) && !state.occupied(move->src)) {
        diag.violations.push_back({ErrorCode::MoveFromEmptyCell, i, move->src});
      }
      if (state.inRange(move->dst) && state.occupied(move->dst)) {
        diag.violations.push_back({ErrorCode::MoveToOccupiedCell, i, move->dst});
      }
    } else {
      for (const Cell c : std::get<GateOp>(op).operands) {
        if (state.inRange(c) && !state.occupied(c)) {
          diag.violations.push_back({ErrorCode::GateOnEmptyCell, i, c});
        }
      }
    }
  }
  return diag;
}

namespace detail {

/// Moves every atom of a stage already known to be legal.
inline void applyLegalStage(GridState& state, const Stage& stage) {
  std::vector<std::pair<Cell, AtomId>> arrivals;
  for (const auto& op : stage.ops) {
    if (const auto* move = std::get_if<MoveOp>(&op)) {
      const auto it = state.occupancy.find(move->src);
      arrivals.emplace_back(move->dst, it->second);
      state.occupancy.erase(it);
    }
  }
  for (const auto& [cell, atom] : arrivals) {
    state.occupancy.emplace(cell, atom);
  }
}

} // namespace detail

/// Applies all moves of a legal stage simultaneously. Gates leave the
/// occupancy untouched.
[[nodiscard]] inline GridState applyStage(const GridState& state,
                                          const Stage& stage) {
  const auto diag = validateStage(state, stage);
  if (!diag.legal()) {
    throw Error(ErrorCode::IllegalStage, diag.describe());
  }
  GridState next = state;
  detail::applyLegalStage(next, stage);
  return next;
}

/**
 * Walks a program from the spec's initial placement, calling
 * `visit(stageIndex, stateBefore, stage)` for each stage before applying it.
 * Throws IllegalStage naming the 1-based stage on the first violation.
 */
template <typename Visitor>
GridState simulateProgram(const Program& program, const ArchitectureSpec& spec,
                          Visitor&& visit) {
  GridState state = initialState(spec);
  for (std::size_t s = 0; s < program.stages.size(); ++s) {
    const auto& stage = program.stages[s];
    const auto diag = validateStage(state, stage);
    if (!diag.legal()) {
      throw Error(ErrorCode::IllegalStage,
                  "stage " + std::to_string(s + 1) + ": " + diag.describe());
    }
    visit(s, std::as_const(state), stage);
    detail::applyLegalStage(state, stage);
  }
  return state;
}

inline GridState simulateProgram(const Program& program,
                                 const ArchitectureSpec& spec) {
  return simulateProgram(program, spec,
                         [](std::size_t, const GridState&, const Stage&) {});
}

/// Advisory only: one message per cz whose operands are farther apart than
/// `radiusUm` micrometers. The evaluator never rejects a program for this.
[[nodiscard]] inline std::vector<std::string>
interactionRadiusWarnings(const Program& program, const ArchitectureSpec& spec,
                          double radiusUm) {
  std::vector<std::string> out;
  for (std::size_t s = 0; s < program.stages.size(); ++s) {
    for (const auto& op : program.stages[s].ops) {
      const auto* gate = std::get_if<GateOp>(&op);
      if (gate == nullptr || gate->operands.size() != 2) {
        continue;
      }
      const double d = cellDistance(gate->operands[0], gate->operands[1],
                                    spec.gridSide) *
                       spec.interQubitDistance;
      if (d > radiusUm) {
        out.push_back("stage " + std::to_string(s + 1) + ": " +
                      serializeInstruction(op) + " spans " + std::to_string(d) +
                      " um, beyond the interaction radius");
      }
    }
  }
  return out;
}

} // namespace evalkit
