#pragma once

#include "evalkit/arch.hpp"
#include "evalkit/error.hpp"
#include "evalkit/grid.hpp"
#include "evalkit/rsqasm.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace evalkit {

enum class CollapseRule {
  Reversal, // a->b later undone by b->a
  Path,     // a->b then b->c merged into a->c
};

[[nodiscard]] constexpr std::string_view toString(CollapseRule rule) noexcept {
  return rule == CollapseRule::Reversal ? "R1" : "R2";
}

/// One applied rewrite. Stage indices refer to the input program.
struct Rewrite {
  CollapseRule rule;
  std::size_t firstStage;
  std::size_t secondStage;

  bool operator==(const Rewrite&) const = default;
};

struct NormalizationReport {
  std::size_t movesBefore = 0;
  std::size_t movesAfter = 0;
  double distanceBefore = 0.0; // cell units
  double distanceAfter = 0.0;
  double savedDistance = 0.0;
  std::vector<Rewrite> rewrites;
  /// Candidates rejected because the rewritten program failed re-simulation.
  std::vector<std::string> skipped;
};

struct CollapseResult {
  Program program;
  NormalizationReport report;
};

namespace detail {

using Slot = std::optional<Instruction>;
using SlotProgram = std::vector<std::vector<Slot>>;

inline SlotProgram toSlots(const Program& program) {
  SlotProgram slots;
  slots.reserve(program.stages.size());
  for (const auto& stage : program.stages) {
    slots.emplace_back(stage.ops.begin(), stage.ops.end());
  }
  return slots;
}

inline Program fromSlots(const SlotProgram& slots, const Program& header) {
  Program out;
  out.versionMajor = header.versionMajor;
  out.versionMinor = header.versionMinor;
  for (const auto& stage : slots) {
    Stage s;
    for (const auto& slot : stage) {
      if (slot) {
        s.ops.push_back(*slot);
      }
    }
    if (!s.ops.empty()) {
      out.stages.push_back(std::move(s));
    }
  }
  return out;
}

inline std::pair<std::size_t, double> moveTotals(const Program& program,
                                                 std::uint32_t side) {
  std::size_t count = 0;
  double distance = 0.0;
  for (const auto& stage : program.stages) {
    for (const auto& op : stage.ops) {
      if (const auto* move = std::get_if<MoveOp>(&op)) {
        ++count;
        distance += cellDistance(move->src, move->dst, side);
      }
    }
  }
  return {count, distance};
}

inline bool reproduces(const Program& candidate, const ArchitectureSpec& spec,
                       const std::map<AtomId, Cell>& expected) {
  try {
    return simulateProgram(candidate, spec).positions() == expected;
  } catch (const Error&) {
    return false;
  }
}

struct Candidate {
  CollapseRule rule;
  std::size_t stage;
  std::size_t slot;
  std::size_t laterStage;
  std::size_t laterSlot;
};

/// Looks for the first instruction after `stage` that touches the move's
/// destination and decides whether the pair forms a reversal or a path.
inline std::optional<Candidate> findCandidate(const SlotProgram& slots,
                                              std::size_t stage,
                                              std::size_t slot) {
  const auto& first = std::get<MoveOp>(*slots[stage][slot]);
  const Cell a = first.src;
  const Cell b = first.dst;
  for (std::size_t j = stage + 1; j < slots.size(); ++j) {
    std::optional<std::size_t> hit;
    bool touchesA = false;
    for (std::size_t k = 0; k < slots[j].size(); ++k) {
      const auto& op = slots[j][k];
      if (!op) {
        continue;
      }
      if (references(*op, b)) {
        hit = k;
      } else if (references(*op, a)) {
        touchesA = true;
      }
    }
    if (!hit) {
      if (touchesA) {
        return std::nullopt;
      }
      continue;
    }
    const auto* second = std::get_if<MoveOp>(&*slots[j][*hit]);
    if (second == nullptr || second->src != b || touchesA) {
      return std::nullopt;
    }
    const auto rule =
        second->dst == a ? CollapseRule::Reversal : CollapseRule::Path;
    return Candidate{rule, stage, slot, j, *hit};
  }
  return std::nullopt;
}

} // namespace detail

/**
 * Removes movement that is redundant at the RSQASM level, to a fixed point:
 *
 *  - R1: move a->b at stage i undone by move b->a at stage j > i, with no
 *    instruction strictly between touching a or b. Both moves are deleted.
 *  - R2: move a->b at stage i followed by b->c (c != a) at stage j > i, with
 *    no instruction strictly between touching a or b and nothing else at
 *    stage j touching a. Replaced by a->c at stage j.
 *
 * Candidates are taken earliest-first in program order. Every rewrite is
 * re-simulated; one that breaks legality or changes the final atom positions
 * is skipped and listed in the report. Stages left empty are dropped.
 *
 * Throws IllegalInput if the program is not legal for `spec`.
 */
[[nodiscard]] inline CollapseResult collapse(const Program& program,
                                             const ArchitectureSpec& spec) {
  std::map<AtomId, Cell> expected;
  try {
    expected = simulateProgram(program, spec).positions();
  } catch (const Error& e) {
    throw Error(ErrorCode::IllegalInput, e.what());
  }

  CollapseResult result;
  auto& report = result.report;
  std::tie(report.movesBefore, report.distanceBefore) =
      detail::moveTotals(program, spec.gridSide);

  auto slots = detail::toSlots(program);
  std::set<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> rejected;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      for (std::size_t k = 0; k < slots[i].size(); ++k) {
        if (!slots[i][k] || !isMove(*slots[i][k])) {
          continue;
        }
        const auto cand = detail::findCandidate(slots, i, k);
        if (!cand || rejected.contains({i, k, cand->laterStage, cand->laterSlot})) {
          continue;
        }
        auto trial = slots;
        const auto first = std::get<MoveOp>(*trial[i][k]);
        auto& second = trial[cand->laterStage][cand->laterSlot];
        if (cand->rule == CollapseRule::Reversal) {
          second.reset();
        } else {
          second = MoveOp{first.src, std::get<MoveOp>(*second).dst};
        }
        trial[i][k].reset();

        if (!detail::reproduces(detail::fromSlots(trial, program), spec,
                                expected)) {
          rejected.insert({i, k, cand->laterStage, cand->laterSlot});
          report.skipped.push_back(
              std::string(toString(cand->rule)) + " on stages " +
              std::to_string(i) + " and " + std::to_string(cand->laterStage));
          continue;
        }
        slots = std::move(trial);
        report.rewrites.push_back({cand->rule, i, cand->laterStage});
        changed = true;
      }
    }
  }

  result.program = detail::fromSlots(slots, program);
  std::tie(report.movesAfter, report.distanceAfter) =
      detail::moveTotals(result.program, spec.gridSide);
  // Triangle inequality makes this non-negative up to rounding.
  report.savedDistance =
      std::max(0.0, report.distanceBefore - report.distanceAfter);
  return result;
}

} // namespace evalkit
