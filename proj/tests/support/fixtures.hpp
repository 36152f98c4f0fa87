#pragma once

// Shared test fixtures: the reference hardware parameters and generators
// for random legal RSQASM programs.

#include "evalkit/evalkit.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace evalkit::testing {

/// Reference hardware parameters: 50x50 grid, 1 um spacing,
/// t_cz 0.2 us, t_1q 2 us, f_cz 0.9996, f_1q 0.9999, T1 1e8 us, T2 1.5e6 us,
/// 20 us per SLM/AOD transfer at fidelity 0.9999, 0.55 um/us.
inline ArchitectureSpec table1Spec(const std::vector<Cell>& cells,
                                   std::uint32_t side = 50) {
  ArchitectureSpec spec;
  spec.gridSide = side;
  spec.interQubitDistance = 1.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    spec.qubits.push_back({static_cast<AtomId>(i), cells[i] % side, cells[i] / side});
  }
  for (const auto gate : kNativeGates) {
    const bool cz = gate == "cz";
    spec.gateTimes[std::string(gate)] = cz ? 0.2 : 2.0;
    spec.gateFidelities[std::string(gate)] = cz ? 0.9996 : 0.9999;
  }
  spec.moveSpeed = 0.55;
  spec.aodTransferTime = 20.0;
  spec.transferFidelity = 0.9999;
  spec.t1 = 1e8;
  spec.t2 = 1.5e6;
  return spec;
}

/// `count` atoms on cells 0..count-1 of a side-50 grid.
inline ArchitectureSpec table1Spec(std::size_t count = 30) {
  std::vector<Cell> cells(count);
  for (std::size_t i = 0; i < count; ++i) {
    cells[i] = static_cast<Cell>(i);
  }
  return table1Spec(cells);
}

inline constexpr const char* kTable1Json = R"({
  "schema": 1,
  "properties": {"nRows_nColumns_grid_side_size": 50, "interQubitDistance": 1},
  "parameters": {
    "Qubits": [{"id": 0, "x": 0, "y": 0}, {"id": 1, "x": 1, "y": 0},
               {"id": 2, "x": 0, "y": 1}],
    "gateTimes": {"cz": 0.2, "rx": 2, "ry": 2, "rz": 2, "h": 2, "s": 2, "t": 2},
    "gateFidelities": {"cz": 0.9996, "rx": 0.9999, "ry": 0.9999, "rz": 0.9999,
                       "h": 0.9999, "s": 0.9999, "t": 0.9999},
    "shuttlingTimesSpeed": {"move_speed": 0.55, "aod_activate_deactivate_time": 20},
    "shuttlingFidelities": {"aod_activate_deactivate": 0.9999},
    "decoherenceTimes": {"t1": 100000000, "t2": 1500000}
  }
})";

inline Program parse(const std::string& body) {
  return parseProgram("RSQASM 1.0;\n" + body);
}

struct GeneratorOptions {
  double moveProbability = 0.4;
  std::size_t maxOpsPerStage = 4;
  /// Chance per stage to start an a->b ... b->a / b->c pattern.
  double patternProbability = 0.0;
};

/**
 * Random legal program on `spec`. Every instruction is chosen against the
 * occupancy at stage start and no cell is used twice in a stage. With
 * patternProbability > 0, reversal/path patterns are injected: a move a->b,
 * some unrelated stages that avoid a and b, then b->a or b->c.
 */
class ProgramGenerator {
public:
  ProgramGenerator(const ArchitectureSpec& spec, std::uint64_t seed,
                   GeneratorOptions options = {})
      : spec_(spec), rng_(seed), options_(options) {}

  Program generate(std::size_t stages) {
    injected_ = 0;
    Program program;
    GridState state = initialState(spec_);
    struct Pending {
      Cell a;
      Cell b;
      std::size_t remaining;
    };
    std::vector<Pending> pending;
    while (program.stages.size() < stages || !pending.empty()) {
      std::set<Cell> reserved;
      for (const auto& p : pending) {
        reserved.insert(p.a);
        reserved.insert(p.b);
      }
      Stage stage;
      std::set<Cell> used;
      // finish patterns whose gap has elapsed
      for (auto it = pending.begin(); it != pending.end();) {
        if (it->remaining > 0) {
          --it->remaining;
          ++it;
          continue;
        }
        Cell dst = it->a;
        if (coin(0.5)) {
          if (const auto c = emptyCell(state, used, reserved)) {
            dst = *c;
          }
        }
        stage.ops.emplace_back(MoveOp{it->b, dst});
        used.insert(it->b);
        used.insert(dst);
        it = pending.erase(it);
      }
      const bool startPattern = program.stages.size() < stages &&
                                coin(options_.patternProbability);
      if (startPattern) {
        const auto a = occupiedCell(state, used, reserved);
        const auto b = a ? emptyCell(state, used, reserved) : std::nullopt;
        if (a && b) {
          stage.ops.emplace_back(MoveOp{*a, *b});
          used.insert(*a);
          used.insert(*b);
          reserved.insert(*a);
          reserved.insert(*b);
          pending.push_back({*a, *b, uniform(0, 2)});
          ++injected_;
        }
      }
      const auto target = uniform(1, options_.maxOpsPerStage);
      for (std::size_t tries = 0; stage.ops.size() < target && tries < 8; ++tries) {
        addRandomOp(state, stage, used, reserved);
      }
      if (stage.ops.empty()) {
        if (!addRandomOp(state, stage, used, reserved) && !pending.empty()) {
          // only pending patterns remain; let a stage pass with a gate if we can
          continue;
        }
        if (stage.ops.empty()) {
          continue;
        }
      }
      state = applyStage(state, stage);
      program.stages.push_back(std::move(stage));
    }
    return program;
  }

  [[nodiscard]] std::size_t injectedPatterns() const { return injected_; }

private:
  bool addRandomOp(const GridState& state, Stage& stage, std::set<Cell>& used,
                   const std::set<Cell>& reserved) {
    const auto src = occupiedCell(state, used, reserved);
    if (!src) {
      return false;
    }
    if (coin(options_.moveProbability)) {
      if (const auto dst = emptyCell(state, used, reserved)) {
        stage.ops.emplace_back(MoveOp{*src, *dst});
        used.insert(*src);
        used.insert(*dst);
        return true;
      }
    }
    if (coin(0.5)) {
      used.insert(*src);
      const auto other = occupiedCell(state, used, reserved);
      if (other) {
        stage.ops.emplace_back(GateOp{"cz", {}, {*src, *other}});
        used.insert(*other);
        return true;
      }
    }
    static const char* kOneQubit[] = {"h", "s", "t", "rx", "ry", "rz"};
    const std::string name = kOneQubit[uniform(0, 5)];
    std::vector<double> params;
    if (gateParamCount(name) == 1) {
      params.push_back(std::uniform_real_distribution<double>(-3.2, 3.2)(rng_));
    }
    stage.ops.emplace_back(GateOp{name, params, {*src}});
    used.insert(*src);
    return true;
  }

  std::optional<Cell> occupiedCell(const GridState& state, const std::set<Cell>& used,
                                   const std::set<Cell>& reserved) {
    std::vector<Cell> options;
    for (const auto& [cell, atom] : state.occupancy) {
      if (!used.contains(cell) && !reserved.contains(cell)) {
        options.push_back(cell);
      }
    }
    if (options.empty()) {
      return std::nullopt;
    }
    return options[uniform(0, options.size() - 1)];
  }

  std::optional<Cell> emptyCell(const GridState& state, const std::set<Cell>& used,
                                const std::set<Cell>& reserved) {
    const auto count = static_cast<Cell>(state.cellCount());
    for (int tries = 0; tries < 64; ++tries) {
      const auto c = static_cast<Cell>(uniform(0, count - 1));
      if (!state.occupied(c) && !used.contains(c) && !reserved.contains(c)) {
        return c;
      }
    }
    return std::nullopt;
  }

  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::size_t uniform(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }

  const ArchitectureSpec& spec_;
  std::mt19937_64 rng_;
  GeneratorOptions options_;
  std::size_t injected_ = 0;
};

} // namespace evalkit::testing
