#pragma once

#include "evalkit/arch.hpp"
#include "evalkit/error.hpp"
#include "evalkit/eval.hpp"
#include "evalkit/rsqasm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace evalkit {

[[nodiscard]] inline std::optional<Model> parseModel(std::string_view name) {
  for (const auto m :
       {Model::Unified, Model::HybridMapper, Model::DasAtom, Model::Enola}) {
    if (toString(m) == name) {
      return m;
    }
  }
  return std::nullopt;
}

/**
 * HybridMapper-style ASP: exp(-t_idle/T_eff) * prod F_o with O = gates plus
 * the two SLM/AOD transfers of every move. Transfer durations are subtracted
 * from idle time along with gate durations, so shuttling makes the
 * decoherence term look better than in the unified model.
 */
[[nodiscard]] inline FidelityBreakdown
evaluateHybridMapper(const Program& program, const ArchitectureSpec& spec) {
  const auto prof = detail::profileProgram(program, spec);
  auto out = detail::baseBreakdown(Model::HybridMapper, prof, program);
  const auto n = static_cast<double>(spec.qubitCount());
  const auto transfers = 2.0 * static_cast<double>(prof.moves);
  out.tTotal = prof.totalTime;
  out.tIdle = detail::idleTime(n, prof.totalTime,
                               prof.gateTimeSum + transfers * spec.aodTransferTime);
  out.fDecoherence = std::exp(-out.tIdle / effectiveCoherenceTime(spec));
  out.fGates = prof.gateFidelityProduct;
  out.fMovements = std::pow(spec.transferFidelity, transfers);
  out.asp = out.fDecoherence * out.fGates * out.fMovements;
  return out;
}

/**
 * DasAtom-style ASP: exp(-t_idle/T2) * f_cz^m * f_trans^s with
 *   T = h*t_cz + s*t_trans + D/v,  t_idle = n*T - m*t_cz.
 * m counts cz gates, h gate-bearing stages, s transfers (two per move) and D
 * sums the longest move of each move-bearing stage. One-qubit gates
 * contribute neither time nor fidelity.
 */
[[nodiscard]] inline FidelityBreakdown
evaluateDasAtom(const Program& program, const ArchitectureSpec& spec) {
  const auto prof = detail::profileProgram(program, spec);
  auto out = detail::baseBreakdown(Model::DasAtom, prof, program);

  std::size_t depth = 0;
  double longestMoves = 0.0;
  for (const auto& stage : prof.stages) {
    if (!stage.gateDurations.empty()) {
      ++depth;
    }
    if (!stage.moveDistances.empty()) {
      longestMoves += *std::max_element(stage.moveDistances.begin(),
                                        stage.moveDistances.end());
    }
  }
  const double tCz = spec.gateTime("cz");
  const auto m = static_cast<double>(prof.twoQubitGates);
  const auto s = 2.0 * static_cast<double>(prof.moves);
  const double distanceUm = longestMoves * spec.interQubitDistance;
  const auto n = static_cast<double>(spec.qubitCount());

  out.tTotal = static_cast<double>(depth) * tCz + s * spec.aodTransferTime +
               distanceUm / spec.moveSpeed;
  out.tIdle = detail::idleTime(n, out.tTotal, m * tCz);
  out.fDecoherence = std::exp(-out.tIdle / spec.t2);
  out.fGates = std::pow(spec.gateFidelity("cz"), m);
  out.fMovements = std::pow(spec.transferFidelity, s);
  out.asp = out.fDecoherence * out.fGates * out.fMovements;
  return out;
}

/// Travel time for a distance in micrometers.
using MovementTimeFn = std::function<double(double, const ArchitectureSpec&)>;

/// Enola's printed acceleration model, t = d / v^2.
[[nodiscard]] inline double enolaMovementTime(double distanceUm,
                                              const ArchitectureSpec& spec) {
  return distanceUm / (spec.moveSpeed * spec.moveSpeed);
}

struct EnolaOptions {
  MovementTimeFn movementTime = enolaMovementTime;
};

/// |Q|*S - 2*g2: qubits exposed to the Rydberg laser without taking part in
/// a two-qubit gate.
[[nodiscard]] inline std::int64_t
enolaExcitationExponent(std::size_t qubits, std::size_t stages,
                        std::size_t twoQubitGates) {
  const auto exposed = static_cast<std::int64_t>(qubits) *
                           static_cast<std::int64_t>(stages) -
                       2 * static_cast<std::int64_t>(twoQubitGates);
  return std::max<std::int64_t>(exposed, 0);
}

/**
 * Enola-style ASP:
 *   f_cz^g2 * f_exc^(|Q|S - 2 g2) * f_trans^s * prod_q (1 - T_q/T2)
 * with f_1q fixed to 1 and T_q = T - (gate time of q). Moves take two
 * transfers plus options.movementTime(d). The excitation factor is reported
 * as part of f_gates.
 *
 * Throws CoherenceBudgetExceeded when some T_q >= T2, where the first-order
 * decoherence term stops being a probability.
 */
[[nodiscard]] inline FidelityBreakdown
evaluateEnola(const Program& program, const ArchitectureSpec& spec,
              const EnolaOptions& options = {}) {
  const auto prof = detail::profileProgram(program, spec);
  auto out = detail::baseBreakdown(Model::Enola, prof, program);

  double total = 0.0;
  for (const auto& stage : prof.stages) {
    double longest = 0.0;
    for (const double t : stage.gateDurations) {
      longest = std::max(longest, t);
    }
    for (const double d : stage.moveDistances) {
      longest = std::max(longest, 2.0 * spec.aodTransferTime +
                                      options.movementTime(
                                          d * spec.interQubitDistance, spec));
    }
    total += longest;
  }

  double decoherence = 1.0;
  double idle = 0.0;
  for (const auto& [atom, busy] : prof.busy) {
    const double tq = std::max(0.0, total - busy);
    const double factor = 1.0 - tq / spec.t2;
    if (factor <= 0.0) {
      throw Error(ErrorCode::CoherenceBudgetExceeded,
                  "qubit " + std::to_string(atom) + " idles " +
                      std::to_string(tq) + " us, not below T2 = " +
                      std::to_string(spec.t2) + " us");
    }
    decoherence *= factor;
    idle += tq;
  }

  const auto exposed = enolaExcitationExponent(
      spec.qubitCount(), program.stages.size(), prof.twoQubitGates);
  out.tTotal = total;
  out.tIdle = idle;
  out.fDecoherence = decoherence;
  out.fGates =
      std::pow(spec.gateFidelity("cz"), static_cast<double>(prof.twoQubitGates)) *
      std::pow(spec.excitementFidelity, static_cast<double>(exposed));
  out.fMovements = std::pow(spec.transferFidelity,
                            2.0 * static_cast<double>(prof.moves));
  out.asp = out.fDecoherence * out.fGates * out.fMovements;
  return out;
}

[[nodiscard]] inline FidelityBreakdown evaluate(Model model, const Program& program,
                                                const ArchitectureSpec& spec) {
  switch (model) {
  case Model::HybridMapper:
    return evaluateHybridMapper(program, spec);
  case Model::DasAtom:
    return evaluateDasAtom(program, spec);
  case Model::Enola:
    return evaluateEnola(program, spec);
  case Model::Unified:
    break;
  }
  return evaluateUnified(program, spec);
}

struct WhatIfInput {
  double oldIdle = 0.0;       // us
  double savedDistance = 0.0; // cell units
  std::size_t oldMoveCount = 0;
  std::size_t newMoveCount = 0;
  std::size_t qubits = 0;
};

struct WhatIfResult {
  double deltaMoveTime = 0.0; // us
  double deltaIdle = 0.0;     // us
  double newIdle = 0.0;       // us
  double fDecoherence = 1.0;
  double fMovements = 1.0;
};

/**
 * Re-estimates the unified decoherence and movement factors after collapsing
 * redundant moves, from the saved travel distance and the new move count
 * alone. Every qubit idles through the saved travel time.
 */
[[nodiscard]] inline WhatIfResult whatIfCollapse(const WhatIfInput& in,
                                                 const ArchitectureSpec& spec) {
  if (!(in.savedDistance >= 0.0) || !std::isfinite(in.savedDistance)) {
    throw Error(ErrorCode::InvalidInput, "saved distance must be non-negative");
  }
  if (!(in.oldIdle >= 0.0) || !std::isfinite(in.oldIdle)) {
    throw Error(ErrorCode::InvalidInput, "old idle time must be non-negative");
  }
  if (in.newMoveCount > in.oldMoveCount) {
    throw Error(ErrorCode::InvalidInput,
                "move count after collapsing exceeds the count before");
  }
  WhatIfResult out;
  out.deltaMoveTime = in.savedDistance * spec.interQubitDistance / spec.moveSpeed;
  out.deltaIdle = static_cast<double>(in.qubits) * out.deltaMoveTime;
  out.newIdle = in.oldIdle - out.deltaIdle;
  if (out.newIdle < 0.0) {
    throw Error(ErrorCode::InvalidInput,
                "saved travel time exceeds the recorded idle time");
  }
  out.fDecoherence = std::exp(-out.newIdle / effectiveCoherenceTime(spec));
  out.fMovements = std::pow(spec.transferFidelity,
                            2.0 * static_cast<double>(in.newMoveCount));
  return out;
}

} // namespace evalkit
