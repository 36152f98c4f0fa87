#pragma once

#include "evalkit/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace evalkit {

using Cell = std::uint32_t;
using AtomId = std::uint32_t;

inline constexpr std::array<std::string_view, 7> kNativeGates = {
    "cz", "rx", "ry", "rz", "h", "s", "t"};

[[nodiscard]] inline bool isNativeGate(std::string_view name) noexcept {
  return std::find(kNativeGates.begin(), kNativeGates.end(), name) !=
         kNativeGates.end();
}

/// Largest accepted grid side; keeps side * side inside a 32-bit cell index.
inline constexpr std::uint32_t kMaxGridSide = 65535;
inline constexpr std::int64_t kSchemaVersion = 1;

/// Initial trap of one atom. Screen-space: x is the column, y grows downward.
struct QubitPlacement {
  AtomId id = 0;
  std::uint32_t x = 0;
  std::uint32_t y = 0;

  bool operator==(const QubitPlacement&) const = default;
};

/**
 * Unified hardware description. Times are in microseconds, lengths in
 * micrometers. Instances returned by parseArchitecture() satisfy every
 * validation rule and are never mutated afterwards.
 */
struct ArchitectureSpec {
  std::int64_t schema = kSchemaVersion;
  std::uint32_t gridSide = 1;
  double interQubitDistance = 1.0;
  std::vector<QubitPlacement> qubits;
  std::map<std::string, double, std::less<>> gateTimes;
  std::map<std::string, double, std::less<>> gateFidelities;
  double moveSpeed = 1.0;
  double aodTransferTime = 0.0;
  double transferFidelity = 1.0;
  double t1 = 1.0;
  double t2 = 1.0;
  double excitementFidelity = 1.0;

  bool operator==(const ArchitectureSpec&) const = default;

  [[nodiscard]] std::size_t qubitCount() const noexcept {
    return qubits.size();
  }

  [[nodiscard]] Cell cellOf(const QubitPlacement& q) const noexcept {
    return q.y * gridSide + q.x;
  }

  [[nodiscard]] double gateTime(std::string_view gate) const {
    const auto it = gateTimes.find(gate);
    if (it == gateTimes.end()) {
      throw Error(ErrorCode::UnknownGate,
                  "no gate time for '" + std::string(gate) + "'");
    }
    return it->second;
  }

  [[nodiscard]] double gateFidelity(std::string_view gate) const {
    const auto it = gateFidelities.find(gate);
    if (it == gateFidelities.end()) {
      throw Error(ErrorCode::UnknownGate,
                  "no gate fidelity for '" + std::string(gate) + "'");
    }
    return it->second;
  }
};

/// T1*T2/(T1+T2), always strictly below min(T1, T2).
[[nodiscard]] inline double effectiveCoherenceTime(const ArchitectureSpec& spec) {
  return spec.t1 * spec.t2 / (spec.t1 + spec.t2);
}

namespace detail {

using Json = nlohmann::json;

class ArchReader {
public:
  explicit ArchReader(std::vector<std::string>* warnings)
      : warnings_(warnings) {}

  const Json& object(const Json& parent, std::string_view key,
                     const std::string& path) const {
    const Json& node = field(parent, key, path);
    if (!node.is_object()) {
      throw Error(ErrorCode::InvalidValue, join(path, key) + ": expected object");
    }
    return node;
  }

  double number(const Json& parent, std::string_view key,
                const std::string& path) const {
    const Json& node = field(parent, key, path);
    if (!node.is_number()) {
      throw Error(ErrorCode::InvalidValue, join(path, key) + ": expected number");
    }
    return node.get<double>();
  }

  std::int64_t integer(const Json& parent, std::string_view key,
                       const std::string& path) const {
    const Json& node = field(parent, key, path);
    if (!node.is_number_integer()) {
      throw Error(ErrorCode::InvalidValue,
                  join(path, key) + ": expected integer");
    }
    if (node.is_number_unsigned() &&
        node.get<std::uint64_t>() >
            static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
      throw Error(ErrorCode::InvalidValue, join(path, key) + ": out of range");
    }
    return node.get<std::int64_t>();
  }

  void warnUnknown(const Json& node, std::initializer_list<std::string_view> known,
                   const std::string& path) const {
    if (warnings_ == nullptr) {
      return;
    }
    for (const auto& [key, value] : node.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        warnings_->push_back("ignoring unknown key '" + join(path, key) + "'");
      }
    }
  }

  static std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
  }

private:
  static const Json& field(const Json& parent, std::string_view key,
                           const std::string& path) {
    const auto it = parent.find(key);
    if (it == parent.end()) {
      throw Error(ErrorCode::MissingField, join(path, key));
    }
    return *it;
  }

  std::vector<std::string>* warnings_;
};

inline void requireFidelity(double value, const std::string& path) {
  if (!(value > 0.0 && value <= 1.0)) {
    throw Error(ErrorCode::InvalidValue, path + ": fidelity must lie in (0,1]");
  }
}

inline void requirePositive(double value, const std::string& path) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidValue, path + ": must be positive");
  }
}

inline void requireNonNegative(double value, const std::string& path) {
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidValue, path + ": must be non-negative");
  }
}

inline std::map<std::string, double, std::less<>>
readGateTable(const ArchReader& reader, const Json& parameters,
              std::string_view key, bool fidelity) {
  const std::string path = ArchReader::join("parameters", key);
  const Json& table = reader.object(parameters, key, "parameters");
  std::map<std::string, double, std::less<>> out;
  for (const auto& [name, value] : table.items()) {
    const std::string entry = path + "." + name;
    if (!value.is_number()) {
      throw Error(ErrorCode::InvalidValue, entry + ": expected number");
    }
    const auto v = value.get<double>();
    if (fidelity) {
      requireFidelity(v, entry);
    } else {
      requireNonNegative(v, entry);
    }
    out.emplace(name, v);
  }
  for (const auto gate : kNativeGates) {
    if (!out.contains(gate)) {
      throw Error(ErrorCode::MissingField, path + "." + std::string(gate));
    }
  }
  return out;
}

} // namespace detail

/**
 * Parses and validates a JSON architecture document.
 *
 * Unknown keys are not an error; when `warnings` is non-null one message per
 * ignored key is appended to it. Failures throw evalkit::Error whose message
 * names the offending path, e.g. `parameters.Qubits[3]`.
 */
[[nodiscard]] inline ArchitectureSpec
parseArchitecture(std::string_view document,
                  std::vector<std::string>* warnings = nullptr) {
  using detail::Json;
  Json root;
  try {
    root = Json::parse(document);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::MalformedDocument, e.what());
  }
  if (!root.is_object()) {
    throw Error(ErrorCode::MalformedDocument, "root must be a JSON object");
  }

  const detail::ArchReader reader(warnings);
  reader.warnUnknown(root, {"schema", "properties", "parameters"}, "");

  ArchitectureSpec spec;
  spec.schema = reader.integer(root, "schema", "");
  if (spec.schema != kSchemaVersion) {
    throw Error(ErrorCode::SchemaMismatch,
                "schema: unsupported version " + std::to_string(spec.schema));
  }

  const Json& properties = reader.object(root, "properties", "");
  reader.warnUnknown(properties,
                     {"nRows_nColumns_grid_side_size", "interQubitDistance"},
                     "properties");
  const auto side =
      reader.integer(properties, "nRows_nColumns_grid_side_size", "properties");
  if (side < 1 || side > kMaxGridSide) {
    throw Error(ErrorCode::InvalidValue,
                "properties.nRows_nColumns_grid_side_size: must lie in [1, " +
                    std::to_string(kMaxGridSide) + "]");
  }
  spec.gridSide = static_cast<std::uint32_t>(side);
  spec.interQubitDistance =
      reader.number(properties, "interQubitDistance", "properties");
  detail::requirePositive(spec.interQubitDistance,
                          "properties.interQubitDistance");

  const Json& parameters = reader.object(root, "parameters", "");
  reader.warnUnknown(parameters,
                     {"Qubits", "gateTimes", "gateFidelities",
                      "shuttlingTimesSpeed", "shuttlingFidelities",
                      "decoherenceTimes", "excitementFidelity"},
                     "parameters");

  const auto qubitsIt = parameters.find("Qubits");
  if (qubitsIt == parameters.end()) {
    throw Error(ErrorCode::MissingField, "parameters.Qubits");
  }
  if (!qubitsIt->is_array()) {
    throw Error(ErrorCode::InvalidValue, "parameters.Qubits: expected array");
  }
  std::set<AtomId> seenIds;
  std::set<std::pair<std::uint32_t, std::uint32_t>> seenCells;
  for (std::size_t i = 0; i < qubitsIt->size(); ++i) {
    const std::string path = "parameters.Qubits[" + std::to_string(i) + "]";
    const Json& q = (*qubitsIt)[i];
    if (!q.is_object()) {
      throw Error(ErrorCode::InvalidValue, path + ": expected object");
    }
    reader.warnUnknown(q, {"id", "x", "y"}, path);
    const auto id = reader.integer(q, "id", path);
    const auto x = reader.integer(q, "x", path);
    const auto y = reader.integer(q, "y", path);
    if (id < 0 || id > std::numeric_limits<AtomId>::max()) {
      throw Error(ErrorCode::InvalidValue, path + ".id: out of range");
    }
    if (x < 0 || x >= side || y < 0 || y >= side) {
      throw Error(ErrorCode::InvalidValue, path + ": position outside the grid");
    }
    QubitPlacement placement{static_cast<AtomId>(id),
                             static_cast<std::uint32_t>(x),
                             static_cast<std::uint32_t>(y)};
    if (!seenIds.insert(placement.id).second) {
      throw Error(ErrorCode::InvalidValue, path + ".id: duplicate qubit id");
    }
    if (!seenCells.emplace(placement.x, placement.y).second) {
      throw Error(ErrorCode::InvalidValue,
                  path + ": another qubit already occupies this position");
    }
    spec.qubits.push_back(placement);
  }

  spec.gateTimes = detail::readGateTable(reader, parameters, "gateTimes", false);
  spec.gateFidelities =
      detail::readGateTable(reader, parameters, "gateFidelities", true);

  const Json& shuttling =
      reader.object(parameters, "shuttlingTimesSpeed", "parameters");
  reader.warnUnknown(shuttling, {"move_speed", "aod_activate_deactivate_time"},
                     "parameters.shuttlingTimesSpeed");
  spec.moveSpeed =
      reader.number(shuttling, "move_speed", "parameters.shuttlingTimesSpeed");
  detail::requirePositive(spec.moveSpeed,
                          "parameters.shuttlingTimesSpeed.move_speed");
  spec.aodTransferTime = reader.number(shuttling, "aod_activate_deactivate_time",
                                       "parameters.shuttlingTimesSpeed");
  detail::requireNonNegative(
      spec.aodTransferTime,
      "parameters.shuttlingTimesSpeed.aod_activate_deactivate_time");

  const Json& shuttlingFid =
      reader.object(parameters, "shuttlingFidelities", "parameters");
  reader.warnUnknown(shuttlingFid, {"aod_activate_deactivate"},
                     "parameters.shuttlingFidelities");
  spec.transferFidelity = reader.number(shuttlingFid, "aod_activate_deactivate",
                                        "parameters.shuttlingFidelities");
  detail::requireFidelity(
      spec.transferFidelity,
      "parameters.shuttlingFidelities.aod_activate_deactivate");

  const Json& decoherence =
      reader.object(parameters, "decoherenceTimes", "parameters");
  reader.warnUnknown(decoherence, {"t1", "t2"}, "parameters.decoherenceTimes");
  spec.t1 = reader.number(decoherence, "t1", "parameters.decoherenceTimes");
  spec.t2 = reader.number(decoherence, "t2", "parameters.decoherenceTimes");
  detail::requirePositive(spec.t1, "parameters.decoherenceTimes.t1");
  detail::requirePositive(spec.t2, "parameters.decoherenceTimes.t2");

  if (parameters.contains("excitementFidelity")) {
    spec.excitementFidelity =
        reader.number(parameters, "excitementFidelity", "parameters");
    detail::requireFidelity(spec.excitementFidelity,
                            "parameters.excitementFidelity");
  }
  return spec;
}

/// Inverse of parseArchitecture(); re-parsing the output yields an equal spec.
[[nodiscard]] inline std::string
serializeArchitecture(const ArchitectureSpec& spec) {
  using Ordered = nlohmann::ordered_json;
  Ordered qubits = Ordered::array();
  for (const auto& q : spec.qubits) {
    qubits.push_back(Ordered{{"id", q.id}, {"x", q.x}, {"y", q.y}});
  }
  Ordered gateTimes = Ordered::object();
  for (const auto& [name, value] : spec.gateTimes) {
    gateTimes[name] = value;
  }
  Ordered gateFidelities = Ordered::object();
  for (const auto& [name, value] : spec.gateFidelities) {
    gateFidelities[name] = value;
  }
  Ordered doc = {
      {"schema", spec.schema},
      {"properties",
       {{"nRows_nColumns_grid_side_size", spec.gridSide},
        {"interQubitDistance", spec.interQubitDistance}}},
      {"parameters",
       {{"Qubits", qubits},
        {"gateTimes", gateTimes},
        {"gateFidelities", gateFidelities},
        {"shuttlingTimesSpeed",
         {{"move_speed", spec.moveSpeed},
          {"aod_activate_deactivate_time", spec.aodTransferTime}}},
        {"shuttlingFidelities",
         {{"aod_activate_deactivate", spec.transferFidelity}}},
        {"decoherenceTimes", {{"t1", spec.t1}, {"t2", spec.t2}}},
        {"excitementFidelity", spec.excitementFidelity}}}};
  return doc.dump(2) + "\n";
}

} // namespace evalkit
