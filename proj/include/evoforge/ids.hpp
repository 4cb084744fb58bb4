#pragma once

// 16-bit module identifiers: 1 controllable bit, 6 kind bits, 9 variant bits.
// Kind codes are namespaced by the controllable flag, so (flag, kind, variant)
// triplets are the canonical identity.

#include <cstdint>
#include <stdexcept>
#include <string>

namespace evoforge {

// Functional role of a module in a workflow. Multi-strategy variants carry a
// MultiStrategy id prefix but act as their constituent kind (see registry).
enum class ModuleKind {
  Initialization,
  Niching,
  BoundaryControl,
  Selection,
  RestartStrategy,
  PopulationReduction,
  Mutation,
  Crossover,
  OtherUpdate,
  InformationSharing,
  End,
};

enum class OpStyle { None, DE, GA, PSO, ES };

inline const char* to_string(ModuleKind k) {
  switch (k) {
    case ModuleKind::Initialization: return "Initialization";
    case ModuleKind::Niching: return "Niching";
    case ModuleKind::BoundaryControl: return "Boundary_Control";
    case ModuleKind::Selection: return "Selection";
    case ModuleKind::RestartStrategy: return "Restart_Strategy";
    case ModuleKind::PopulationReduction: return "Population_Reduction";
    case ModuleKind::Mutation: return "Mutation";
    case ModuleKind::Crossover: return "Crossover";
    case ModuleKind::OtherUpdate: return "Other_Update";
    case ModuleKind::InformationSharing: return "Information_Sharing";
    case ModuleKind::End: return "end";
  }
  return "?";
}

// Kind codes inside the controllable namespace.
inline constexpr int kKindMutation = 1;
inline constexpr int kKindCrossover = 2;
inline constexpr int kKindOtherUpdate = 3;
inline constexpr int kKindMultiStrategy = 4;
inline constexpr int kKindInformationSharing = 5;
// Kind codes inside the uncontrollable namespace.
inline constexpr int kKindInitialization = 1;
inline constexpr int kKindNiching = 2;
inline constexpr int kKindBoundaryControl = 3;
inline constexpr int kKindSelection = 4;
inline constexpr int kKindRestartStrategy = 5;
inline constexpr int kKindPopulationReduction = 6;
inline constexpr int kKindEnd = 7;

struct ModuleId {
  std::uint16_t bits = 0;

  constexpr bool controllable() const { return (bits >> 15) & 1u; }
  constexpr int kind_code() const { return (bits >> 9) & 0x3Fu; }
  constexpr int variant_code() const { return bits & 0x1FFu; }

  constexpr auto operator<=>(const ModuleId&) const = default;
};

inline ModuleId encode_id(int controllable, int kind_index, int variant_index) {
  if (controllable < 0 || controllable > 1)
    throw std::invalid_argument("encode_id: controllable flag must be 0 or 1");
  if (kind_index < 1 || kind_index > 7)
    throw std::invalid_argument("encode_id: kind index out of [1,7]");
  if (variant_index < 1 || variant_index > 511)
    throw std::invalid_argument("encode_id: variant index out of [1,511]");
  ModuleId id;
  id.bits = static_cast<std::uint16_t>((controllable << 15) |
                                       (kind_index << 9) | variant_index);
  return id;
}

struct DecodedId {
  int controllable;
  int kind_index;
  int variant_index;
  bool operator==(const DecodedId&) const = default;
};

inline DecodedId decode_id(ModuleId id) {
  return {id.controllable() ? 1 : 0, id.kind_code(), id.variant_code()};
}

// "1-000001-000000001" style used by the registry manifest and workflow text.
inline std::string to_bit_string(ModuleId id) {
  std::string s;
  s.reserve(18);
  s.push_back(id.controllable() ? '1' : '0');
  s.push_back('-');
  for (int b = 5; b >= 0; --b) s.push_back(((id.kind_code() >> b) & 1) ? '1' : '0');
  s.push_back('-');
  for (int b = 8; b >= 0; --b)
    s.push_back(((id.variant_code() >> b) & 1) ? '1' : '0');
  return s;
}

inline ModuleId id_from_bit_string(const std::string& s) {
  std::string raw;
  raw.reserve(16);
  for (char c : s) {
    if (c == '0' || c == '1') raw.push_back(c);
    else if (c != '-') throw std::invalid_argument("bad id string: " + s);
  }
  if (raw.size() != 16) throw std::invalid_argument("bad id string: " + s);
  std::uint16_t bits = 0;
  for (char c : raw) bits = static_cast<std::uint16_t>((bits << 1) | (c == '1'));
  return ModuleId{bits};
}

}  // namespace evoforge
