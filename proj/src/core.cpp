#include "mpst/core.hpp"

namespace mpst {

std::string_view to_string(Sort s) {
  switch (s) {
    case Sort::Nat: return "nat";
    case Sort::Int: return "int";
    case Sort::Bool: return "bool";
  }
  return "?";
}

Participant RoleNames::intern(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return Participant{it->second};
  auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(std::string(name), id);
  return Participant{id};
}

std::optional<Participant> RoleNames::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return Participant{it->second};
}

std::string RoleNames::name(Participant p) const {
  if (p.id < names_.size()) return names_[p.id];
  return "role" + std::to_string(p.id);
}

std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnguardedRecursion: return "UnguardedRecursion";
    case ErrorCode::EmptyBranchSet: return "EmptyBranchSet";
    case ErrorCode::SelfCommunication: return "SelfCommunication";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::MissingHole: return "MissingHole";
    case ErrorCode::NotBalanced: return "NotBalanced";
    case ErrorCode::NotAParticipant: return "NotAParticipant";
    case ErrorCode::NotProjectable: return "NotProjectable";
    case ErrorCode::PreconditionViolation: return "PreconditionViolation";
    case ErrorCode::NotEnabled: return "NotEnabled";
    case ErrorCode::StateBudgetExceeded: return "StateBudgetExceeded";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::SortError: return "SortError";
    case ErrorCode::NoUpperBound: return "NoUpperBound";
    case ErrorCode::GenerationExhausted: return "GenerationExhausted";
    case ErrorCode::Truncated: return "Truncated";
  }
  return "Unknown";
}

}  // namespace mpst
