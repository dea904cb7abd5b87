#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace mpst {

enum class Sort : std::uint8_t { Nat, Int, Bool };

std::string_view to_string(Sort s);

/// Message label `l<k>`; labels are plain indices.
struct Label {
  std::uint32_t index = 0;
  friend auto operator<=>(const Label&, const Label&) = default;
};

struct Participant {
  std::uint32_t id = 0;
  friend auto operator<=>(const Participant&, const Participant&) = default;
};

/// Maps participant display names to ids. One table is shared by every file
/// parsed in a single invocation so that `p` means the same role everywhere.
class RoleNames {
 public:
  Participant intern(std::string_view name);
  std::optional<Participant> find(std::string_view name) const;
  std::string name(Participant p) const;
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

enum class ErrorCode {
  SyntaxError,
  UnguardedRecursion,
  EmptyBranchSet,
  SelfCommunication,
  KindMismatch,
  MissingHole,
  NotBalanced,
  NotAParticipant,
  NotProjectable,
  PreconditionViolation,
  NotEnabled,
  StateBudgetExceeded,
  UnboundVariable,
  SortError,
  NoUpperBound,
  GenerationExhausted,
  Truncated,
};

std::string_view to_string(ErrorCode c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline std::size_t hash_combine(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace mpst

template <>
struct std::hash<mpst::Participant> {
  std::size_t operator()(mpst::Participant p) const noexcept {
    return std::hash<std::uint32_t>{}(p.id);
  }
};
