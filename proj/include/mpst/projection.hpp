#pragma once

#include <map>
#include <optional>

#include "mpst/equirec.hpp"
#include "mpst/subtyping.hpp"

namespace mpst {

/// Participant to local type; compared extensionally as a map of handles.
using TypeEnv = std::map<Participant, TreeHandle>;

TypeEnv intern_env(TypeStore& store, const EnvSyntax& env);
std::string render(const TypeStore& store, const TypeEnv& env, const RoleNames& roles);

/// Plain-merge projection; nullopt when branches not involving r disagree.
std::optional<TreeHandle> project(TypeStore& store, TreeHandle g, Participant r);
bool projectable_all(TypeStore& store, TreeHandle g);

/// {p : g|p} for every participant of g. Throws NotProjectable.
TypeEnv projected_env(TypeStore& store, TreeHandle g);

struct AssocEntry {
  std::optional<TreeHandle> actual;     // env entry, if present
  std::optional<TreeHandle> projection; // g|p for participants of g
  bool ok = true;
  SubtypeResult subtype;                // actual <= projection
  std::string note;
};

struct AssocReport {
  bool holds = true;
  std::map<Participant, AssocEntry> entries;
};

/// Association of env with g. With `strict` the global type must be
/// balanced; it must always be projectable. Violations throw
/// PreconditionViolation with the reason in the message.
AssocReport check_associated(TypeStore& store, const TypeEnv& env, TreeHandle g,
                             bool strict = true);
bool associated(TypeStore& store, const TypeEnv& env, TreeHandle g, bool strict = true);

}  // namespace mpst
