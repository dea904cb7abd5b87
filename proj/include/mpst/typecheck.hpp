#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpst/projection.hpp"
#include "mpst/syntax.hpp"

namespace mpst {

struct TypingCtx {
  std::map<std::string, Sort> exprs;
  std::vector<TreeHandle> procs;  // innermost μ last
};

/// Least sort of e. Throws UnboundVariable, SortError or NoUpperBound.
Sort sort_of_expr(const TypingCtx& ctx, const Expr& e);

enum class TypingErrorKind {
  HeadMismatch,
  MissingLabel,
  SortMismatch,
  UnexpectedEnd,
  UnboundVariable,
  NotAssociated,
  DomainMismatch,
};

const char* to_string(TypingErrorKind k);

struct TypingFailure {
  TypingErrorKind kind;
  std::string message;
  SourcePos pos;
  std::optional<Participant> participant;
};

struct TypingVerdict {
  bool holds = true;
  std::optional<TypingFailure> failure;
  explicit operator bool() const { return holds; }
};

TypingVerdict check_process(const TypeStore& store, const TypingCtx& ctx, const Process& p,
                            TreeHandle t, const RoleNames* roles = nullptr);
TypingVerdict check_process(const TypeStore& store, const Process& p, TreeHandle t,
                            const RoleNames* roles = nullptr);

/// t-sess: env is associated with g, covers exactly the session's
/// participants and types each process.
TypingVerdict check_session(TypeStore& store, const SessionForm& m, const TypeEnv& env,
                            TreeHandle g, bool strict = true, const RoleNames* roles = nullptr);

/// A canonical process of type t: sends pick among labels with nested
/// `if true (+) false` and send the least literal of the sort, receives
/// implement every branch.
Process realize(const TypeStore& store, TreeHandle t);
SessionForm realize_env(const TypeStore& store, const TypeEnv& env);

}  // namespace mpst
