#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mpst/projection.hpp"

namespace mpst {

/// Transition label. In Send/Recv `p` acts and `q` is its peer; in Comm `p`
/// sends to `q`. Comm labels carry no sort (kept at nat).
struct ActionLabel {
  enum class Kind : std::uint8_t { Send, Recv, Comm };
  Kind kind = Kind::Comm;
  Participant p;
  Participant q;
  Label label;
  Sort sort = Sort::Nat;

  static ActionLabel send(Participant p, Participant q, Label l, Sort s) {
    return {Kind::Send, p, q, l, s};
  }
  static ActionLabel recv(Participant p, Participant q, Label l, Sort s) {
    return {Kind::Recv, p, q, l, s};
  }
  static ActionLabel comm(Participant p, Participant q, Label l) {
    return {Kind::Comm, p, q, l, Sort::Nat};
  }
  bool same_pair(Participant a, Participant b) const { return p == a && q == b; }

  friend auto operator<=>(const ActionLabel&, const ActionLabel&) = default;
};

std::string render(const ActionLabel& a, const RoleNames& roles);

// ---- type environments

std::set<ActionLabel> env_enabled(const TypeStore& store, const TypeEnv& env);
bool env_can_step(const TypeStore& store, const TypeEnv& env, const ActionLabel& comm);
/// Throws NotEnabled.
TypeEnv env_step(const TypeStore& store, const TypeEnv& env, const ActionLabel& comm);

struct EnvGraph {
  struct Edge {
    ActionLabel label;
    std::size_t target;
  };
  std::vector<TypeEnv> states;  // states[0] is the initial environment
  std::map<TypeEnv, std::size_t> index;
  std::vector<std::vector<Edge>> edges;  // sorted by label
  std::size_t edge_count = 0;
};

/// All environments reachable by Comm steps. Throws StateBudgetExceeded.
EnvGraph env_state_graph(const TypeStore& store, const TypeEnv& env, std::size_t max_states);

// ---- global types

/// One global reduction; nullopt if no rule derives it.
std::optional<TreeHandle> global_step(TypeStore& store, TreeHandle g, const ActionLabel& comm);
/// Every Comm label for which global_step succeeds.
std::set<ActionLabel> global_enabled(TypeStore& store, TreeHandle g);

// ---- expressions and sessions

using Bindings = std::map<std::string, Value>;

/// All values e may evaluate to. Throws UnboundVariable or SortError.
std::set<Value> eval_expr(const Expr& e, const Bindings& env = {});

struct UnfoldResult {
  std::set<SessionForm> forms;
  bool truncated = false;
};

/// Internal-step closure of one process (itself included).
std::set<Process> process_unfoldings(const Process& p, std::size_t depth, bool* truncated);

/// All forms reachable by internal steps (μ-unfolding, conditionals).
UnfoldResult session_unfold(const SessionForm& m, std::size_t depth = 64);

struct SessionStep {
  ActionLabel label;
  SessionForm next;
  friend auto operator<=>(const SessionStep&, const SessionStep&) = default;
};

/// Communications from m with their results as produced by R-comm: only the
/// two endpoints change and nothing is unfolded afterwards.
std::vector<SessionStep> session_successors(const SessionForm& m, std::size_t depth = 64,
                                            bool* truncated = nullptr);

/// Same, with each result closed under trailing internal steps.
std::vector<SessionStep> session_enabled(const SessionForm& m, std::size_t depth = 64);
std::set<SessionForm> session_step(const SessionForm& m, const ActionLabel& comm,
                                   std::size_t depth = 64);

bool all_inactive(const SessionForm& m);

}  // namespace mpst
