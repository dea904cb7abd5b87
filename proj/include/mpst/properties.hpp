#pragma once

#include <functional>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "mpst/lts.hpp"

namespace mpst {

/// The infinite path prefix · cycle^ω. Each step holds a state and the label
/// of the edge leaving it; a step without a label is the stutter of a state
/// that cannot move and is only valid as the sole step of a cycle.
template <class State>
struct Lasso {
  struct Step {
    State state;
    std::optional<ActionLabel> label;
    friend bool operator==(const Step&, const Step&) = default;
  };
  std::vector<Step> prefix;
  std::vector<Step> cycle;

  std::size_t length() const { return prefix.size() + cycle.size(); }
  /// Step at position i of the infinite unrolling.
  const Step& at(std::size_t i) const {
    return i < prefix.size() ? prefix[i] : cycle[(i - prefix.size()) % cycle.size()];
  }
};

using EnvLasso = Lasso<TypeEnv>;
using SessionLasso = Lasso<SessionForm>;

using CommPair = std::pair<Participant, Participant>;

template <class State>
using StepPredicate = std::function<bool(const typename Lasso<State>::Step&)>;

/// pred holds at some position >= from. Positions past prefix + cycle repeat.
template <class State>
bool lasso_eventually(const Lasso<State>& l, std::size_t from, const StepPredicate<State>& pred) {
  if (l.cycle.empty()) return false;
  std::size_t start = from;
  if (start > l.prefix.size()) start = l.prefix.size() + (start - l.prefix.size()) % l.cycle.size();
  for (std::size_t i = start; i < start + l.length(); ++i)
    if (pred(l.at(i))) return true;
  return false;
}

template <class State>
bool lasso_always(const Lasso<State>& l, const StepPredicate<State>& pred) {
  for (std::size_t i = 0; i < l.length(); ++i)
    if (!pred(l.at(i))) return false;
  return true;
}

/// Fairness given the pairs whose communication is enabled at each state.
template <class State>
bool lasso_fair_with(const Lasso<State>& l,
                     const std::function<std::set<CommPair>(const State&)>& enabled) {
  for (std::size_t n = 0; n < l.length(); ++n) {
    for (const auto& [p, q] : enabled(l.at(n).state)) {
      StepPredicate<State> fires = [&](const auto& s) {
        return s.label && s.label->kind == ActionLabel::Kind::Comm && s.label->same_pair(p, q);
      };
      if (!lasso_eventually(l, n, fires)) return false;
    }
  }
  return true;
}

std::set<CommPair> comm_pairs(const TypeStore& store, const TypeEnv& env);
std::set<CommPair> comm_pairs(const SessionForm& m, std::size_t depth = 64);
/// Pairs (sender, receiver) with a pending request by either side.
std::set<CommPair> request_pairs(const TypeStore& store, const TypeEnv& env);

bool lasso_valid(const TypeStore& store, const EnvLasso& l);
bool lasso_valid(const SessionLasso& l, std::size_t depth = 64);
bool lasso_fair(const TypeStore& store, const EnvLasso& l);
bool lasso_fair(const SessionLasso& l, std::size_t depth = 64);
bool lasso_live(const TypeStore& store, const EnvLasso& l);

// ---- environments

bool weak_safety_at(const TypeStore& store, const TypeEnv& env);

struct Verdict {
  bool holds = true;
  std::optional<TypeEnv> bad_state;  // safety
  std::optional<EnvLasso> lasso;     // liveness
  std::size_t states = 0;
  std::size_t edges = 0;
};

/// Throws StateBudgetExceeded.
Verdict safe(const TypeStore& store, const TypeEnv& env, std::size_t max_states = 100000);
Verdict env_live(const TypeStore& store, const TypeEnv& env, std::size_t max_states = 100000);
/// Both, over an already built graph.
Verdict safe(const TypeStore& store, const EnvGraph& g);
Verdict env_live(const TypeStore& store, const EnvGraph& g);

// ---- sessions

enum class DeadlockKind { Terminated, CanStep, Deadlocked };

struct DeadlockStatus {
  DeadlockKind kind = DeadlockKind::Deadlocked;
  bool terminated_reachable = false;
};

DeadlockStatus deadlock_status(const SessionForm& m, std::size_t depth = 64);
const char* to_string(DeadlockKind k);

struct ScheduleStep {
  SessionForm state;
  std::set<CommPair> enabled;
  ActionLabel label;
};

struct Schedule {
  enum class End { Terminated, Deadlocked, Cycle, Truncated };
  std::vector<ScheduleStep> steps;
  SessionForm last;  // state after the final step
  End end = End::Truncated;
  /// For End::Cycle: the run continues as steps[loop_start..] forever.
  std::size_t loop_start = 0;
};

/// Runs m under a round-robin policy that always serves the longest-waiting
/// enabled pair, rotating through that pair's alternatives per state.
Schedule fair_schedule(const SessionForm& m, std::size_t max_steps, std::size_t depth = 64);
const char* to_string(Schedule::End e);
/// nullopt for a truncated schedule.
std::optional<SessionLasso> schedule_lasso(const Schedule& s);

struct SessionLiveVerdict {
  bool holds = true;
  std::size_t states = 0;
  /// On failure: the unfolded form and the participant whose action never fires.
  std::optional<SessionForm> witness;
  std::optional<Participant> stuck;
};

/// Checks every form reachable within depth steps and then unfolded. Throws
/// Truncated when a verdict would depend on states beyond max_states.
SessionLiveVerdict session_live_bounded(const SessionForm& m, std::size_t depth,
                                        std::size_t max_states = 100000);

}  // namespace mpst
