#include "mpst/properties.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace mpst {

// ---------------------------------------------------------------- lassos

std::set<CommPair> comm_pairs(const TypeStore& store, const TypeEnv& env) {
  std::set<CommPair> out;
  for (const auto& a : env_enabled(store, env))
    if (a.kind == ActionLabel::Kind::Comm) out.emplace(a.p, a.q);
  return out;
}

std::set<CommPair> comm_pairs(const SessionForm& m, std::size_t depth) {
  std::set<CommPair> out;
  for (const auto& s : session_successors(m, depth)) out.emplace(s.label.p, s.label.q);
  return out;
}

std::set<CommPair> request_pairs(const TypeStore& store, const TypeEnv& env) {
  std::set<CommPair> out;
  for (const auto& a : env_enabled(store, env)) {
    if (a.kind == ActionLabel::Kind::Send) out.emplace(a.p, a.q);
    if (a.kind == ActionLabel::Kind::Recv) out.emplace(a.q, a.p);
  }
  return out;
}

namespace {

template <class State, class Next>
bool lasso_valid_with(const Lasso<State>& l, Next next) {
  if (l.cycle.empty()) return false;
  auto successor = [&](std::size_t i) -> const State& {
    return i + 1 < l.prefix.size() ? l.prefix[i + 1].state
                                   : i + 1 == l.prefix.size() ? l.cycle[0].state
                                                              : l.cycle[(i + 1 - l.prefix.size()) % l.cycle.size()].state;
  };
  for (std::size_t i = 0; i < l.length(); ++i) {
    const auto& step = i < l.prefix.size() ? l.prefix[i] : l.cycle[i - l.prefix.size()];
    if (!step.label) {
      // Stutter: only as the whole cycle, at a state with no moves.
      if (l.cycle.size() != 1 || i != l.prefix.size()) return false;
      if (!next(step.state, std::nullopt, step.state)) return false;
      continue;
    }
    if (!next(step.state, step.label, successor(i))) return false;
  }
  return true;
}

}  // namespace

bool lasso_valid(const TypeStore& store, const EnvLasso& l) {
  return lasso_valid_with(l, [&](const TypeEnv& from, const std::optional<ActionLabel>& a,
                                 const TypeEnv& to) {
    if (!a) return comm_pairs(store, from).empty() && from == to;
    return env_can_step(store, from, *a) && env_step(store, from, *a) == to;
  });
}

bool lasso_valid(const SessionLasso& l, std::size_t depth) {
  return lasso_valid_with(l, [&](const SessionForm& from, const std::optional<ActionLabel>& a,
                                 const SessionForm& to) {
    auto succ = session_successors(from, depth);
    if (!a) return succ.empty() && from == to;
    return std::find(succ.begin(), succ.end(), SessionStep{*a, to}) != succ.end();
  });
}

bool lasso_fair(const TypeStore& store, const EnvLasso& l) {
  return lasso_fair_with<TypeEnv>(l, [&](const TypeEnv& e) { return comm_pairs(store, e); });
}

bool lasso_fair(const SessionLasso& l, std::size_t depth) {
  return lasso_fair_with<SessionForm>(l, [&](const SessionForm& m) { return comm_pairs(m, depth); });
}

bool lasso_live(const TypeStore& store, const EnvLasso& l) {
  for (std::size_t n = 0; n < l.length(); ++n) {
    for (const auto& [p, q] : request_pairs(store, l.at(n).state)) {
      StepPredicate<TypeEnv> answered = [&](const EnvLasso::Step& s) {
        return s.label && s.label->kind == ActionLabel::Kind::Comm && s.label->same_pair(p, q);
      };
      if (!lasso_eventually(l, n, answered)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- safety

bool weak_safety_at(const TypeStore& store, const TypeEnv& env) {
  auto en = env_enabled(store, env);
  for (const auto& a : en) {
    if (a.kind != ActionLabel::Kind::Send) continue;
    // Any receive of the peer from a counts, whatever its label.
    bool peer_waits = false;
    for (const auto& b : en)
      if (b.kind == ActionLabel::Kind::Recv && b.p == a.q && b.q == a.p) peer_waits = true;
    if (peer_waits && !en.contains(ActionLabel::comm(a.p, a.q, a.label))) return false;
  }
  return true;
}

Verdict safe(const TypeStore& store, const EnvGraph& g) {
  Verdict v;
  v.states = g.states.size();
  v.edges = g.edge_count;
  for (const auto& s : g.states) {
    if (!weak_safety_at(store, s)) {
      v.holds = false;
      v.bad_state = s;
      break;
    }
  }
  return v;
}

Verdict safe(const TypeStore& store, const TypeEnv& env, std::size_t max_states) {
  return safe(store, env_state_graph(store, env, max_states));
}

// ---------------------------------------------------------------- liveness

namespace {

using Mask = std::vector<char>;

// Strongly connected components of the subgraph induced by `in`.
std::vector<std::vector<std::size_t>> sccs(const EnvGraph& g, const Mask& in) {
  const std::size_t n = g.states.size();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> index(n, kUnset), low(n, 0);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  std::size_t counter = 0;
  struct Frame {
    std::size_t v;
    std::size_t edge;
  };
  for (std::size_t root = 0; root < n; ++root) {
    if (!in[root] || index[root] != kUnset) continue;
    std::vector<Frame> calls{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!calls.empty()) {
      auto& f = calls.back();
      if (f.edge < g.edges[f.v].size()) {
        auto w = g.edges[f.v][f.edge++].target;
        if (!in[w]) continue;
        if (index[w] == kUnset) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          calls.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], index[w]);
        }
        continue;
      }
      auto v = f.v;
      calls.pop_back();
      if (!calls.empty()) low[calls.back().v] = std::min(low[calls.back().v], low[v]);
      if (low[v] == index[v]) {
        std::vector<std::size_t> comp;
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp.push_back(w);
        } while (w != v);
        out.push_back(std::move(comp));
      }
    }
  }
  return out;
}

struct FairComponent {
  std::vector<std::size_t> states;
  std::set<CommPair> fired;
};

// Strongly connected sets inside `region` on which every enabled pair also
// fires, found by repeatedly discarding states whose pairs cannot fire.
std::vector<FairComponent> fair_components(const EnvGraph& g,
                                           const std::vector<std::set<CommPair>>& enabled,
                                           const Mask& region) {
  std::vector<FairComponent> found;
  Mask in(g.states.size(), 0);
  Mask k = region;
  for (bool again = true; again;) {
    again = false;
    Mask next(g.states.size(), 0);
    for (auto& comp : sccs(g, k)) {
      for (auto v : comp) in[v] = 1;
      std::set<CommPair> fired, en;
      bool has_edge = false;
      for (auto v : comp) {
        en.insert(enabled[v].begin(), enabled[v].end());
        for (const auto& e : g.edges[v]) {
          if (!in[e.target]) continue;
          has_edge = true;
          fired.emplace(e.label.p, e.label.q);
        }
      }
      for (auto v : comp) in[v] = 0;
      if (!has_edge) continue;
      if (std::includes(fired.begin(), fired.end(), en.begin(), en.end())) {
        std::sort(comp.begin(), comp.end());
        found.push_back({std::move(comp), std::move(fired)});
        continue;
      }
      // Components of what is left are checked again in the next round.
      for (auto v : comp) {
        bool bad = false;
        for (const auto& pr : enabled[v]) bad = bad || !fired.contains(pr);
        if (!bad) next[v] = again = true;
      }
    }
    k = std::move(next);
  }
  return found;
}

// Shortest path inside `in` from `from` to the first state satisfying goal,
// as (state, edge) steps; the goal state itself is not included.
template <class Goal>
std::optional<std::vector<std::pair<std::size_t, ActionLabel>>> bfs_path(const EnvGraph& g,
                                                                         const Mask& in,
                                                                         std::size_t from,
                                                                         Goal goal,
                                                                         std::size_t* reached) {
  const std::size_t n = g.states.size();
  constexpr std::size_t kUnset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent(n, kUnset), parent_edge(n, 0);
  std::deque<std::size_t> todo{from};
  parent[from] = from;
  while (!todo.empty()) {
    auto v = todo.front();
    todo.pop_front();
    if (goal(v)) {
      std::vector<std::pair<std::size_t, ActionLabel>> path;
      for (auto x = v; x != from; x = parent[x])
        path.emplace_back(parent[x], g.edges[parent[x]][parent_edge[x]].label);
      std::reverse(path.begin(), path.end());
      *reached = v;
      return path;
    }
    for (std::size_t i = 0; i < g.edges[v].size(); ++i) {
      auto w = g.edges[v][i].target;
      if (!in[w] || parent[w] != kUnset) continue;
      parent[w] = v;
      parent_edge[w] = i;
      todo.push_back(w);
    }
  }
  return std::nullopt;
}

// A cycle through `start` inside the component that fires every pair in `need`.
std::vector<std::pair<std::size_t, ActionLabel>> covering_cycle(const EnvGraph& g,
                                                                const FairComponent& c,
                                                                std::size_t start) {
  Mask in(g.states.size(), 0);
  for (auto v : c.states) in[v] = 1;
  std::vector<std::pair<std::size_t, ActionLabel>> cycle;
  std::set<CommPair> covered;
  std::size_t cur = start;
  for (const auto& pr : c.fired) {
    if (covered.contains(pr)) continue;
    // Walk to a state with an internal edge of this pair, then take it.
    std::size_t at = cur;
    auto path = bfs_path(
        g, in, cur,
        [&](std::size_t v) {
          for (const auto& e : g.edges[v])
            if (in[e.target] && e.label.same_pair(pr.first, pr.second)) return true;
          return false;
        },
        &at);
    for (const auto& step : *path) {
      covered.emplace(step.second.p, step.second.q);
      cycle.push_back(step);
    }
    for (const auto& e : g.edges[at]) {
      if (in[e.target] && e.label.same_pair(pr.first, pr.second)) {
        cycle.emplace_back(at, e.label);
        covered.insert(pr);
        cur = e.target;
        break;
      }
    }
  }
  std::size_t back = start;
  auto home = bfs_path(g, in, cur, [&](std::size_t v) { return v == start; }, &back);
  cycle.insert(cycle.end(), home->begin(), home->end());
  return cycle;
}

}  // namespace

Verdict env_live(const TypeStore& store, const EnvGraph& g) {
  Verdict v;
  v.states = g.states.size();
  v.edges = g.edge_count;
  const std::size_t n = g.states.size();
  std::vector<std::set<CommPair>> enabled(n), requests(n);
  std::set<CommPair> all_requests;
  for (std::size_t i = 0; i < n; ++i) {
    enabled[i] = comm_pairs(store, g.states[i]);
    requests[i] = request_pairs(store, g.states[i]);
    all_requests.insert(requests[i].begin(), requests[i].end());
  }

  // A request for (p,q) stays pending until (p,q) fires, and a fair run that
  // never fires (p,q) can never pass a state enabling it. So a violation is a
  // state with the request from which, avoiding such states, the run can end
  // or settle in a fair component.
  for (const auto& pr : all_requests) {
    Mask h(n, 0);
    for (std::size_t i = 0; i < n; ++i) h[i] = !enabled[i].contains(pr);
    Mask target(n, 0);
    for (std::size_t i = 0; i < n; ++i) target[i] = h[i] && enabled[i].empty();
    auto comps = fair_components(g, enabled, h);
    std::vector<std::size_t> comp_of(n, static_cast<std::size_t>(-1));
    for (std::size_t c = 0; c < comps.size(); ++c)
      for (auto s : comps[c].states) {
        target[s] = 1;
        comp_of[s] = c;
      }

    // Backward closure of the targets within h.
    std::vector<std::vector<std::size_t>> preds(n);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& e : g.edges[i])
        if (h[i] && h[e.target]) preds[e.target].push_back(i);
    Mask good = target;
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < n; ++i)
      if (good[i]) todo.push_back(i);
    while (!todo.empty()) {
      auto x = todo.back();
      todo.pop_back();
      for (auto p : preds[x])
        if (!good[p]) {
          good[p] = 1;
          todo.push_back(p);
        }
    }

    Mask all(n, 1);
    std::size_t s = 0;
    auto to_s = bfs_path(
        g, all, 0, [&](std::size_t x) { return good[x] && requests[x].contains(pr); }, &s);
    if (!to_s) continue;

    std::size_t t = s;
    auto to_t = *bfs_path(g, h, s, [&](std::size_t x) { return target[x] != 0; }, &t);
    EnvLasso lasso;
    for (const auto& [x, a] : *to_s) lasso.prefix.push_back({g.states[x], a});
    for (const auto& [x, a] : to_t) lasso.prefix.push_back({g.states[x], a});
    if (comp_of[t] == static_cast<std::size_t>(-1)) {
      lasso.cycle.push_back({g.states[t], std::nullopt});
    } else {
      for (const auto& [x, a] : covering_cycle(g, comps[comp_of[t]], t))
        lasso.cycle.push_back({g.states[x], a});
    }
    v.holds = false;
    v.lasso = std::move(lasso);
    return v;
  }
  return v;
}

Verdict env_live(const TypeStore& store, const TypeEnv& env, std::size_t max_states) {
  return env_live(store, env_state_graph(store, env, max_states));
}

// ---------------------------------------------------------------- sessions

namespace {

bool can_terminate(const SessionForm& m, std::size_t depth) {
  for (const auto& [p, proc] : m) {
    bool found = false;
    for (const auto& q : process_unfoldings(proc, depth, nullptr))
      found = found || q.kind() == Process::Kind::Inact;
    if (!found) return false;
  }
  return true;
}

}  // namespace

DeadlockStatus deadlock_status(const SessionForm& m, std::size_t depth) {
  DeadlockStatus out;
  out.terminated_reachable = can_terminate(m, depth);
  if (!session_successors(m, depth).empty())
    out.kind = DeadlockKind::CanStep;
  else
    out.kind = out.terminated_reachable ? DeadlockKind::Terminated : DeadlockKind::Deadlocked;
  return out;
}

const char* to_string(DeadlockKind k) {
  switch (k) {
    case DeadlockKind::Terminated: return "Terminated";
    case DeadlockKind::CanStep: return "CanStep";
    case DeadlockKind::Deadlocked: return "Deadlocked";
  }
  return "?";
}

const char* to_string(Schedule::End e) {
  switch (e) {
    case Schedule::End::Terminated: return "Terminated";
    case Schedule::End::Deadlocked: return "Deadlocked";
    case Schedule::End::Cycle: return "Cycle";
    case Schedule::End::Truncated: return "Truncated";
  }
  return "?";
}

Schedule fair_schedule(const SessionForm& m, std::size_t max_steps, std::size_t depth) {
  Schedule out;
  SessionForm cur = m;
  std::vector<CommPair> queue;  // enabled pairs, longest waiting first
  std::map<std::pair<CommPair, SessionForm>, std::size_t> turn;
  using Config = std::tuple<SessionForm, std::vector<CommPair>,
                            std::map<std::pair<CommPair, SessionForm>, std::size_t>>;
  std::map<Config, std::size_t> seen;
  for (;;) {
    auto succ = session_successors(cur, depth);
    std::set<CommPair> en;
    for (const auto& s : succ) en.emplace(s.label.p, s.label.q);
    std::erase_if(queue, [&](const CommPair& p) { return !en.contains(p); });
    for (const auto& p : en)
      if (std::find(queue.begin(), queue.end(), p) == queue.end()) queue.push_back(p);

    if (succ.empty()) {
      out.end = can_terminate(cur, depth) ? Schedule::End::Terminated : Schedule::End::Deadlocked;
      break;
    }
    auto [it, fresh] = seen.emplace(Config{cur, queue, turn}, out.steps.size());
    if (!fresh) {
      out.end = Schedule::End::Cycle;
      out.loop_start = it->second;
      break;
    }
    if (out.steps.size() >= max_steps) {
      out.end = Schedule::End::Truncated;
      break;
    }

    auto pair = queue.front();
    std::vector<const SessionStep*> options;
    for (const auto& s : succ)
      if (s.label.same_pair(pair.first, pair.second)) options.push_back(&s);
    auto& k = turn[{pair, cur}];
    const auto* pick = options[k % options.size()];
    k = (k + 1) % options.size();
    queue.erase(queue.begin());

    out.steps.push_back({cur, en, pick->label});
    cur = pick->next;
  }
  out.last = cur;
  return out;
}

std::optional<SessionLasso> schedule_lasso(const Schedule& s) {
  if (s.end == Schedule::End::Truncated) return std::nullopt;
  SessionLasso l;
  std::size_t split = s.end == Schedule::End::Cycle ? s.loop_start : s.steps.size();
  for (std::size_t i = 0; i < s.steps.size(); ++i) {
    SessionLasso::Step step{s.steps[i].state, s.steps[i].label};
    (i < split ? l.prefix : l.cycle).push_back(std::move(step));
  }
  if (s.end != Schedule::End::Cycle) l.cycle.push_back({s.last, std::nullopt});
  return l;
}

SessionLiveVerdict session_live_bounded(const SessionForm& m, std::size_t depth,
                                        std::size_t max_states) {
  SessionLiveVerdict out;

  // Forms reachable in at most depth steps, then unfolded: the premises.
  std::set<SessionForm> premises;
  std::map<SessionForm, std::size_t> dist{{m, 0}};
  std::deque<SessionForm> frontier{m};
  while (!frontier.empty()) {
    auto f = frontier.front();
    frontier.pop_front();
    for (const auto& u : session_unfold(f, depth).forms) premises.insert(u);
    if (dist[f] == depth) continue;
    for (const auto& s : session_successors(f, depth)) {
      if (dist.contains(s.next)) continue;
      dist.emplace(s.next, dist[f] + 1);
      frontier.push_back(s.next);
    }
  }

  // Everything reachable from the premises, within the state budget.
  std::map<SessionForm, std::size_t> id;
  std::vector<const SessionForm*> forms;
  std::vector<std::vector<SessionStep>> succ;
  std::vector<char> expanded;
  auto add = [&](const SessionForm& f) {
    auto [it, fresh] = id.emplace(f, forms.size());
    if (fresh) {
      forms.push_back(&it->first);
      expanded.push_back(0);
      succ.emplace_back();
    }
    return it->second;
  };
  for (const auto& p : premises) add(p);
  for (std::size_t i = 0; i < forms.size(); ++i) {
    if (forms.size() > max_states) break;
    succ[i] = session_successors(*forms[i], depth);
    expanded[i] = 1;
    for (const auto& s : succ[i]) add(s.next);
  }
  const std::size_t n = forms.size();
  out.states = n;
  std::vector<std::vector<std::size_t>> preds(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const auto& s : succ[i]) preds[id.at(s.next)].push_back(i);

  auto backward = [&](std::vector<char> mark) {
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < n; ++i)
      if (mark[i]) todo.push_back(i);
    while (!todo.empty()) {
      auto x = todo.back();
      todo.pop_back();
      for (auto p : preds[x])
        if (!mark[p]) {
          mark[p] = 1;
          todo.push_back(p);
        }
    }
    return mark;
  };
  std::vector<char> open(n, 0);
  for (std::size_t i = 0; i < n; ++i) open[i] = !expanded[i];
  auto unknown = backward(open);

  // The acting participant is frozen until its action fires, so reaching the
  // paper's target form is the same as reaching a form where it fires.
  std::map<Participant, std::vector<char>> fires;
  auto fires_for = [&](Participant q) -> const std::vector<char>& {
    auto it = fires.find(q);
    if (it != fires.end()) return it->second;
    std::vector<char> mark(n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& s : succ[i])
        if (s.label.p == q || s.label.q == q) mark[i] = 1;
    return fires.emplace(q, backward(std::move(mark))).first->second;
  };

  bool censored = false;
  for (const auto& f : premises) {
    auto i = id.at(f);
    for (const auto& [q, proc] : f) {
      if (proc.kind() != Process::Kind::Send && proc.kind() != Process::Kind::Recv) continue;
      if (fires_for(q)[i]) continue;
      if (unknown[i]) {
        censored = true;
        continue;
      }
      out.holds = false;
      out.witness = f;
      out.stuck = q;
      return out;
    }
  }
  if (censored)
    throw Error(ErrorCode::Truncated,
                "session liveness undecided within " + std::to_string(max_states) + " states");
  return out;
}

}  // namespace mpst
