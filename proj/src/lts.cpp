#include "mpst/lts.hpp"

#include <deque>
#include <functional>

namespace mpst {

std::string render(const ActionLabel& a, const RoleNames& roles) {
  auto l = "l" + std::to_string(a.label.index);
  switch (a.kind) {
    case ActionLabel::Kind::Send:
      return roles.name(a.p) + roles.name(a.q) + "!" + l + "(" + std::string(to_string(a.sort)) + ")";
    case ActionLabel::Kind::Recv:
      return roles.name(a.p) + roles.name(a.q) + "?" + l + "(" + std::string(to_string(a.sort)) + ")";
    case ActionLabel::Kind::Comm:
      return "(" + roles.name(a.p) + "," + roles.name(a.q) + ")" + l;
  }
  return "?";
}

// ---------------------------------------------------------------- environments

std::set<ActionLabel> env_enabled(const TypeStore& store, const TypeEnv& env) {
  std::set<ActionLabel> out;
  for (const auto& [p, h] : env) {
    const auto& n = store.node(h);
    if (n.head == Head::Send)
      for (const auto& b : n.branches) out.insert(ActionLabel::send(p, n.peer(), b.label, b.sort));
    if (n.head == Head::Recv)
      for (const auto& b : n.branches) out.insert(ActionLabel::recv(p, n.peer(), b.label, b.sort));
  }
  std::set<ActionLabel> comms;
  for (const auto& a : out) {
    if (a.kind != ActionLabel::Kind::Send) continue;
    auto it = env.find(a.q);
    if (it == env.end()) continue;
    const auto& peer = store.node(it->second);
    if (peer.head != Head::Recv || peer.peer() != a.p) continue;
    const auto* b = peer.find(a.label);
    if (b && subsort(a.sort, b->sort)) comms.insert(ActionLabel::comm(a.p, a.q, a.label));
  }
  out.insert(comms.begin(), comms.end());
  return out;
}

namespace {

// Continuations of sender and receiver, if the Comm label is enabled.
std::optional<std::pair<TreeHandle, TreeHandle>> comm_targets(const TypeStore& store,
                                                              const TypeEnv& env,
                                                              const ActionLabel& a) {
  if (a.kind != ActionLabel::Kind::Comm || a.p == a.q) return std::nullopt;
  auto sp = env.find(a.p);
  auto rq = env.find(a.q);
  if (sp == env.end() || rq == env.end()) return std::nullopt;
  const auto& s = store.node(sp->second);
  const auto& r = store.node(rq->second);
  if (s.head != Head::Send || s.peer() != a.q || r.head != Head::Recv || r.peer() != a.p)
    return std::nullopt;
  const auto* bs = s.find(a.label);
  const auto* br = r.find(a.label);
  if (!bs || !br || !subsort(bs->sort, br->sort)) return std::nullopt;
  return std::make_pair(bs->child, br->child);
}

}  // namespace

bool env_can_step(const TypeStore& store, const TypeEnv& env, const ActionLabel& comm) {
  return comm_targets(store, env, comm).has_value();
}

TypeEnv env_step(const TypeStore& store, const TypeEnv& env, const ActionLabel& comm) {
  auto t = comm_targets(store, env, comm);
  if (!t) throw Error(ErrorCode::NotEnabled, "communication is not enabled in the environment");
  TypeEnv next = env;
  next[comm.p] = t->first;
  next[comm.q] = t->second;
  return next;
}

EnvGraph env_state_graph(const TypeStore& store, const TypeEnv& env, std::size_t max_states) {
  EnvGraph g;
  g.states.push_back(env);
  g.index.emplace(env, 0);
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    std::vector<EnvGraph::Edge> out;
    for (const auto& a : env_enabled(store, g.states[i])) {
      if (a.kind != ActionLabel::Kind::Comm) continue;
      auto next = env_step(store, g.states[i], a);
      auto [it, fresh] = g.index.emplace(next, g.states.size());
      if (fresh) {
        if (g.states.size() >= max_states)
          throw Error(ErrorCode::StateBudgetExceeded,
                      "more than " + std::to_string(max_states) + " environment states");
        g.states.push_back(std::move(next));
      }
      out.push_back({a, it->second});
    }
    g.edge_count += out.size();
    g.edges.push_back(std::move(out));
  }
  return g;
}

// ---------------------------------------------------------------- global types

std::optional<TreeHandle> global_step(TypeStore& store, TreeHandle g, const ActionLabel& a) {
  if (a.kind != ActionLabel::Kind::Comm) return std::nullopt;
  auto nodes = store.reachable(g);
  std::unordered_map<TreeHandle, std::size_t> idx;
  for (std::size_t i = 0; i < nodes.size(); ++i) idx.emplace(nodes[i], i);

  // Direct: the root is the communication itself. Context: the root is
  // disjoint from it and every child contains both parties and steps too.
  enum class Role : std::uint8_t { Dead, Direct, Context };
  std::vector<Role> role(nodes.size(), Role::Dead);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = store.node(nodes[i]);
    if (n.head != Head::Comm) continue;
    if (n.from == a.p && n.to == a.q) {
      if (n.find(a.label)) role[i] = Role::Direct;
    } else if (n.from != a.p && n.from != a.q && n.to != a.p && n.to != a.q) {
      bool ok = true;
      for (const auto& b : n.branches)
        ok = ok && store.has_participant(b.child, a.p) && store.has_participant(b.child, a.q);
      if (ok) role[i] = Role::Context;
    }
  }
  // Greatest fixpoint: drop context nodes with a child that cannot step.
  std::vector<std::vector<std::size_t>> preds(nodes.size());
  std::vector<std::size_t> dead;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (role[i] == Role::Dead) dead.push_back(i);
    if (role[i] != Role::Context) continue;
    for (const auto& b : store.node(nodes[i]).branches) preds[idx.at(b.child)].push_back(i);
  }
  while (!dead.empty()) {
    auto v = dead.back();
    dead.pop_back();
    for (auto u : preds[v]) {
      if (role[u] != Role::Context) continue;
      role[u] = Role::Dead;
      dead.push_back(u);
    }
  }
  if (role[0] == Role::Dead) return std::nullopt;
  if (role[0] == Role::Direct) return store.node(g).find(a.label)->child;

  RawGraph raw;
  std::unordered_map<std::size_t, std::uint32_t> slot;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (role[i] == Role::Context) slot.emplace(i, raw.add_alias());
  auto result_ref = [&](std::size_t i) {
    if (role[i] == Role::Direct) return RawRef::tree(store.node(nodes[i]).find(a.label)->child);
    return RawRef::raw(slot.at(i));
  };
  for (auto [i, s] : slot) {
    const auto& n = store.node(nodes[i]);
    RawGraph::Node out;
    out.domain = Domain::Global;
    out.head = Head::Comm;
    out.from = n.from;
    out.to = n.to;
    for (const auto& b : n.branches) out.branches.push_back({b.label, b.sort, result_ref(idx.at(b.child))});
    raw.nodes[s].target = RawRef::raw(raw.add(std::move(out)));
  }
  return store.intern_graph(raw, result_ref(0));
}

std::set<ActionLabel> global_enabled(TypeStore& store, TreeHandle g) {
  std::set<ActionLabel> candidates, out;
  for (auto h : store.reachable(g)) {
    const auto& n = store.node(h);
    if (n.head != Head::Comm) continue;
    for (const auto& b : n.branches) candidates.insert(ActionLabel::comm(n.from, n.to, b.label));
  }
  for (const auto& a : candidates)
    if (global_step(store, g, a)) out.insert(a);
  return out;
}

// ---------------------------------------------------------------- expressions

std::set<Value> eval_expr(const Expr& e, const Bindings& env) {
  auto numeric = [](const Value& v) { return v.sort != Sort::Bool; };
  switch (e.kind()) {
    case Expr::Kind::Var: {
      auto it = env.find(e.name());
      if (it == env.end()) throw Error(ErrorCode::UnboundVariable, "unbound variable '" + e.name() + "'");
      return {it->second};
    }
    case Expr::Kind::Lit:
      return {e.value()};
    case Expr::Kind::Succ: {
      std::set<Value> out;
      for (const auto& v : eval_expr(e.operand(), env)) {
        if (!numeric(v)) throw Error(ErrorCode::SortError, "succ applied to a boolean");
        out.insert(Value{v.sort, v.number + 1});
      }
      return out;
    }
    case Expr::Kind::Neg: {
      std::set<Value> out;
      for (const auto& v : eval_expr(e.operand(), env)) {
        if (!numeric(v)) throw Error(ErrorCode::SortError, "neg applied to a boolean");
        out.insert(Value::integer(-v.number));
      }
      return out;
    }
    case Expr::Kind::Not: {
      std::set<Value> out;
      for (const auto& v : eval_expr(e.operand(), env)) {
        if (numeric(v)) throw Error(ErrorCode::SortError, "not applied to a number");
        out.insert(Value::boolean(v.number == 0));
      }
      return out;
    }
    case Expr::Kind::Choice: {
      auto l = eval_expr(e.operand(), env);
      auto r = eval_expr(e.rhs(), env);
      std::set<Value> all = l;
      all.insert(r.begin(), r.end());
      bool any_bool = false, any_num = false, any_int = false;
      for (const auto& v : all) {
        any_bool = any_bool || !numeric(v);
        any_num = any_num || numeric(v);
        any_int = any_int || v.sort == Sort::Int;
      }
      if (any_bool && any_num) throw Error(ErrorCode::SortError, "choice between boolean and number");
      if (!any_int) return all;
      std::set<Value> out;
      for (const auto& v : all) out.insert(Value::integer(v.number));
      return out;
    }
  }
  return {};
}

// ---------------------------------------------------------------- sessions

std::set<Process> process_unfoldings(const Process& p, std::size_t depth, bool* truncated) {
  std::set<Process> seen{p};
  std::vector<Process> frontier{p};
  for (std::size_t layer = 0; !frontier.empty(); ++layer) {
    std::vector<Process> next;
    auto add = [&](Process q) {
      if (seen.insert(q).second) next.push_back(std::move(q));
    };
    for (const auto& q : frontier) {
      if (q.kind() == Process::Kind::Rec) {
        add(unfold_rec(q));
      } else if (q.kind() == Process::Kind::Ite) {
        for (const auto& v : eval_expr(q.payload())) {
          if (v.sort != Sort::Bool) throw Error(ErrorCode::SortError, "conditional guard is not boolean");
          add(v.number ? q.then_branch() : q.else_branch());
        }
      }
    }
    if (!next.empty() && layer + 1 > depth) {
      if (truncated) *truncated = true;
      break;
    }
    frontier = std::move(next);
  }
  return seen;
}

UnfoldResult session_unfold(const SessionForm& m, std::size_t depth) {
  UnfoldResult out;
  std::vector<std::pair<Participant, std::vector<Process>>> options;
  for (const auto& [p, proc] : m) {
    auto u = process_unfoldings(proc, depth, &out.truncated);
    options.emplace_back(p, std::vector<Process>(u.begin(), u.end()));
  }
  // Internal steps of different participants are independent: take the product.
  SessionForm cur;
  std::function<void(std::size_t)> build = [&](std::size_t i) {
    if (i == options.size()) {
      out.forms.insert(cur);
      return;
    }
    for (const auto& proc : options[i].second) {
      cur.insert_or_assign(options[i].first, proc);
      build(i + 1);
    }
  };
  build(0);
  return out;
}

std::vector<SessionStep> session_successors(const SessionForm& m, std::size_t depth, bool* truncated) {
  std::set<SessionStep> out;
  std::map<Participant, std::set<Process>> unf;
  for (const auto& [p, proc] : m) unf.emplace(p, process_unfoldings(proc, depth, truncated));
  for (const auto& [receiver, recv_forms] : unf) {
    for (const auto& pr : recv_forms) {
      if (pr.kind() != Process::Kind::Recv) continue;
      auto sender = pr.peer();
      auto it = unf.find(sender);
      if (it == unf.end() || sender == receiver) continue;
      for (const auto& ps : it->second) {
        if (ps.kind() != Process::Kind::Send || ps.peer() != receiver) continue;
        const auto* branch = pr.find_branch(ps.label());
        if (!branch) continue;
        for (const auto& v : eval_expr(ps.payload())) {
          SessionForm next = m;
          next.insert_or_assign(receiver, substitute_value(branch->body, branch->binder, v));
          next.insert_or_assign(sender, ps.body());
          out.insert({ActionLabel::comm(sender, receiver, ps.label()), std::move(next)});
        }
      }
    }
  }
  return {out.begin(), out.end()};
}

std::vector<SessionStep> session_enabled(const SessionForm& m, std::size_t depth) {
  std::set<SessionStep> out;
  for (const auto& s : session_successors(m, depth)) {
    for (const auto& f : session_unfold(s.next, depth).forms) out.insert({s.label, f});
  }
  return {out.begin(), out.end()};
}

std::set<SessionForm> session_step(const SessionForm& m, const ActionLabel& comm, std::size_t depth) {
  std::set<SessionForm> out;
  for (const auto& s : session_enabled(m, depth))
    if (s.label == comm) out.insert(s.next);
  return out;
}

bool all_inactive(const SessionForm& m) {
  for (const auto& [p, proc] : m)
    if (proc.kind() != Process::Kind::Inact) return false;
  return true;
}

}  // namespace mpst
