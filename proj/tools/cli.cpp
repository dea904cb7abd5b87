#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <random>
#include <sstream>

#include "mpst/corpus.hpp"
#include "mpst/lts.hpp"
#include "mpst/properties.hpp"
#include "mpst/subtyping.hpp"
#include "mpst/typecheck.hpp"

namespace mpst::cli {

using json = nlohmann::json;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

struct InputFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

struct Options {
  bool json = false;
  std::string emit;
  std::size_t max_states = 100000;
  std::size_t depth = 64;
  std::uint64_t seed = 1;
  bool no_balance_check = false;
};

struct Invocation {
  Options opt;
  RoleNames roles;
  TypeStore store;
  json inputs = json::array();
  json verdict = json::object();
  json counterexample;
  json stats = json::object();
  std::ostringstream text;
  std::string dot;

  std::string load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputFailure("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    auto s = ss.str();
    inputs.push_back({{"path", path}, {"fnv1a", hex(fnv1a(s))}});
    return s;
  }
  TreeHandle global(const std::string& path) {
    return store.intern_global(parse_global(load(path), roles));
  }
  TreeHandle local(const std::string& path) {
    return store.intern_local(parse_local(load(path), roles));
  }
  TypeEnv env(const std::string& path) { return intern_env(store, parse_env(load(path), roles)); }
  SessionForm session(const std::string& path) { return parse_session(load(path), roles); }

  std::string show(TreeHandle h) const { return render(store, h, roles); }
  std::string show(const TypeEnv& e) const { return render(store, e, roles); }
  std::string show(const SessionForm& m) const { return render(m, roles); }
  std::string show(const ActionLabel& a) const { return render(a, roles); }
  bool dot_wanted() const { return opt.emit == "dot"; }
};

// ---- rendering helpers

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

template <class State, class Show>
json lasso_json(const Lasso<State>& l, Show show, const Invocation& inv) {
  auto steps = [&](const auto& v) {
    json a = json::array();
    for (const auto& s : v)
      a.push_back({{"state", show(s.state)}, {"label", s.label ? json(inv.show(*s.label)) : json(nullptr)}});
    return a;
  };
  return {{"prefix", steps(l.prefix)}, {"cycle", steps(l.cycle)}};
}

template <class State, class Show>
void lasso_text(std::ostream& os, const Lasso<State>& l, Show show, const Invocation& inv) {
  auto steps = [&](const auto& v) {
    for (const auto& s : v) {
      os << "    " << show(s.state) << "\n";
      os << "      " << (s.label ? "--" + inv.show(*s.label) + "-->" : std::string("(stutter)")) << "\n";
    }
  };
  os << "  prefix:\n";
  steps(l.prefix);
  os << "  cycle:\n";
  steps(l.cycle);
}

/// Labels along a shortest path from state 0 to target.
std::vector<ActionLabel> trace_to(const EnvGraph& g, std::size_t target) {
  std::vector<std::optional<std::pair<std::size_t, ActionLabel>>> parent(g.states.size());
  std::vector<bool> seen(g.states.size());
  std::deque<std::size_t> todo{0};
  seen[0] = true;
  while (!todo.empty()) {
    auto u = todo.front();
    todo.pop_front();
    if (u == target) break;
    for (const auto& e : g.edges[u]) {
      if (seen[e.target]) continue;
      seen[e.target] = true;
      parent[e.target] = {{u, e.label}};
      todo.push_back(e.target);
    }
  }
  std::vector<ActionLabel> out;
  for (auto v = target; parent[v]; v = parent[v]->first) out.push_back(parent[v]->second);
  return {out.rbegin(), out.rend()};
}

std::string env_dot(const Invocation& inv, const EnvGraph& g, const std::set<std::size_t>& hot_nodes,
                    const std::set<std::pair<std::size_t, std::size_t>>& hot_edges) {
  std::ostringstream os;
  os << "digraph env {\n  rankdir=LR;\n  node [shape=box, fontname=\"monospace\"];\n";
  for (std::size_t i = 0; i < g.states.size(); ++i) {
    std::string label;
    for (const auto& [p, h] : g.states[i]) label += dot_escape(inv.roles.name(p) + " : " + inv.show(h)) + "\\l";
    if (g.states[i].empty()) label = "(empty)";
    os << "  s" << i << " [label=\"" << label << "\"";
    if (hot_nodes.contains(i)) os << ", color=red, penwidth=2";
    if (i == 0) os << ", peripheries=2";
    os << "];\n";
  }
  for (std::size_t i = 0; i < g.states.size(); ++i)
    for (const auto& e : g.edges[i]) {
      os << "  s" << i << " -> s" << e.target << " [label=\"" << dot_escape(inv.show(e.label)) << "\"";
      if (hot_edges.contains({i, e.target})) os << ", color=red, penwidth=2";
      os << "];\n";
    }
  os << "}\n";
  return os.str();
}

// ---- commands

int cmd_project(Invocation& inv, const std::string& file, const std::string& role) {
  auto g = inv.global(file);
  std::vector<Participant> targets;
  if (!role.empty())
    targets.push_back(inv.roles.intern(role));
  else
    targets = inv.store.participants(g);
  json projections = json::object();
  bool ok = true;
  for (auto p : targets) {
    auto name = inv.roles.name(p);
    auto t = project(inv.store, g, p);
    if (!t) {
      ok = false;
      projections[name] = nullptr;
      inv.text << "no projection onto " << name << "\n";
      continue;
    }
    projections[name] = inv.show(*t);
    if (role.empty()) inv.text << name << " : ";
    inv.text << inv.show(*t) << "\n";
    if (!role.empty() && inv.dot_wanted()) inv.dot = to_dot(inv.store, *t, inv.roles);
  }
  if (role.empty() && inv.dot_wanted()) inv.dot = to_dot(inv.store, g, inv.roles);
  inv.verdict = {{"projectable", ok}, {"projections", projections}};
  return ok ? Holds : Refuted;
}

int cmd_subtype(Invocation& inv, const std::string& fa, const std::string& fb) {
  auto a = inv.local(fa);
  auto b = inv.local(fb);
  auto res = check_subtype(inv.store, a, b);
  inv.verdict = {{"result", res.holds}};
  inv.text << (res.holds ? "true" : "false") << "\n";
  if (!res.holds && res.witness) {
    auto [x, y] = *res.witness;
    inv.counterexample = {{"sub", inv.show(x)}, {"sup", inv.show(y)}, {"reason", res.reason}};
    inv.text << "witness: " << inv.show(x) << "  vs  " << inv.show(y) << "\n";
    if (!res.reason.empty()) inv.text << "reason: " << res.reason << "\n";
  }
  return res.holds ? Holds : Refuted;
}

int cmd_assoc(Invocation& inv, const std::string& fe, const std::string& fg) {
  auto env = inv.env(fe);
  auto g = inv.global(fg);
  AssocReport rep;
  try {
    rep = check_associated(inv.store, env, g, !inv.opt.no_balance_check);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PreconditionViolation) throw;
    inv.verdict = {{"associated", false}, {"reason", e.what()}};
    inv.text << "not associated: " << e.what() << "\n";
    return Refuted;
  }
  json entries = json::object();
  for (const auto& [p, e] : rep.entries) {
    auto name = inv.roles.name(p);
    json j = {{"ok", e.ok},
              {"actual", e.actual ? json(inv.show(*e.actual)) : json(nullptr)},
              {"projection", e.projection ? json(inv.show(*e.projection)) : json(nullptr)}};
    if (!e.note.empty()) j["note"] = e.note;
    if (!e.subtype.holds && e.subtype.witness)
      j["witness"] = {{"sub", inv.show(e.subtype.witness->first)},
                      {"sup", inv.show(e.subtype.witness->second)},
                      {"reason", e.subtype.reason}};
    entries[name] = j;
    inv.text << (e.ok ? "ok   " : "FAIL ") << name;
    if (!e.note.empty()) inv.text << ": " << e.note;
    inv.text << "\n";
  }
  inv.verdict = {{"associated", rep.holds}, {"entries", entries}};
  inv.text << (rep.holds ? "associated" : "not associated") << "\n";
  return rep.holds ? Holds : Refuted;
}

int cmd_safety(Invocation& inv, const std::string& file) {
  auto env = inv.env(file);
  auto g = env_state_graph(inv.store, env, inv.opt.max_states);
  auto v = safe(inv.store, g);
  inv.stats = {{"states", g.states.size()}, {"edges", g.edge_count}};
  inv.verdict = {{"safe", v.holds}};
  std::set<std::size_t> hot;
  if (v.bad_state) {
    auto idx = g.index.at(*v.bad_state);
    hot.insert(idx);
    json trace = json::array();
    for (const auto& a : trace_to(g, idx)) trace.push_back(inv.show(a));
    inv.counterexample = {{"state", inv.show(*v.bad_state)}, {"trace", trace}};
    inv.text << "unsafe\n  reached by:";
    for (const auto& a : trace) inv.text << " " << a.get<std::string>();
    if (trace.empty()) inv.text << " (initial)";
    inv.text << "\n  state: " << inv.show(*v.bad_state) << "\n";
  } else {
    inv.text << "safe (" << g.states.size() << " states)\n";
  }
  if (inv.dot_wanted()) inv.dot = env_dot(inv, g, hot, {});
  return v.holds ? Holds : Refuted;
}

int cmd_live(Invocation& inv, const std::string& file) {
  auto env = inv.env(file);
  auto g = env_state_graph(inv.store, env, inv.opt.max_states);
  auto v = env_live(inv.store, g);
  inv.stats = {{"states", g.states.size()}, {"edges", g.edge_count}};
  inv.verdict = {{"live", v.holds}};
  std::set<std::size_t> hot;
  std::set<std::pair<std::size_t, std::size_t>> hot_edges;
  if (v.lasso) {
    const auto& l = *v.lasso;
    auto show = [&](const TypeEnv& e) { return inv.show(e); };
    inv.counterexample = lasso_json(l, show, inv);
    inv.counterexample["fair"] = lasso_fair(inv.store, l);
    inv.counterexample["live"] = lasso_live(inv.store, l);
    inv.text << "not live; fair counterexample:\n";
    lasso_text(inv.text, l, show, inv);
    for (std::size_t i = 0; i < l.cycle.size(); ++i) {
      auto u = g.index.at(l.cycle[i].state);
      hot.insert(u);
      if (l.cycle[i].label) hot_edges.insert({u, g.index.at(l.cycle[(i + 1) % l.cycle.size()].state)});
    }
  } else {
    inv.text << "live (" << g.states.size() << " states)\n";
  }
  if (inv.dot_wanted()) inv.dot = env_dot(inv, g, hot, hot_edges);
  return v.holds ? Holds : Refuted;
}

int cmd_typecheck(Invocation& inv, const std::string& file, const std::string& fe, const std::string& fg) {
  auto m = inv.session(file);
  auto env = inv.env(fe);
  TypingVerdict v;
  if (!fg.empty()) {
    auto g = inv.global(fg);
    v = check_session(inv.store, m, env, g, !inv.opt.no_balance_check, &inv.roles);
  } else {
    std::set<Participant> dm, de;
    for (const auto& [p, proc] : m) dm.insert(p);
    for (const auto& [p, t] : env) de.insert(p);
    if (dm != de) {
      v.holds = false;
      v.failure = TypingFailure{TypingErrorKind::DomainMismatch,
                                "session and environment cover different participants", {}, std::nullopt};
    }
    for (const auto& [p, proc] : m) {
      if (!v.holds) break;
      v = check_process(inv.store, proc, env.at(p), &inv.roles);
      if (!v.holds && v.failure) v.failure->participant = p;
    }
  }
  inv.verdict = {{"typed", v.holds}};
  if (!v.holds && v.failure) {
    const auto& f = *v.failure;
    inv.counterexample = {{"kind", to_string(f.kind)},
                          {"message", f.message},
                          {"line", f.pos.line},
                          {"column", f.pos.column},
                          {"participant", f.participant ? json(inv.roles.name(*f.participant)) : json(nullptr)}};
    inv.text << file << ":" << f.pos.line << ":" << f.pos.column << ": " << to_string(f.kind) << ": "
             << f.message << "\n";
  } else if (!v.holds) {
    inv.text << "not typed\n";
  } else {
    inv.text << "typed\n";
  }
  return v.holds ? Holds : Refuted;
}

template <class State>
struct Successor {
  ActionLabel label;
  State next;
};

/// Runs a state machine under a named policy. `fair` serves the enabled pair
/// that has waited longest and rotates through its alternatives.
template <class State>
int simulate(Invocation& inv, const State& start, std::size_t steps, const std::string& policy,
             const std::function<std::vector<Successor<State>>(const State&)>& succ,
             const std::function<const char*(const State&)>& end_kind,
             const std::function<std::string(const State&)>& show) {
  std::mt19937_64 rng(inv.opt.seed);
  std::vector<CommPair> queue;
  std::map<CommPair, std::size_t> turn;
  State cur = start;
  json trace = json::array();
  const char* end = "Truncated";
  for (std::size_t i = 0;; ++i) {
    auto next = succ(cur);
    if (next.empty()) {
      end = end_kind(cur);
      break;
    }
    if (i == steps) break;
    std::set<CommPair> en;
    for (const auto& s : next) en.emplace(s.label.p, s.label.q);
    std::erase_if(queue, [&](const CommPair& c) { return !en.contains(c); });
    for (const auto& c : en)
      if (std::find(queue.begin(), queue.end(), c) == queue.end()) queue.push_back(c);
    std::size_t pick = 0;
    if (policy == "random") {
      pick = rng() % next.size();
    } else if (policy == "fair") {
      auto pair = queue.front();
      std::vector<std::size_t> alts;
      for (std::size_t k = 0; k < next.size(); ++k)
        if (next[k].label.same_pair(pair.first, pair.second)) alts.push_back(k);
      pick = alts[turn[pair]++ % alts.size()];
      queue.erase(queue.begin());
    }
    trace.push_back({{"state", show(cur)}, {"label", inv.show(next[pick].label)}});
    inv.text << std::setw(4) << i << "  " << inv.show(next[pick].label) << "\n";
    cur = next[pick].next;
  }
  inv.text << "end: " << end << "\n  " << show(cur) << "\n";
  inv.verdict = {{"end", end}, {"final", show(cur)}};
  inv.counterexample = nullptr;
  inv.stats = {{"steps", trace.size()}};
  inv.verdict["trace"] = trace;
  return std::string(end) == "Deadlocked" ? Refuted : Holds;
}

int cmd_simulate(Invocation& inv, const std::string& file, std::size_t steps, const std::string& policy) {
  auto ext = std::filesystem::path(file).extension().string();
  if (ext == ".env") {
    auto env = inv.env(file);
    std::function<std::vector<Successor<TypeEnv>>(const TypeEnv&)> succ = [&](const TypeEnv& e) {
      std::vector<Successor<TypeEnv>> out;
      for (const auto& a : env_enabled(inv.store, e))
        if (a.kind == ActionLabel::Kind::Comm) out.push_back({a, env_step(inv.store, e, a)});
      return out;
    };
    std::function<const char*(const TypeEnv&)> end = [&](const TypeEnv& e) {
      for (const auto& [p, h] : e)
        if (inv.store.node(h).head != Head::End) return "Stuck";
      return "Terminated";
    };
    std::function<std::string(const TypeEnv&)> show = [&](const TypeEnv& e) { return inv.show(e); };
    return simulate<TypeEnv>(inv, env, steps, policy, succ, end, show);
  }
  if (ext == ".gt") {
    auto g = inv.global(file);
    std::function<std::vector<Successor<TreeHandle>>(const TreeHandle&)> succ = [&](const TreeHandle& h) {
      std::vector<Successor<TreeHandle>> out;
      for (const auto& a : global_enabled(inv.store, h)) out.push_back({a, *global_step(inv.store, h, a)});
      return out;
    };
    std::function<const char*(const TreeHandle&)> end = [](const TreeHandle&) { return "Terminated"; };
    std::function<std::string(const TreeHandle&)> show = [&](const TreeHandle& h) { return inv.show(h); };
    return simulate<TreeHandle>(inv, g, steps, policy, succ, end, show);
  }
  if (ext != ".sn") throw InputFailure("simulate expects a .sn, .env or .gt file");
  auto m = inv.session(file);
  std::size_t depth = inv.opt.depth;
  std::function<std::vector<Successor<SessionForm>>(const SessionForm&)> succ = [depth](const SessionForm& s) {
    std::vector<Successor<SessionForm>> out;
    for (auto& st : session_successors(s, depth)) out.push_back({st.label, std::move(st.next)});
    return out;
  };
  std::function<const char*(const SessionForm&)> end = [depth](const SessionForm& s) {
    return deadlock_status(s, depth).kind == DeadlockKind::Terminated ? "Terminated" : "Deadlocked";
  };
  std::function<std::string(const SessionForm&)> show = [&](const SessionForm& s) { return inv.show(s); };
  if (policy != "fair") return simulate<SessionForm>(inv, m, steps, policy, succ, end, show);

  auto sched = fair_schedule(m, steps, depth);
  json trace = json::array();
  for (std::size_t i = 0; i < sched.steps.size(); ++i) {
    const auto& s = sched.steps[i];
    trace.push_back({{"state", inv.show(s.state)}, {"label", inv.show(s.label)}});
    inv.text << std::setw(4) << i << "  " << inv.show(s.label) << "\n";
  }
  inv.text << "end: " << to_string(sched.end);
  if (sched.end == Schedule::End::Cycle) inv.text << " (repeats from step " << sched.loop_start << ")";
  inv.text << "\n  " << inv.show(sched.last) << "\n";
  inv.verdict = {{"end", to_string(sched.end)}, {"final", inv.show(sched.last)}, {"trace", trace}};
  if (sched.end == Schedule::End::Cycle) inv.verdict["loop_start"] = sched.loop_start;
  inv.stats = {{"steps", sched.steps.size()}};
  return sched.end == Schedule::End::Deadlocked ? Refuted : Holds;
}

int cmd_dlock(Invocation& inv, const std::string& file) {
  auto m0 = inv.session(file);
  std::vector<SessionForm> forms{m0};
  std::vector<std::optional<std::pair<std::size_t, ActionLabel>>> parent{std::nullopt};
  std::map<SessionForm, std::size_t> index{{m0, 0}};
  auto initial = deadlock_status(m0, inv.opt.depth);
  std::optional<std::size_t> stuck;
  for (std::size_t i = 0; i < forms.size() && !stuck; ++i) {
    if (deadlock_status(forms[i], inv.opt.depth).kind == DeadlockKind::Deadlocked) {
      stuck = i;
      break;
    }
    bool truncated = false;
    auto succ = session_successors(forms[i], inv.opt.depth, &truncated);
    if (truncated) throw Error(ErrorCode::Truncated, "unfolding depth exhausted; raise --depth");
    for (auto& s : succ) {
      if (index.contains(s.next)) continue;
      if (forms.size() >= inv.opt.max_states)
        throw Error(ErrorCode::StateBudgetExceeded,
                    "more than " + std::to_string(inv.opt.max_states) + " reachable sessions");
      index.emplace(s.next, forms.size());
      forms.push_back(s.next);
      parent.push_back({{i, s.label}});
    }
  }
  inv.stats = {{"states", forms.size()}};
  inv.verdict = {{"deadlock_free", !stuck.has_value()},
                 {"initial", to_string(initial.kind)},
                 {"terminated_reachable", initial.terminated_reachable}};
  if (!stuck) {
    inv.text << "deadlock-free (" << forms.size() << " sessions; initial: " << to_string(initial.kind) << ")\n";
    return Holds;
  }
  std::vector<std::string> labels;
  for (auto v = *stuck; parent[v]; v = parent[v]->first) labels.push_back(inv.show(parent[v]->second));
  std::reverse(labels.begin(), labels.end());
  inv.counterexample = {{"state", inv.show(forms[*stuck])}, {"trace", labels}};
  inv.text << "Deadlocked\n  reached by:";
  for (const auto& l : labels) inv.text << " " << l;
  if (labels.empty()) inv.text << " (initial)";
  inv.text << "\n  state: " << inv.show(forms[*stuck]) << "\n";
  return Refuted;
}

int cmd_slive(Invocation& inv, const std::string& file) {
  auto m = inv.session(file);
  auto v = session_live_bounded(m, inv.opt.depth, inv.opt.max_states);
  inv.stats = {{"states", v.states}};
  inv.verdict = {{"live", v.holds}, {"depth", inv.opt.depth}};
  if (v.holds) {
    inv.text << "live up to depth " << inv.opt.depth << " (" << v.states << " sessions)\n";
    return Holds;
  }
  inv.counterexample = {{"state", v.witness ? json(inv.show(*v.witness)) : json(nullptr)},
                        {"participant", v.stuck ? json(inv.roles.name(*v.stuck)) : json(nullptr)}};
  inv.text << "not live";
  if (v.stuck) inv.text << ": " << inv.roles.name(*v.stuck) << " never fires its action";
  inv.text << "\n";
  if (v.witness) inv.text << "  state: " << inv.show(*v.witness) << "\n";
  return Refuted;
}

void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputFailure("cannot write " + p.string());
  out << content;
}

int cmd_gen(Invocation& inv, std::size_t count, const std::string& dir, CorpusParams params) {
  params.balanced_only = !inv.opt.no_balance_check;
  auto corpus = generate_corpus(inv.store, inv.roles, inv.opt.seed, count, params);
  std::filesystem::create_directories(dir);
  json files = json::array();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& pr = corpus[i];
    std::ostringstream stem;
    stem << "proto_" << std::setw(4) << std::setfill('0') << i;
    auto base = std::filesystem::path(dir) / stem.str();
    EnvSyntax env;
    for (const auto& [p, h] : pr.env) env.emplace(p, inv.store.to_syntax(h));
    std::string gt = render(pr.global, inv.roles) + "\n";
    std::string en = render(env, inv.roles);
    std::string sn = render(pr.session, inv.roles) + "\n";
    write_file(base.string() + ".gt", gt);
    write_file(base.string() + ".env", en);
    write_file(base.string() + ".sn", sn);
    files.push_back({{"global", base.string() + ".gt"},
                     {"env", base.string() + ".env"},
                     {"session", base.string() + ".sn"},
                     {"fnv1a", hex(fnv1a(gt + en + sn))}});
    inv.text << base.string() << ".{gt,env,sn}  " << render(pr.global, inv.roles) << "\n";
  }
  inv.verdict = {{"protocols", files}, {"seed", inv.opt.seed}};
  inv.stats = {{"count", corpus.size()}};
  return Holds;
}

int cmd_selftest(Invocation& inv) {
  auto& st = inv.store;
  auto& roles = inv.roles;
  auto env_of = [&](const char* text) { return intern_env(st, parse_env(text, roles)); };
  auto glob = [&](const char* text) { return st.intern_global(parse_global(text, roles)); };
  auto loc = [&](const char* text) { return st.intern_local(parse_local(text, roles)); };
  auto p = roles.intern("p"), q = roles.intern("q"), r = roles.intern("r");

  auto gamma = env_of(
      "p : rec X . q (+) { l0(int). X, l1(int). end }\n"
      "q : rec X . p & { l0(int). X, l1(int). r (+) { l2(int). end } }\n"
      "r : q & { l2(int). end }\n");
  auto gamma1 = env_of("p : end\nq : r (+) { l2(int). end }\nr : q & { l2(int). end }\n");
  auto gamma_end = env_of("p : end\nq : end\nr : end\n");
  auto gex = glob("rec X . p -> q { l0(int). X, l1(int). q -> r { l2(int). end } }");
  auto stuck = parse_session("p <| mu X . q!l0(0). X || q <| 0", roles);

  std::vector<std::pair<std::string, std::function<bool()>>> checks = {
      {"environment reductions",
       [&] {
         return env_step(st, gamma, ActionLabel::comm(p, q, Label{0})) == gamma &&
                env_step(st, gamma, ActionLabel::comm(p, q, Label{1})) == gamma1 &&
                env_step(st, gamma1, ActionLabel::comm(q, r, Label{2})) == gamma_end;
       }},
      {"int/nat environment is unsafe",
       [&] { return !safe(st, env_of("p : q (+) { l0(int). end }\nq : p & { l0(nat). end }\n")).holds; }},
      {"running environment is safe", [&] { return safe(st, gamma).holds; }},
      {"running environment is not live",
       [&] {
         auto v = env_live(st, gamma);
         return !v.holds && v.lasso && lasso_fair(st, *v.lasso) && !lasso_live(st, *v.lasso);
       }},
      {"running global type is unbalanced", [&] { return !balanced(st, gex); }},
      {"projections of the running global type",
       [&] {
         return project(st, gex, p) == loc("rec X . q (+) { l0(int). X, l1(int). end }") &&
                project(st, gex, q) == loc("rec X . p & { l0(int). X, l1(int). r (+) { l2(int). end } }") &&
                project(st, gex, r) == loc("q & { l2(int). end }");
       }},
      {"subtyped environment is associated",
       [&] {
         return associated(st, env_of("p : q (+) { l0(int). end }\nq : p & { l0(int). end, l1(int). end }\n"),
                           glob("p -> q { l0(int). end, l1(int). end }"));
       }},
      {"stuck session deadlocks",
       [&] {
         return deadlock_status(stuck, inv.opt.depth).kind == DeadlockKind::Deadlocked &&
                !session_live_bounded(stuck, 8).holds;
       }},
  };
  json results = json::object();
  bool all = true;
  for (const auto& [name, f] : checks) {
    bool ok = false;
    try {
      ok = f();
    } catch (const std::exception&) {
      ok = false;
    }
    all = all && ok;
    results[name] = ok;
    inv.text << (ok ? "ok   " : "FAIL ") << name << "\n";
  }
  inv.verdict = {{"passed", all}, {"checks", results}};
  return all ? Holds : Refuted;
}

int exit_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::StateBudgetExceeded:
    case ErrorCode::Truncated:
    case ErrorCode::GenerationExhausted:
      return BudgetExceeded;
    default:
      return InputError;
  }
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiparty session types: projection, subtyping, association and property checking", "mpst"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_flag("--json", opt.json, "Print a JSON report");
  app.add_option("--emit", opt.emit, "Emit a graph instead of text")->check(CLI::IsMember({"dot"}));
  app.add_option("--max-states", opt.max_states, "State budget")->capture_default_str();
  app.add_option("--depth", opt.depth, "Unfolding and exploration depth for sessions")->capture_default_str();
  app.add_option("--seed", opt.seed, "Random seed")->capture_default_str();
  app.add_flag("--no-balance-check", opt.no_balance_check, "Accept unbalanced global types");

  std::string a, b, role, env_file, global_file, policy = "fair", out_dir = ".";
  std::size_t steps = 100, count = 1;
  CorpusParams params;

  std::vector<std::pair<CLI::App*, std::function<int(Invocation&)>>> commands;
  auto add = [&](const char* name, const char* help, std::function<int(Invocation&)> f) {
    auto* sub = app.add_subcommand(name, help);
    commands.emplace_back(sub, std::move(f));
    return sub;
  };

  auto* project = add("project", "Project a global type onto one or all participants",
                      [&](Invocation& inv) { return cmd_project(inv, a, role); });
  project->add_option("global", a, "Global type file")->required();
  project->add_option("--role", role, "Participant to project onto");

  auto* subtype = add("subtype", "Decide A <= B for local types",
                      [&](Invocation& inv) { return cmd_subtype(inv, a, b); });
  subtype->add_option("sub", a, "Local type file")->required();
  subtype->add_option("sup", b, "Local type file")->required();

  auto* assoc = add("assoc", "Check that an environment is associated with a global type",
                    [&](Invocation& inv) { return cmd_assoc(inv, a, b); });
  assoc->add_option("env", a, "Environment file")->required();
  assoc->add_option("global", b, "Global type file")->required();

  auto* safety = add("safety", "Check communication safety of an environment",
                     [&](Invocation& inv) { return cmd_safety(inv, a); });
  safety->add_option("env", a, "Environment file")->required();

  auto* live = add("live", "Check liveness of an environment under fair scheduling",
                   [&](Invocation& inv) { return cmd_live(inv, a); });
  live->add_option("env", a, "Environment file")->required();

  auto* typecheck = add("typecheck", "Type a session against an environment",
                        [&](Invocation& inv) { return cmd_typecheck(inv, a, env_file, global_file); });
  typecheck->add_option("session", a, "Session file")->required();
  typecheck->add_option("--env", env_file, "Environment file")->required();
  typecheck->add_option("--global", global_file, "Global type the environment must be associated with");

  auto* sim = add("simulate", "Run a session (.sn), environment (.env) or global type (.gt)",
                  [&](Invocation& inv) { return cmd_simulate(inv, a, steps, policy); });
  sim->add_option("file", a, "Input file")->required();
  sim->add_option("--steps", steps, "Maximum number of steps")->capture_default_str();
  sim->add_option("--policy", policy, "Scheduling policy")
      ->check(CLI::IsMember({"fair", "first", "random"}))
      ->capture_default_str();

  auto* dlock = add("dlock", "Check that no reachable session is stuck",
                    [&](Invocation& inv) { return cmd_dlock(inv, a); });
  dlock->add_option("session", a, "Session file")->required();

  auto* slive = add("slive", "Check session liveness over forms reachable within --depth steps",
                    [&](Invocation& inv) { return cmd_slive(inv, a); });
  slive->add_option("session", a, "Session file")->required();

  auto* gen = add("gen", "Generate a corpus of global types with projected environments and sessions",
                  [&](Invocation& inv) { return cmd_gen(inv, count, out_dir, params); });
  gen->add_option("--count", count, "Number of protocols")->capture_default_str();
  gen->add_option("--out", out_dir, "Output directory")->capture_default_str();
  gen->add_option("--max-participants", params.max_participants)->capture_default_str();
  gen->add_option("--max-labels", params.max_labels)->capture_default_str();
  gen->add_option("--max-depth", params.max_depth)->capture_default_str();
  gen->add_option("--max-env-states", params.max_env_states)->capture_default_str();

  add("selftest", "Check the built-in worked examples", [](Invocation& inv) { return cmd_selftest(inv); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? Holds : InputError;
  }

  Invocation inv;
  inv.opt = opt;
  std::string command;
  int code = InputError;
  json error;
  for (auto& [sub, f] : commands) {
    if (!sub->parsed()) continue;
    command = sub->get_name();
    try {
      code = f(inv);
    } catch (const Error& e) {
      code = exit_for(e.code());
      error = {{"code", std::string(to_string(e.code()))}, {"message", e.what()}};
    } catch (const InputFailure& e) {
      code = InputError;
      error = {{"code", "InputError"}, {"message", e.what()}};
    }
  }

  if (opt.json) {
    json rep = {{"schema_version", kSchemaVersion},
                {"tool_version", kToolVersion},
                {"command", command},
                {"exit_code", code},
                {"inputs", inv.inputs}};
    if (!error.is_null()) {
      rep["error"] = error;
    } else {
      rep["verdict"] = inv.verdict;
      rep["stats"] = inv.stats;
      rep["counterexample"] = inv.counterexample;
      if (!inv.dot.empty()) rep["dot"] = inv.dot;
    }
    out << rep.dump(2) << "\n";
  } else if (!error.is_null()) {
    err << "mpst " << command << ": " << error["code"].get<std::string>() << ": "
        << error["message"].get<std::string>() << "\n";
  } else if (!inv.dot.empty()) {
    out << inv.dot;
  } else {
    out << inv.text.str();
  }
  return code;
}

}  // namespace mpst::cli
