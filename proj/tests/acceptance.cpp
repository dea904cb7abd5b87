// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "families.hpp"
#include "lasso_oracle.hpp"
#include "mpst/corpus.hpp"
#include "mpst/subtyping.hpp"
#include "mpst/typecheck.hpp"
#include "support.hpp"
#include "theorems.hpp"

using namespace mpst;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

/// Collects named checks; the first few failures end up in the detail line.
struct Checks {
  int total = 0;
  std::vector<std::string> failed;
  void operator()(const std::string& name, bool ok) {
    ++total;
    if (!ok) failed.push_back(name);
  }
  Outcome outcome(const std::string& extra = "") const {
    Outcome o;
    o.pass = failed.empty();
    o.detail = std::to_string(total - static_cast<int>(failed.size())) + "/" + std::to_string(total) + " checks";
    if (!extra.empty()) o.detail += ", " + extra;
    for (std::size_t i = 0; i < failed.size() && i < 5; ++i) o.detail += "; failed: " + failed[i];
    return o;
  }
};

ActionLabel comm(Participant p, Participant q, std::uint32_t l) { return ActionLabel::comm(p, q, Label{l}); }

// ---- 1

Outcome paper_examples() {
  World w;
  Checks check;
  auto env = [&](const char* s) { return intern_env(w.store, parse_env(s, w.roles)); };
  auto p = w.p("p"), q = w.p("q"), r = w.p("r");
  auto gamma = env(fixtures::kGammaEx), gamma1 = env(fixtures::kGammaPrime), gend = env(fixtures::kGammaEnd);
  auto unsafe_env = env(fixtures::kUnsafeEnv);

  check("gamma -(p,q)l0-> gamma", env_step(w.store, gamma, comm(p, q, 0)) == gamma);
  check("gamma -(p,q)l1-> gamma'", env_step(w.store, gamma, comm(p, q, 1)) == gamma1);
  check("gamma' -(q,r)l2-> gamma_end", env_step(w.store, gamma1, comm(q, r, 2)) == gend);
  std::set<ActionLabel> comms;
  for (const auto& a : env_enabled(w.store, gamma))
    if (a.kind == ActionLabel::Kind::Comm) comms.insert(a);
  check("gamma enables exactly (p,q)l0 and (p,q)l1", comms == std::set{comm(p, q, 0), comm(p, q, 1)});

  check("int/nat environment unsafe", !safe(w.store, unsafe_env).holds);
  check("int/nat environment fails weak safety", !weak_safety_at(w.store, unsafe_env));
  check("no (p,q)l0 under int/nat", !env_can_step(w.store, unsafe_env, comm(p, q, 0)));
  check("gamma safe", safe(w.store, gamma).holds);

  EnvLasso loop{{}, {{gamma, comm(p, q, 0)}}};
  check("l0 self-loop is a path", lasso_valid(w.store, loop));
  check("l0 self-loop fair", lasso_fair(w.store, loop));
  check("l0 self-loop not live", !lasso_live(w.store, loop));
  EnvLasso finish{{{gamma, comm(p, q, 0)}, {gamma, comm(p, q, 1)}, {gamma1, comm(q, r, 2)}}, {{gend, std::nullopt}}};
  check("l0.l1.l2 path is a path", lasso_valid(w.store, finish));
  check("l0.l1.l2 path fair", lasso_fair(w.store, finish));
  check("l0.l1.l2 path live", lasso_live(w.store, finish));
  check("env_live(gamma) false", !env_live(w.store, gamma).holds);

  auto gex = w.g(fixtures::kGex);
  check("Gex unbalanced", !balanced(w.store, gex));
  check("Gex|p = T_p", project(w.store, gex, p) == w.t(fixtures::kTp));
  check("Gex|q = T_q", project(w.store, gex, q) == w.t(fixtures::kTq));
  check("Gex|r = T_r", project(w.store, gex, r) == w.t(fixtures::kTr));
  check("gamma associated with Gex without the balance check", associated(w.store, gamma, gex, false));
  bool refused = false;
  try {
    associated(w.store, gamma, gex, true);
  } catch (const Error& e) {
    refused = e.code() == ErrorCode::PreconditionViolation;
  }
  check("strict association refuses Gex", refused);
  check("gamma' associated with G'", associated(w.store, gamma1, w.g("q -> r { l2(int). end }")));

  auto stuck = parse_session(fixtures::kStuckSession, w.roles);
  check("stuck session Deadlocked", deadlock_status(stuck).kind == DeadlockKind::Deadlocked);
  check("stuck session not live", !session_live_bounded(stuck, 8).holds);

  auto relaxed = env("p : q (+) { l0(int). end }\nq : p & { l0(int). end, l1(int). end }\n");
  auto g2 = w.g("p -> q { l0(int). end, l1(int). end }");
  check("relaxed-label pair associated", associated(w.store, relaxed, g2));
  check("G steps with l1", global_step(w.store, g2, comm(p, q, 1)).has_value());
  check("environment cannot step with l1", !env_can_step(w.store, relaxed, comm(p, q, 1)));
  check("environment steps with l0", env_can_step(w.store, relaxed, comm(p, q, 0)));
  return check.outcome();
}

// ---- 2

Outcome subtyping_family() {
  World w;
  w.p("p");
  w.p("q");
  std::vector<TreeHandle> fam;
  for (const auto& s : testgen::local_type_family()) fam.push_back(w.t(s));
  std::size_t pairs = 0, related = 0, disagree = 0;
  std::string first;
  for (auto a : fam) {
    auto ra = w.store.reachable(a).size();
    for (auto b : fam) {
      auto k = ra * w.store.reachable(b).size() + 1;
      bool exact = subtype(w.store, a, b);
      ++pairs;
      related += exact;
      if (exact != subtype_bounded(w.store, a, b, k)) {
        if (!disagree++) first = w.show(a) + " <= " + w.show(b);
      }
    }
  }
  Outcome o;
  o.pass = disagree == 0 && fam.size() == 721;
  o.detail = std::to_string(fam.size()) + " types, " + std::to_string(pairs) + " pairs, " +
             std::to_string(related) + " related, " + std::to_string(disagree) + " disagreements";
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

// ---- 3

Outcome checker_vs_brute_force() {
  std::mt19937 rng(2718);
  World w;
  for (auto n : {"p", "q", "r", "s"}) w.p(n);
  int checked = 0, unsafe = 0, not_live = 0, disagree = 0;
  std::size_t states = 0, largest = 0;
  Checks witnesses;
  while (checked < 50) {
    auto env = oracle::random_env(rng, w.store);
    EnvGraph g;
    try {
      g = env_state_graph(w.store, env, 50);
    } catch (const Error&) {
      continue;
    }
    if (oracle::eccentricity(g) > 7) continue;
    ++checked;
    states += g.states.size();
    largest = std::max(largest, g.states.size());
    auto s = safe(w.store, g);
    auto l = env_live(w.store, g);
    unsafe += !s.holds;
    not_live += !l.holds;
    disagree += s.holds != oracle::brute_safe(w.store, g, 8);
    disagree += l.holds != oracle::brute_live(w.store, g, 8);
    if (l.lasso)
      witnesses("lasso " + std::to_string(checked),
                lasso_valid(w.store, *l.lasso) && lasso_fair(w.store, *l.lasso) && !lasso_live(w.store, *l.lasso));
  }
  auto o = witnesses.outcome();
  o.pass = o.pass && disagree == 0;
  o.detail = std::to_string(checked) + " envs (" + std::to_string(states) + " states, largest " +
             std::to_string(largest) + "), " + std::to_string(unsafe) + " unsafe, " + std::to_string(not_live) +
             " not live, " + std::to_string(disagree) + " disagreements, " + o.detail + " on lassos";
  return o;
}

// ---- corpus shared by 4, 5 and 6

struct Corpus {
  TypeStore store;
  RoleNames roles;
  std::vector<Protocol> protocols;
  std::vector<std::vector<TypeEnv>> perturbed;  // three per protocol
};

Corpus& corpus() {
  static Corpus c = [] {
    Corpus c;
    c.protocols = generate_corpus(c.store, c.roles, 20240, 100);
    std::mt19937_64 rng(99);
    for (const auto& p : c.protocols) {
      std::vector<TypeEnv> envs;
      for (int i = 0; i < 3; ++i) envs.push_back(perturb_env(c.store, p.env, rng));
      c.perturbed.push_back(std::move(envs));
    }
    return c;
  }();
  return c;
}

std::string global_text(const Corpus& c, std::size_t i) { return render(c.protocols[i].global, c.roles); }

// ---- 4

Outcome association_implies_safe_and_live() {
  auto& c = corpus();
  Checks check;
  std::size_t largest = 0, distinct = 0, participants = 0;
  for (std::size_t i = 0; i < c.protocols.size(); ++i) {
    const auto& pr = c.protocols[i];
    participants = std::max(participants, pr.env.size());
    check("balanced " + global_text(c, i), balanced(c.store, pr.g));
    check("projectable " + global_text(c, i), projectable_all(c.store, pr.g));
    std::vector<TypeEnv> envs{pr.env};
    envs.insert(envs.end(), c.perturbed[i].begin(), c.perturbed[i].end());
    for (std::size_t k = 0; k < envs.size(); ++k) {
      const auto& env = envs[k];
      distinct += k > 0 && env != pr.env;
      auto name = global_text(c, i) + " env " + std::to_string(k);
      check("associated " + name, associated(c.store, env, pr.g));
      auto g = env_state_graph(c.store, env, 10000);
      largest = std::max(largest, g.states.size());
      check("safe " + name, safe(c.store, g).holds);
      check("live " + name, env_live(c.store, g).holds);
    }
  }
  return check.outcome(std::to_string(c.protocols.size()) + " protocols, up to " + std::to_string(participants) +
                       " participants, " + std::to_string(distinct) + " perturbed envs differ, largest graph " +
                       std::to_string(largest));
}

// ---- 5

Outcome operational_correspondence() {
  auto& c = corpus();
  Checks check;
  std::size_t pairs = 0, complete_steps = 0, sound_steps = 0, relaxed = 0;
  for (std::size_t i = 0; i < c.protocols.size(); ++i) {
    const auto& pr = c.protocols[i];
    std::vector<TypeEnv> starts{pr.env};
    starts.insert(starts.end(), c.perturbed[i].begin(), c.perturbed[i].end());
    std::size_t budget = 1000;  // pairs per protocol, shared by all starts
    for (const auto& start : starts) {
      using Pair = std::pair<TypeEnv, TreeHandle>;
      std::set<Pair> seen{{start, pr.g}};
      std::vector<Pair> todo{{start, pr.g}};
      bool ok = true;
      for (std::size_t n = 0; n < todo.size() && ok; ++n) {
        auto [env, g] = todo[n];
        ++pairs;
        for (const auto& a : env_enabled(c.store, env)) {
          if (a.kind != ActionLabel::Kind::Comm) continue;
          ++complete_steps;
          auto g2 = global_step(c.store, g, a);
          auto env2 = env_step(c.store, env, a);
          if (!g2 || !associated(c.store, env2, *g2)) {
            ok = false;
            check("completeness " + render(a, c.roles) + " in " + global_text(c, i), false);
            break;
          }
          if (budget > 0 && seen.insert({env2, *g2}).second) {
            --budget;
            todo.push_back({env2, *g2});
          }
        }
        for (const auto& a : global_enabled(c.store, g)) {
          if (!ok) break;
          ++sound_steps;
          bool matched = false;
          for (const auto& b : global_enabled(c.store, g)) {
            if (!b.same_pair(a.p, a.q) || !env_can_step(c.store, env, b)) continue;
            if (associated(c.store, env_step(c.store, env, b), *global_step(c.store, g, b))) {
              matched = true;
              relaxed += b != a;
              break;
            }
          }
          if (!matched) {
            ok = false;
            check("soundness " + render(a, c.roles) + " in " + global_text(c, i), false);
          }
        }
      }
      check("protocol " + std::to_string(i), ok);
    }
  }
  return check.outcome(std::to_string(pairs) + " (env, global) pairs, " + std::to_string(complete_steps) +
                       " env steps, " + std::to_string(sound_steps) + " global steps (" +
                       std::to_string(relaxed) + " matched with another label)");
}

// ---- 6

Outcome session_theorems() {
  auto& c = corpus();
  Checks check;
  std::size_t triples = 0, steps = 0, truncated = 0, live_states = 0;
  for (std::size_t i = 0; i < c.protocols.size(); ++i) {
    const auto& pr = c.protocols[i];
    std::vector<std::pair<SessionForm, TypeEnv>> runs{{pr.session, pr.env}};
    const auto& env1 = c.perturbed[i][0];
    runs.emplace_back(realize_env(c.store, env1), env1);
    for (const auto& [m, env] : runs) {
      auto name = global_text(c, i);
      auto rep = theorems::check_session_theorems(c.store, c.roles, m, env, pr.g, 32, 1000);
      triples += rep.triples;
      steps += rep.steps;
      truncated += rep.truncated;
      check(rep.failure + " for " + name, rep.ok());
      check("initially not Deadlocked for " + name, deadlock_status(m, 32).kind != DeadlockKind::Deadlocked);
      try {
        auto v = session_live_bounded(m, 32);
        live_states += v.states;
        check("session live for " + name, v.holds);
      } catch (const Error& e) {
        check(std::string("session liveness ") + e.what() + " for " + name, false);
      }
    }
  }
  return check.outcome(std::to_string(triples) + " typed triples, " + std::to_string(steps) + " session steps, " +
                       std::to_string(truncated) + " runs cut at the bound, " + std::to_string(live_states) +
                       " liveness states");
}

// ---- 7

Outcome negative_controls() {
  World w;
  Checks check;
  for (auto n : {"p", "q", "r"}) w.p(n);
  auto env = [&](const char* s) { return intern_env(w.store, parse_env(s, w.roles)); };

  auto refute_safety = [&](const std::string& name, const TypeEnv& e) {
    auto g = env_state_graph(w.store, e, 1000);
    auto v = safe(w.store, g);
    check(name + ": refuted", !v.holds && v.bad_state.has_value());
    if (!v.bad_state) return;
    check(name + ": bad state reachable", g.index.contains(*v.bad_state));
    check(name + ": weak safety fails there", !weak_safety_at(w.store, *v.bad_state));
  };
  auto refute_liveness = [&](const std::string& name, const TypeEnv& e) {
    auto v = env_live(w.store, e);
    check(name + ": refuted", !v.holds && v.lasso.has_value());
    if (!v.lasso) return;
    const auto& l = *v.lasso;
    check(name + ": lasso starts at the environment", l.at(0).state == e);
    check(name + ": lasso is a path", lasso_valid(w.store, l));
    check(name + ": lasso fair", lasso_fair(w.store, l));
    check(name + ": lasso not live", !lasso_live(w.store, l));
  };

  refute_safety("int/nat payload", env(fixtures::kUnsafeEnv));
  refute_liveness("running example", env(fixtures::kGammaEx));
  refute_safety("label mismatch", env("p : q (+) { l1(int). end }\nq : p & { l0(int). end }\n"));
  refute_safety("mismatch after one step",
                env("p : q (+) { l0(int). q (+) { l1(nat). end } }\n"
                    "q : p & { l0(int). p & { l2(nat). end } }\n"));
  refute_liveness("starved bystander",
                  env("p : rec X . q (+) { l0(int). X }\nq : rec X . p & { l0(int). X }\n"
                      "r : q & { l2(int). end }\n"));
  refute_liveness("waiting on the wrong peer",
                  env("p : q (+) { l0(int). end }\nq : r & { l0(int). end }\nr : end\n"));
  refute_liveness("both receive", env("p : q & { l0(int). end }\nq : p & { l0(int). end }\n"));
  return check.outcome("7 environments");
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"paper examples", 1, paper_examples},
      {"subtyping vs bounded oracle on the full family", 30, subtyping_family},
      {"safe/env_live vs lasso enumeration", 120, checker_vs_brute_force},
      {"association implies safe and live", 300, association_implies_safe_and_live},
      {"operational correspondence", 600, operational_correspondence},
      {"session theorems at depth 32", 600, session_theorems},
      {"negative controls", 60, negative_controls},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& c = criteria[i];
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool pass = o.pass && s < c.limit_s;
    failures += !pass;
    std::printf("%s  %zu  %s  (%.2f s, limit %.0f s)  %s\n", pass ? "PASS" : "FAIL", i + 1, c.name, s, c.limit_s,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
