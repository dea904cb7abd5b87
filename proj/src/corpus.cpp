#include "mpst/corpus.hpp"

#include <functional>
#include <set>

#include "mpst/lts.hpp"
#include "mpst/subtyping.hpp"
#include "mpst/typecheck.hpp"

namespace mpst {

void intern_corpus_roles(RoleNames& roles, std::uint32_t n) {
  static const char* const kNames[] = {"p", "q", "r", "s", "t", "u"};
  for (std::uint32_t i = 0; i < n; ++i)
    roles.intern(i < 6 ? std::string(kNames[i]) : "p" + std::to_string(i));
}

namespace {

// rng() % n keeps the stream identical across standard libraries.
std::uint64_t pick(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

Sort random_sort(std::mt19937_64& rng) {
  switch (pick(rng, 3)) {
    case 0: return Sort::Nat;
    case 1: return Sort::Int;
    default: return Sort::Bool;
  }
}

struct GlobalGen {
  std::mt19937_64& rng;
  const std::vector<Participant>& roles;
  std::uint32_t max_labels;
  bool allow_rec;

  SynType make(std::uint32_t depth, std::size_t binders, std::size_t since_action) {
    bool can_var = since_action < binders;
    if (depth == 0) {
      if (can_var && pick(rng, 3) != 0) return SynType::var(since_action + pick(rng, binders - since_action));
      return SynType::end();
    }
    auto roll = pick(rng, 20);
    if (allow_rec && binders < 2 && (roll < 4 || (binders == 0 && roll < 8)))
      return SynType::rec(make(depth, binders + 1, since_action + 1));
    if (roll == 19 && since_action == 0) return SynType::end();
    if (can_var && roll == 18) return SynType::var(since_action + pick(rng, binders - since_action));

    auto from = roles[pick(rng, roles.size())];
    auto to = roles[(std::find(roles.begin(), roles.end(), from) - roles.begin() + 1 +
                     pick(rng, roles.size() - 1)) %
                    roles.size()];
    // Fewer labels are likelier.
    std::uint32_t count = 1;
    while (count < max_labels && pick(rng, 3) == 0) ++count;
    std::vector<SynType::Branch> bs;
    std::set<std::uint32_t> used;
    while (bs.size() < count) {
      std::uint32_t l = static_cast<std::uint32_t>(pick(rng, max_labels));
      if (!used.insert(l).second) continue;
      auto cont = !bs.empty() && pick(rng, 2) == 0 ? bs.front().cont : make(depth - 1, binders, 0);
      bs.push_back({Label{l}, random_sort(rng), std::move(cont)});
    }
    std::sort(bs.begin(), bs.end(), [](const auto& a, const auto& b) { return a.label < b.label; });
    return SynType::comm(from, to, std::move(bs));
  }
};

}  // namespace

std::vector<Protocol> generate_corpus(TypeStore& store, RoleNames& roles, std::uint64_t seed,
                                      std::size_t count, const CorpusParams& params) {
  if (params.max_participants < 2 || params.max_labels < 1 || params.max_depth < 1)
    throw Error(ErrorCode::PreconditionViolation, "corpus parameters must allow one communication");
  intern_corpus_roles(roles, params.max_participants);
  std::mt19937_64 rng(seed);
  std::vector<Protocol> out;
  std::set<TreeHandle> seen;
  std::size_t attempts = 0;
  while (out.size() < count) {
    if (++attempts > params.max_attempts)
      throw Error(ErrorCode::GenerationExhausted,
                  "only " + std::to_string(out.size()) + " of " + std::to_string(count) +
                      " protocols after " + std::to_string(params.max_attempts) + " attempts");
    auto n = 2 + static_cast<std::uint32_t>(pick(rng, params.max_participants - 1));
    std::vector<Participant> ps;
    for (std::uint32_t i = 0; i < n; ++i) ps.push_back(Participant{i});
    GlobalGen gen{rng, ps, params.max_labels, params.max_depth >= 2};
    auto syn = gen.make(params.max_depth, 0, 0);
    auto g = store.intern_global(syn);
    if (store.node(g).head == Head::End || seen.contains(g)) continue;
    if (params.balanced_only && !balanced(store, g)) continue;
    if (!projectable_all(store, g)) continue;
    auto env = projected_env(store, g);
    try {
      env_state_graph(store, env, params.max_env_states);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::StateBudgetExceeded) throw;
      continue;
    }
    seen.insert(g);
    out.push_back({store.to_syntax(g), g, env, realize_env(store, env)});
  }
  return out;
}

TreeHandle perturb_local(TypeStore& store, TreeHandle t, std::mt19937_64& rng, std::size_t edits) {
  auto syn = store.to_syntax(t);
  for (std::size_t e = 0; e < edits; ++e) {
    std::size_t sites = 0;
    std::function<void(const SynType&)> count = [&](const SynType& x) {
      if (x.kind() == SynType::Kind::Rec) count(x.body());
      if (x.kind() == SynType::Kind::Send || x.kind() == SynType::Kind::Recv) {
        ++sites;
        for (const auto& b : x.branches()) count(b.cont);
      }
    };
    count(syn);
    if (sites == 0) break;
    std::size_t target = pick(rng, sites), seen = 0;
    std::function<SynType(const SynType&)> edit = [&](const SynType& x) -> SynType {
      if (x.kind() == SynType::Kind::Rec) return SynType::rec(edit(x.body()), x.hint());
      if (x.kind() != SynType::Kind::Send && x.kind() != SynType::Kind::Recv) return x;
      bool here = seen++ == target;
      std::vector<SynType::Branch> bs;
      for (const auto& b : x.branches()) bs.push_back({b.label, b.sort, edit(b.cont)});
      if (here && x.kind() == SynType::Kind::Send) {
        auto i = pick(rng, bs.size());
        if (bs.size() > 1 && pick(rng, 2) == 0)
          bs.erase(bs.begin() + static_cast<long>(i));
        else if (bs[i].sort == Sort::Int)
          bs[i].sort = Sort::Nat;
      } else if (here) {
        auto i = pick(rng, bs.size());
        if (pick(rng, 2) == 0) {
          std::uint32_t fresh = 0;
          for (const auto& b : bs) fresh = std::max(fresh, b.label.index + 1);
          bs.push_back({Label{fresh}, random_sort(rng), SynType::end()});
        } else if (bs[i].sort == Sort::Nat) {
          bs[i].sort = Sort::Int;
        }
      }
      return x.kind() == SynType::Kind::Send ? SynType::send(x.peer(), std::move(bs))
                                             : SynType::recv(x.peer(), std::move(bs));
    };
    syn = edit(syn);
  }
  auto out = store.intern_local(syn);
  if (!subtype(store, out, t))
    throw Error(ErrorCode::PreconditionViolation, "perturbation left the subtype relation");
  return out;
}

TypeEnv perturb_env(TypeStore& store, const TypeEnv& env, std::mt19937_64& rng, std::size_t edits) {
  TypeEnv out;
  for (const auto& [p, t] : env) out.emplace(p, perturb_local(store, t, rng, edits));
  return out;
}

}  // namespace mpst
