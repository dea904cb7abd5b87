#include "mpst/projection.hpp"

#include <numeric>

namespace mpst {

TypeEnv intern_env(TypeStore& store, const EnvSyntax& env) {
  TypeEnv out;
  for (const auto& [p, t] : env) out.emplace(p, store.intern_local(t));
  return out;
}

std::string render(const TypeStore& store, const TypeEnv& env, const RoleNames& roles) {
  std::string out;
  for (const auto& [p, h] : env) {
    if (!out.empty()) out += ", ";
    out += roles.name(p) + " : " + render(store, h, roles);
  }
  return "{" + out + "}";
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void link(std::size_t child, std::size_t root) { parent_[child] = root; }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

std::optional<TreeHandle> project(TypeStore& store, TreeHandle g, Participant r) {
  if (store.node(g).domain != Domain::Global)
    throw Error(ErrorCode::KindMismatch, "projection needs a global type");
  // Participants first: a tree without r projects to end.
  if (!store.has_participant(g, r)) return store.end(Domain::Local);

  auto nodes = store.reachable(g);
  std::unordered_map<TreeHandle, std::size_t> idx;
  for (std::size_t i = 0; i < nodes.size(); ++i) idx.emplace(nodes[i], i);
  const std::size_t end_class = nodes.size();

  // Each class must denote one local tree. A class knows whether it is end
  // and, if not, one node that involves r and fixes its head.
  UnionFind uf(nodes.size() + 1);
  std::vector<bool> is_end(nodes.size() + 1, false);
  std::vector<std::optional<std::size_t>> real(nodes.size() + 1);
  is_end[end_class] = true;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (store.node(nodes[i]).involves(r)) real[i] = i;

  auto local_head = [&](std::size_t i) {
    const auto& n = store.node(nodes[i]);
    return std::make_pair(n.from == r ? Head::Send : Head::Recv, n.from == r ? n.to : n.from);
  };

  std::vector<std::pair<std::size_t, std::size_t>> pending;
  auto merge_all = [&]() -> bool {
    while (!pending.empty()) {
      auto [a, b] = pending.back();
      pending.pop_back();
      auto ra = uf.find(a), rb = uf.find(b);
      if (ra == rb) continue;
      if ((is_end[ra] && real[rb]) || (is_end[rb] && real[ra])) return false;
      uf.link(rb, ra);
      is_end[ra] = is_end[ra] || is_end[rb];
      if (real[ra] && real[rb]) {
        // Both sides fix a head: they must agree, and so must the children.
        const auto& x = store.node(nodes[*real[ra]]);
        const auto& y = store.node(nodes[*real[rb]]);
        if (local_head(*real[ra]) != local_head(*real[rb])) return false;
        if (x.branches.size() != y.branches.size()) return false;
        for (std::size_t k = 0; k < x.branches.size(); ++k) {
          if (x.branches[k].label != y.branches[k].label || x.branches[k].sort != y.branches[k].sort)
            return false;
          pending.emplace_back(idx.at(x.branches[k].child), idx.at(y.branches[k].child));
        }
      } else if (!real[ra]) {
        real[ra] = real[rb];
      }
    }
    return true;
  };

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = store.node(nodes[i]);
    if (!store.has_participant(nodes[i], r)) {
      pending.emplace_back(end_class, i);
    } else if (!n.involves(r)) {
      for (const auto& b : n.branches) pending.emplace_back(i, idx.at(b.child));
    }
    if (!merge_all()) return std::nullopt;
  }

  RawGraph raw;
  std::unordered_map<std::size_t, std::uint32_t> slot;
  for (std::size_t i = 0; i <= nodes.size(); ++i) {
    auto c = uf.find(i);
    if (!is_end[c] && real[c] && !slot.count(c)) slot.emplace(c, raw.add_alias());
  }
  auto ref_of = [&](std::size_t i) {
    auto c = uf.find(i);
    if (is_end[c]) return RawRef::tree(store.end(Domain::Local));
    return RawRef::raw(slot.at(c));
  };
  for (auto [c, s] : slot) {
    auto rep = *real[c];
    const auto& n = store.node(nodes[rep]);
    RawGraph::Node out;
    out.domain = Domain::Local;
    std::tie(out.head, out.from) = local_head(rep);
    for (const auto& b : n.branches) out.branches.push_back({b.label, b.sort, ref_of(idx.at(b.child))});
    raw.nodes[s].target = RawRef::raw(raw.add(std::move(out)));
  }
  return store.intern_graph(raw, ref_of(0));
}

bool projectable_all(TypeStore& store, TreeHandle g) {
  for (auto r : store.participants(g))
    if (!project(store, g, r)) return false;
  return true;
}

TypeEnv projected_env(TypeStore& store, TreeHandle g) {
  TypeEnv env;
  for (auto r : store.participants(g)) {
    auto t = project(store, g, r);
    if (!t)
      throw Error(ErrorCode::NotProjectable,
                  "global type has no projection onto participant " + std::to_string(r.id));
    env.emplace(r, *t);
  }
  return env;
}

AssocReport check_associated(TypeStore& store, const TypeEnv& env, TreeHandle g, bool strict) {
  if (strict && !balanced(store, g))
    throw Error(ErrorCode::PreconditionViolation, "NotBalanced: global type is not balanced");
  AssocReport rep;
  std::map<Participant, TreeHandle> proj;
  for (auto r : store.participants(g)) {
    auto t = project(store, g, r);
    if (!t)
      throw Error(ErrorCode::PreconditionViolation,
                  "NotProjectable: no projection onto participant " + std::to_string(r.id));
    proj.emplace(r, *t);
  }
  for (const auto& [r, t] : proj) {
    AssocEntry e;
    e.projection = t;
    auto it = env.find(r);
    if (it == env.end()) {
      e.ok = false;
      e.note = "missing from environment";
    } else {
      e.actual = it->second;
      e.subtype = check_subtype(store, it->second, t);
      e.ok = e.subtype.holds;
      if (!e.ok) e.note = "not a subtype of the projection";
    }
    rep.holds = rep.holds && e.ok;
    rep.entries.emplace(r, std::move(e));
  }
  for (const auto& [r, t] : env) {
    if (proj.count(r)) continue;
    AssocEntry e;
    e.actual = t;
    e.ok = t == store.end(Domain::Local);
    if (!e.ok) e.note = "not a participant of the global type but not end";
    rep.holds = rep.holds && e.ok;
    rep.entries.emplace(r, std::move(e));
  }
  return rep;
}

bool associated(TypeStore& store, const TypeEnv& env, TreeHandle g, bool strict) {
  return check_associated(store, env, g, strict).holds;
}

}  // namespace mpst
