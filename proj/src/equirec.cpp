#include "mpst/equirec.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <sstream>

namespace mpst {

const NodeBranch* TreeNode::find(Label l) const {
  auto it = std::lower_bound(branches.begin(), branches.end(), l,
                             [](const NodeBranch& b, Label x) { return b.label < x; });
  if (it == branches.end() || it->label != l) return nullptr;
  return &*it;
}

struct TypeStore::Quotient {
  struct Block {
    Domain domain;
    Head head;
    Participant from;
    Participant to;
    std::vector<RawBranch> branches;  // child.index = block id
  };
  std::vector<Block> blocks;
  std::vector<std::optional<TreeHandle>> resolved;
};

namespace {

void append_head(std::string& key, Domain d, Head h, Participant from, Participant to) {
  key += 'D';
  key += std::to_string(static_cast<int>(d));
  key += 'H';
  key += std::to_string(static_cast<int>(h));
  key += 'F';
  key += std::to_string(from.id);
  key += 'T';
  key += std::to_string(to.id);
  key += '[';
}

}  // namespace

TypeStore::TypeStore() {
  for (Domain d : {Domain::Global, Domain::Local}) {
    TreeNode n;
    n.domain = d;
    n.head = Head::End;
    auto h = add_node(n);
    std::string key;
    append_head(key, d, Head::End, {}, {});
    key += ']';
    canon_.emplace(key, h);
    (d == Domain::Global ? global_end_ : local_end_) = h;
  }
}

TreeHandle TypeStore::add_node(TreeNode n) {
  nodes_.push_back(std::move(n));
  return TreeHandle{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

bool TypeStore::has_participant(TreeHandle h, Participant r) const {
  const auto& ps = participants(h);
  return std::binary_search(ps.begin(), ps.end(), r);
}

bool TypeStore::bisim(TreeHandle a, TreeHandle b) const {
  if (node(a).domain != node(b).domain)
    throw Error(ErrorCode::KindMismatch, "cannot compare a global type with a local type");
  return a == b;
}

std::vector<TreeHandle> TypeStore::reachable(TreeHandle h) const {
  std::vector<TreeHandle> order{h};
  std::unordered_map<TreeHandle, bool> seen{{h, true}};
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (const auto& b : node(order[i]).branches) {
      if (seen.emplace(b.child, true).second) order.push_back(b.child);
    }
  }
  return order;
}

TreeHandle TypeStore::intern_global(const SynGlobal& g) { return intern(g, Domain::Global); }
TreeHandle TypeStore::intern_local(const SynLocal& t) { return intern(t, Domain::Local); }

TreeHandle TypeStore::intern(const SynType& t, Domain d) {
  RawGraph g;
  std::vector<std::uint32_t> binders;
  std::function<RawRef(const SynType&)> build = [&](const SynType& s) -> RawRef {
    switch (s.kind()) {
      case SynType::Kind::End:
        return RawRef::tree(end(d));
      case SynType::Kind::Var:
        if (s.index() >= binders.size())
          throw Error(ErrorCode::SyntaxError, "free recursion variable in type");
        return RawRef::raw(binders[binders.size() - 1 - s.index()]);
      case SynType::Kind::Rec: {
        auto a = g.add_alias();
        binders.push_back(a);
        auto target = build(s.body());
        binders.pop_back();
        g.nodes[a].target = target;
        return RawRef::raw(a);
      }
      default: {
        bool global_head = s.kind() == SynType::Kind::Comm;
        if (global_head != (d == Domain::Global))
          throw Error(ErrorCode::KindMismatch, "global and local constructors mixed");
        RawGraph::Node n;
        n.domain = d;
        n.head = s.kind() == SynType::Kind::Comm   ? Head::Comm
                 : s.kind() == SynType::Kind::Send ? Head::Send
                                                   : Head::Recv;
        n.from = s.from();
        n.to = s.kind() == SynType::Kind::Comm ? s.to() : Participant{};
        for (const auto& b : s.branches()) n.branches.push_back({b.label, b.sort, build(b.cont)});
        return RawRef::raw(g.add(std::move(n)));
      }
    }
  };
  auto root = build(t);
  return intern_graph(g, root);
}

TreeHandle TypeStore::intern_graph(const RawGraph& g, RawRef root) {
  if (root.arena) return TreeHandle{root.index};
  return intern_graph(g)[root.index];
}

std::vector<TreeHandle> TypeStore::intern_graph(const RawGraph& g) {
  const auto n_raw = static_cast<std::uint32_t>(g.nodes.size());

  // Resolve alias chains to a concrete raw node or arena node.
  std::vector<std::optional<RawRef>> target(n_raw);
  auto resolve = [&](RawRef r) {
    std::size_t steps = 0;
    while (!r.arena && g.nodes.at(r.index).alias) {
      if (++steps > n_raw)
        throw Error(ErrorCode::UnguardedRecursion, "recursion variable is not guarded");
      r = g.nodes[r.index].target;
    }
    return r;
  };
  for (std::uint32_t i = 0; i < n_raw; ++i) target[i] = resolve(RawRef::raw(i));

  // Universe: concrete raw nodes, then every arena node they can reach.
  std::vector<std::int64_t> raw_slot(n_raw, -1);
  std::vector<RawRef> universe;
  for (std::uint32_t i = 0; i < n_raw; ++i) {
    if (!g.nodes[i].alias) {
      raw_slot[i] = static_cast<std::int64_t>(universe.size());
      universe.push_back(RawRef::raw(i));
    }
  }
  std::unordered_map<std::uint32_t, std::size_t> arena_slot;
  auto add_arena = [&](std::uint32_t id) {
    if (arena_slot.count(id)) return;
    std::vector<std::uint32_t> stack{id};
    arena_slot.emplace(id, universe.size());
    universe.push_back(RawRef::tree(TreeHandle{id}));
    while (!stack.empty()) {
      auto cur = stack.back();
      stack.pop_back();
      for (const auto& b : nodes_.at(cur).branches) {
        if (arena_slot.emplace(b.child.id, universe.size()).second) {
          universe.push_back(RawRef::tree(b.child));
          stack.push_back(b.child.id);
        }
      }
    }
  };
  auto slot_of = [&](RawRef r) -> std::size_t {
    r = resolve(r);
    if (r.arena) {
      add_arena(r.index);
      return arena_slot.at(r.index);
    }
    return static_cast<std::size_t>(raw_slot[r.index]);
  };

  struct Elem {
    Domain domain;
    Head head;
    Participant from, to;
    std::vector<std::pair<Label, Sort>> sig;
    std::vector<std::size_t> kids;
  };
  std::vector<Elem> elems;
  for (std::size_t u = 0; u < universe.size(); ++u) {
    Elem e;
    auto r = universe[u];
    if (r.arena) {
      const auto& n = nodes_[r.index];
      e = Elem{n.domain, n.head, n.from, n.to, {}, {}};
      for (const auto& b : n.branches) {
        e.sig.emplace_back(b.label, b.sort);
        e.kids.push_back(arena_slot.at(b.child.id));
      }
    } else {
      const auto& n = g.nodes[r.index];
      e = Elem{n.domain, n.head, n.from, n.to, {}, {}};
      auto bs = n.branches;
      std::sort(bs.begin(), bs.end(),
                [](const RawBranch& a, const RawBranch& b) { return a.label < b.label; });
      for (const auto& b : bs) {
        e.sig.emplace_back(b.label, b.sort);
        e.kids.push_back(slot_of(b.child));  // may grow universe
      }
      if (e.head == Head::End) e.from = e.to = Participant{};
      if (e.head != Head::Comm) e.to = Participant{};
    }
    elems.push_back(std::move(e));
  }

  // Hopcroft partition refinement over the labelled child edges.
  const std::size_t U = elems.size();
  std::vector<std::size_t> block(U), pos(U);
  std::vector<std::vector<std::size_t>> members;
  {
    std::map<std::vector<std::uint64_t>, std::size_t> ids;
    for (std::size_t u = 0; u < U; ++u) {
      const auto& e = elems[u];
      std::vector<std::uint64_t> key{static_cast<std::uint64_t>(e.domain),
                                     static_cast<std::uint64_t>(e.head), e.from.id, e.to.id};
      for (auto [l, s] : e.sig) {
        key.push_back(l.index);
        key.push_back(static_cast<std::uint64_t>(s));
      }
      auto b = ids.emplace(std::move(key), ids.size()).first->second;
      if (b == members.size()) members.emplace_back();
      block[u] = b;
      pos[u] = members[b].size();
      members[b].push_back(u);
    }
  }
  std::map<std::uint32_t, std::size_t> label_id;
  for (const auto& e : elems)
    for (auto [l, s] : e.sig) label_id.emplace(l.index, label_id.size());
  const std::size_t L = label_id.size();
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> preds(U);  // (label, parent)
  for (std::size_t u = 0; u < U; ++u)
    for (std::size_t i = 0; i < elems[u].kids.size(); ++i)
      preds[elems[u].kids[i]].emplace_back(label_id.at(elems[u].sig[i].first.index), u);

  std::vector<std::vector<bool>> queued(members.size(), std::vector<bool>(L, true));
  std::deque<std::pair<std::size_t, std::size_t>> work;
  for (std::size_t b = 0; b < members.size(); ++b)
    for (std::size_t a = 0; a < L; ++a) work.emplace_back(b, a);
  std::unordered_map<std::size_t, std::vector<std::size_t>> touched;
  while (!work.empty()) {
    auto [c, a] = work.front();
    work.pop_front();
    queued[c][a] = false;
    touched.clear();
    for (auto v : members[c])
      for (auto [l, u] : preds[v])
        if (l == a) touched[block[u]].push_back(u);
    for (auto& [b, marked] : touched) {
      if (marked.size() == members[b].size()) continue;
      auto nb = members.size();
      members.emplace_back();
      for (auto u : marked) {
        auto& from = members[b];
        auto last = from.back();
        from[pos[u]] = last;
        pos[last] = pos[u];
        from.pop_back();
        block[u] = nb;
        pos[u] = members[nb].size();
        members[nb].push_back(u);
      }
      queued.emplace_back(L, false);
      for (std::size_t x = 0; x < L; ++x) {
        auto pick = queued[b][x] || members[nb].size() <= members[b].size() ? nb : b;
        if (!queued[pick][x]) {
          queued[pick][x] = true;
          work.emplace_back(pick, x);
        }
      }
    }
  }
  const std::size_t n_blocks = members.size();

  Quotient q;
  q.blocks.resize(n_blocks);
  q.resolved.assign(n_blocks, std::nullopt);
  std::vector<bool> filled(n_blocks, false);
  for (std::size_t u = 0; u < U; ++u) {
    auto b = block[u];
    if (universe[u].arena) q.resolved[b] = TreeHandle{universe[u].index};
    if (filled[b]) continue;
    filled[b] = true;
    const auto& e = elems[u];
    auto& blk = q.blocks[b];
    blk.domain = e.domain;
    blk.head = e.head;
    blk.from = e.from;
    blk.to = e.to;
    for (std::size_t i = 0; i < e.sig.size(); ++i)
      blk.branches.push_back({e.sig[i].first, e.sig[i].second,
                              RawRef::raw(static_cast<std::uint32_t>(block[e.kids[i]]))});
  }

  // Tarjan over unresolved blocks; SCCs come out sinks first.
  std::vector<std::int64_t> index(n_blocks, -1), low(n_blocks, 0);
  std::vector<bool> on_stack(n_blocks, false);
  std::vector<std::uint32_t> stack;
  std::int64_t counter = 0;
  std::function<void(std::uint32_t)> strong = [&](std::uint32_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const auto& br : q.blocks[v].branches) {
      auto w = br.child.index;
      if (q.resolved[w]) continue;
      if (index[w] < 0) {
        strong(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::uint32_t> members;
      std::uint32_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        members.push_back(w);
      } while (w != v);
      intern_scc(members, q);
    }
  };
  for (std::uint32_t b = 0; b < n_blocks; ++b)
    if (!q.resolved[b] && index[b] < 0) strong(b);

  std::vector<TreeHandle> out(n_raw);
  for (std::uint32_t i = 0; i < n_raw; ++i) {
    auto r = *target[i];
    out[i] = r.arena ? TreeHandle{r.index}
                     : *q.resolved[block[static_cast<std::size_t>(raw_slot[r.index])]];
  }
  return out;
}

void TypeStore::intern_scc(const std::vector<std::uint32_t>& members, Quotient& q) {
  std::set<std::uint32_t> in_scc(members.begin(), members.end());

  // Breadth-first serialization of the component from `start`; exits are
  // canonical ids, so isomorphic components produce identical keys.
  auto serialize = [&](std::uint32_t start, std::vector<std::uint32_t>* order_out) {
    std::vector<std::uint32_t> order{start};
    std::unordered_map<std::uint32_t, std::size_t> pos{{start, 0}};
    std::string key = members.size() > 1 || [&] {
      for (const auto& b : q.blocks[start].branches)
        if (b.child.index == start) return true;
      return false;
    }() ? "C"
        : "";
    for (std::size_t i = 0; i < order.size(); ++i) {
      const auto& blk = q.blocks[order[i]];
      append_head(key, blk.domain, blk.head, blk.from, blk.to);
      for (const auto& b : blk.branches) {
        key += 'l';
        key += std::to_string(b.label.index);
        key += 's';
        key += std::to_string(static_cast<int>(b.sort));
        auto c = b.child.index;
        if (in_scc.count(c)) {
          auto [it, fresh] = pos.emplace(c, order.size());
          if (fresh) order.push_back(c);
          key += '#';
          key += std::to_string(it->second);
        } else {
          key += '@';
          key += std::to_string(q.resolved[c]->id);
        }
        key += ';';
      }
      key += ']';
    }
    if (order_out) *order_out = std::move(order);
    return key;
  };

  std::vector<std::uint32_t> order;
  auto key = serialize(members.front(), &order);
  auto found = canon_.find(key);
  if (found != canon_.end()) {
    // Pair the component with the existing isomorphic one.
    q.resolved[order[0]] = found->second;
    for (auto b : order) {
      const auto& arena = nodes_[q.resolved[b]->id];
      const auto& blk = q.blocks[b];
      for (std::size_t i = 0; i < blk.branches.size(); ++i) {
        auto c = blk.branches[i].child.index;
        if (in_scc.count(c) && !q.resolved[c]) q.resolved[c] = arena.branches[i].child;
      }
    }
    return;
  }

  for (auto b : order) q.resolved[b] = add_node(TreeNode{});
  std::set<Participant> parts;
  for (auto b : order) {
    const auto& blk = q.blocks[b];
    auto& n = nodes_[q.resolved[b]->id];
    n.domain = blk.domain;
    n.head = blk.head;
    n.from = blk.from;
    n.to = blk.to;
    if (blk.head == Head::Comm) {
      parts.insert(blk.from);
      parts.insert(blk.to);
    } else if (blk.head != Head::End) {
      parts.insert(blk.from);
    }
    for (const auto& br : blk.branches) {
      auto child = *q.resolved[br.child.index];
      n.branches.push_back({br.label, br.sort, child});
      if (!in_scc.count(br.child.index))
        for (auto p : nodes_[child.id].participants) parts.insert(p);
    }
  }
  std::vector<Participant> pv(parts.begin(), parts.end());
  for (auto b : order) {
    nodes_[q.resolved[b]->id].participants = pv;
    canon_.emplace(serialize(b, nullptr), *q.resolved[b]);
  }
}

namespace {

bool occurs(const SynType& t, std::size_t idx) {
  switch (t.kind()) {
    case SynType::Kind::End: return false;
    case SynType::Kind::Var: return t.index() == idx;
    case SynType::Kind::Rec: return occurs(t.body(), idx + 1);
    default:
      for (const auto& b : t.branches())
        if (occurs(b.cont, idx)) return true;
      return false;
  }
}

// Remove a binder at depth `cut` that is known not to occur.
SynType strengthen(const SynType& t, std::size_t cut) {
  switch (t.kind()) {
    case SynType::Kind::End: return t;
    case SynType::Kind::Var: return t.index() > cut ? SynType::var(t.index() - 1) : t;
    case SynType::Kind::Rec: return SynType::rec(strengthen(t.body(), cut + 1), t.hint());
    default: {
      std::vector<SynType::Branch> bs;
      for (const auto& b : t.branches()) bs.push_back({b.label, b.sort, strengthen(b.cont, cut)});
      if (t.kind() == SynType::Kind::Comm) return SynType::comm(t.from(), t.to(), std::move(bs));
      if (t.kind() == SynType::Kind::Send) return SynType::send(t.peer(), std::move(bs));
      return SynType::recv(t.peer(), std::move(bs));
    }
  }
}

SynType drop_unused(const SynType& t) {
  switch (t.kind()) {
    case SynType::Kind::End:
    case SynType::Kind::Var:
      return t;
    case SynType::Kind::Rec: {
      auto body = drop_unused(t.body());
      if (occurs(body, 0)) return SynType::rec(body, t.hint());
      return strengthen(body, 0);
    }
    default: {
      std::vector<SynType::Branch> bs;
      for (const auto& b : t.branches()) bs.push_back({b.label, b.sort, drop_unused(b.cont)});
      if (t.kind() == SynType::Kind::Comm) return SynType::comm(t.from(), t.to(), std::move(bs));
      if (t.kind() == SynType::Kind::Send) return SynType::send(t.peer(), std::move(bs));
      return SynType::recv(t.peer(), std::move(bs));
    }
  }
}

std::string binder_name(std::size_t depth) {
  static const char* names[] = {"X", "Y", "Z", "W", "V", "U"};
  if (depth < 6) return names[depth];
  return "X" + std::to_string(depth);
}

}  // namespace

SynType TypeStore::to_syntax(TreeHandle h) const {
  std::vector<TreeHandle> path;
  std::function<SynType(TreeHandle)> go = [&](TreeHandle cur) -> SynType {
    const auto& n = node(cur);
    if (n.head == Head::End) return SynType::end();
    for (std::size_t i = path.size(); i-- > 0;)
      if (path[i] == cur) return SynType::var(path.size() - 1 - i);
    path.push_back(cur);
    std::vector<SynType::Branch> bs;
    for (const auto& b : n.branches) bs.push_back({b.label, b.sort, go(b.child)});
    path.pop_back();
    SynType body = n.head == Head::Comm   ? SynType::comm(n.from, n.to, std::move(bs))
                   : n.head == Head::Send ? SynType::send(n.from, std::move(bs))
                                          : SynType::recv(n.from, std::move(bs));
    return SynType::rec(std::move(body), binder_name(path.size()));
  };
  return drop_unused(go(h));
}

// ---------------------------------------------------------------- balance

namespace {

// bad[u]: from all[u] a cycle is reachable without passing through a node
// that involves `r` (or end).
std::vector<bool> reaches_avoiding_cycle(const TypeStore& store, const std::vector<TreeHandle>& all,
                                         const std::unordered_map<TreeHandle, std::size_t>& index,
                                         Participant r) {
  enum Color : std::uint8_t { White, Grey, Black };
  std::vector<Color> color(all.size(), White);
  std::vector<bool> bad(all.size());
  auto blocked = [&](std::size_t u) {
    const auto& n = store.node(all[u]);
    return n.head == Head::End || n.involves(r);
  };
  std::vector<std::pair<std::size_t, std::size_t>> stack;  // node, next branch
  for (std::size_t s = 0; s < all.size(); ++s) {
    if (color[s] != White) continue;
    if (blocked(s)) {
      color[s] = Black;
      continue;
    }
    color[s] = Grey;
    stack.push_back({s, 0});
    while (!stack.empty()) {
      auto [u, i] = stack.back();
      const auto& bs = store.node(all[u]).branches;
      if (i == bs.size()) {
        color[u] = Black;
        stack.pop_back();
        if (!stack.empty() && bad[u]) bad[stack.back().first] = true;
        continue;
      }
      ++stack.back().second;
      auto v = index.at(bs[i].child);
      if (color[v] == Grey) {
        bad[u] = true;
      } else if (color[v] == Black) {
        if (bad[v]) bad[u] = true;
      } else if (blocked(v)) {
        color[v] = Black;
      } else {
        color[v] = Grey;
        stack.push_back({v, 0});
      }
    }
  }
  return bad;
}

}  // namespace

bool balanced(const TypeStore& store, TreeHandle g) {
  auto all = store.reachable(g);
  std::unordered_map<TreeHandle, std::size_t> index;
  for (std::size_t i = 0; i < all.size(); ++i) index.emplace(all[i], i);
  for (auto r : store.participants(g)) {
    auto bad = reaches_avoiding_cycle(store, all, index, r);
    for (std::size_t u = 0; u < all.size(); ++u)
      if (bad[u] && store.has_participant(all[u], r)) return false;
  }
  return true;
}

bool balanced_by_paths(const TypeStore& store, TreeHandle g) {
  auto all = store.reachable(g);
  const std::size_t bound = all.size() + 1;
  for (auto start : all) {
    for (auto r : store.participants(start)) {
      // Depth-first enumeration of r-avoiding paths, counting nodes.
      std::function<bool(TreeHandle, std::size_t)> longer = [&](TreeHandle u, std::size_t len) {
        const auto& n = store.node(u);
        if (n.head == Head::End || n.involves(r)) return false;
        if (len + 1 >= bound) return true;
        for (const auto& b : n.branches)
          if (longer(b.child, len + 1)) return true;
        return false;
      };
      if (longer(start, 0)) return false;
    }
  }
  return true;
}

PGrafting p_grafting(TypeStore& store, TreeHandle g, Participant r) {
  if (store.node(g).domain != Domain::Global)
    throw Error(ErrorCode::KindMismatch, "p-grafting needs a global type");
  if (!balanced(store, g)) throw Error(ErrorCode::NotBalanced, "global type is not balanced");
  if (!store.has_participant(g, r))
    throw Error(ErrorCode::NotAParticipant, "participant does not occur in the global type");
  PGrafting out;
  std::function<GContext(TreeHandle)> cut = [&](TreeHandle u) {
    const auto& n = store.node(u);
    if (n.head == Head::End || n.involves(r)) {
      auto j = out.holes.size();
      out.holes.emplace(j, u);
      return GContext::make_hole(j);
    }
    GContext c;
    c.kind = GContext::Kind::Comm;
    c.from = n.from;
    c.to = n.to;
    for (const auto& b : n.branches) c.branches.push_back({b.label, b.sort, cut(b.child)});
    return c;
  };
  out.context = cut(g);
  return out;
}

TreeHandle graft(TypeStore& store, const GContext& c, const HoleAssignment& a) {
  RawGraph g;
  std::function<RawRef(const GContext&)> build = [&](const GContext& x) -> RawRef {
    if (x.kind == GContext::Kind::Hole) {
      auto it = a.find(x.hole);
      if (it == a.end())
        throw Error(ErrorCode::MissingHole, "no tree for hole " + std::to_string(x.hole));
      return RawRef::tree(it->second);
    }
    RawGraph::Node n;
    n.domain = Domain::Global;
    n.head = Head::Comm;
    n.from = x.from;
    n.to = x.to;
    for (const auto& b : x.branches) n.branches.push_back({b.label, b.sort, build(b.ctx)});
    return RawRef::raw(g.add(std::move(n)));
  };
  auto root = build(c);
  return store.intern_graph(g, root);
}

std::size_t context_height(const GContext& c) {
  if (c.kind == GContext::Kind::Hole) return 0;
  std::size_t h = 0;
  for (const auto& b : c.branches) h = std::max(h, context_height(b.ctx));
  return h + 1;
}

bool context_mentions(const GContext& c, Participant r) {
  if (c.kind == GContext::Kind::Hole) return false;
  if (c.from == r || c.to == r) return true;
  for (const auto& b : c.branches)
    if (context_mentions(b.ctx, r)) return true;
  return false;
}

std::string render(const TypeStore& store, TreeHandle h, const RoleNames& roles) {
  return render(store.to_syntax(h), roles);
}

std::string to_dot(const TypeStore& store, TreeHandle h, const RoleNames& roles) {
  std::ostringstream os;
  os << "digraph tree {\n  node [shape=box, fontname=\"monospace\"];\n";
  for (auto u : store.reachable(h)) {
    const auto& n = store.node(u);
    std::string text;
    switch (n.head) {
      case Head::End: text = "end"; break;
      case Head::Comm: text = roles.name(n.from) + " -> " + roles.name(n.to); break;
      case Head::Send: text = roles.name(n.from) + " (+)"; break;
      case Head::Recv: text = roles.name(n.from) + " &"; break;
    }
    os << "  n" << u.id << " [label=\"" << text << "\"" << (u == h ? ", penwidth=2" : "")
       << "];\n";
    for (const auto& b : n.branches)
      os << "  n" << u.id << " -> n" << b.child.id << " [label=\"l" << b.label.index << "("
         << to_string(b.sort) << ")\"];\n";
  }
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------- oracle

namespace {

void syn_key(const SynType& t, std::string& out) {
  switch (t.kind()) {
    case SynType::Kind::End: out += 'E'; return;
    case SynType::Kind::Var: out += 'V' + std::to_string(t.index()); return;
    case SynType::Kind::Rec:
      out += "R(";
      syn_key(t.body(), out);
      out += ')';
      return;
    default:
      out += t.kind() == SynType::Kind::Comm ? 'C' : t.kind() == SynType::Kind::Send ? 'S' : 'Q';
      out += std::to_string(t.from().id) + ',' + std::to_string(t.to().id) + '{';
      for (const auto& b : t.branches()) {
        out += std::to_string(b.label.index) + ':' + std::to_string(static_cast<int>(b.sort)) +
               '.';
        syn_key(b.cont, out);
        out += ';';
      }
      out += '}';
  }
}

SynType unfold_all(SynType t) {
  while (t.kind() == SynType::Kind::Rec) t = substitute_top(t.body(), t);
  return t;
}

}  // namespace

bool syntactic_bisim(const SynType& a0, const SynType& b0) {
  std::set<std::pair<std::string, std::string>> assumed;
  std::vector<std::pair<SynType, SynType>> todo{{a0, b0}};
  while (!todo.empty()) {
    auto [a, b] = todo.back();
    todo.pop_back();
    a = unfold_all(a);
    b = unfold_all(b);
    std::string ka, kb;
    syn_key(a, ka);
    syn_key(b, kb);
    if (!assumed.emplace(ka, kb).second) continue;
    if (a.kind() != b.kind()) return false;
    if (a.kind() == SynType::Kind::End) continue;
    if (a.from() != b.from()) return false;
    if (a.kind() == SynType::Kind::Comm && a.to() != b.to()) return false;
    const auto& ba = a.branches();
    const auto& bb = b.branches();
    if (ba.size() != bb.size()) return false;
    for (std::size_t i = 0; i < ba.size(); ++i) {
      if (ba[i].label != bb[i].label || ba[i].sort != bb[i].sort) return false;
      todo.emplace_back(ba[i].cont, bb[i].cont);
    }
  }
  return true;
}

}  // namespace mpst
