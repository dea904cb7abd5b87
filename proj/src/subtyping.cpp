#include "mpst/subtyping.hpp"

#include <deque>
#include <functional>
#include <map>
#include <set>

namespace mpst {

bool subsort(Sort a, Sort b) { return a == b || (a == Sort::Nat && b == Sort::Int); }

std::optional<Sort> sort_lub(Sort a, Sort b) {
  if (subsort(a, b)) return b;
  if (subsort(b, a)) return a;
  return std::nullopt;
}

namespace {

// Head-level rule check; on success appends the demanded child pairs.
bool local_step(const TypeStore& store, TreeHandle a, TreeHandle b,
                std::vector<std::pair<TreeHandle, TreeHandle>>& demands, std::string* why) {
  const auto& x = store.node(a);
  const auto& y = store.node(b);
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (x.domain != Domain::Local || y.domain != Domain::Local)
    throw Error(ErrorCode::KindMismatch, "subtyping is defined on local types");
  if (x.head != y.head) return fail("head mismatch");
  if (x.head == Head::End) return true;
  if (x.peer() != y.peer()) return fail("peer mismatch");
  // Receives: the subtype offers at least the branches of the supertype.
  // Sends: the subtype uses at most the branches of the supertype.
  const auto& small = x.head == Head::Recv ? y : x;
  const auto& large = x.head == Head::Recv ? x : y;
  for (const auto& sb : small.branches) {
    const auto* lb = large.find(sb.label);
    if (!lb) return fail("label l" + std::to_string(sb.label.index) + " not offered");
    const auto& sub_side = x.head == Head::Recv ? *lb : sb;    // branch of a
    const auto& super_side = x.head == Head::Recv ? sb : *lb;  // branch of b
    bool sorts_ok = x.head == Head::Recv ? subsort(super_side.sort, sub_side.sort)
                                         : subsort(sub_side.sort, super_side.sort);
    if (!sorts_ok) return fail("sort mismatch at l" + std::to_string(sb.label.index));
    demands.emplace_back(sub_side.child, super_side.child);
  }
  return true;
}

}  // namespace

SubtypeResult check_subtype(const TypeStore& store, TreeHandle a, TreeHandle b) {
  // Every premise is conjunctive, so the pair is in the greatest fixpoint
  // iff no reachable demanded pair fails locally.
  std::set<std::pair<TreeHandle, TreeHandle>> seen{{a, b}};
  std::deque<std::pair<TreeHandle, TreeHandle>> todo{{a, b}};
  std::vector<std::pair<TreeHandle, TreeHandle>> demands;
  while (!todo.empty()) {
    auto [x, y] = todo.front();
    todo.pop_front();
    demands.clear();
    std::string why;
    if (!local_step(store, x, y, demands, &why)) return {false, std::make_pair(x, y), why};
    for (const auto& d : demands)
      if (seen.insert(d).second) todo.push_back(d);
  }
  return {};
}

bool subtype(const TypeStore& store, TreeHandle a, TreeHandle b) {
  return a == b || check_subtype(store, a, b).holds;
}

bool subtype_bounded(const TypeStore& store, TreeHandle a, TreeHandle b, std::size_t depth) {
  // Written rule by rule, separately from local_step, so it can serve as an oracle.
  std::map<std::tuple<TreeHandle, TreeHandle, std::size_t>, bool> memo;
  std::function<bool(TreeHandle, TreeHandle, std::size_t)> go = [&](TreeHandle x, TreeHandle y,
                                                                      std::size_t k) -> bool {
    if (k == 0) return true;
    auto key = std::make_tuple(x, y, k);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const auto& tx = store.node(x);
    const auto& ty = store.node(y);
    bool ok;
    if (tx.head == Head::End || ty.head == Head::End) {
      ok = tx.head == ty.head;
    } else if (tx.head != ty.head || tx.peer() != ty.peer()) {
      ok = false;
    } else if (tx.head == Head::Recv) {
      // sub-in: every branch of y appears in x with a smaller sort on y's side.
      ok = true;
      for (const auto& by : ty.branches) {
        const NodeBranch* bx = nullptr;
        for (const auto& c : tx.branches)
          if (c.label == by.label) bx = &c;
        if (!bx || !(by.sort == bx->sort || (by.sort == Sort::Nat && bx->sort == Sort::Int)) ||
            !go(bx->child, by.child, k - 1)) {
          ok = false;
          break;
        }
      }
    } else {
      // sub-out: every branch of x appears in y with a larger sort on y's side.
      ok = true;
      for (const auto& bx : tx.branches) {
        const NodeBranch* by = nullptr;
        for (const auto& c : ty.branches)
          if (c.label == bx.label) by = &c;
        if (!by || !(bx.sort == by->sort || (bx.sort == Sort::Nat && by->sort == Sort::Int)) ||
            !go(bx.child, by->child, k - 1)) {
          ok = false;
          break;
        }
      }
    }
    memo.emplace(key, ok);
    return ok;
  };
  return go(a, b, depth);
}

}  // namespace mpst
