#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "mpst/syntax.hpp"

namespace mpst {

struct TreeHandle {
  std::uint32_t id = 0;
  friend auto operator<=>(const TreeHandle&, const TreeHandle&) = default;
};

enum class Domain : std::uint8_t { Global, Local };
enum class Head : std::uint8_t { End, Comm, Send, Recv };

struct NodeBranch {
  Label label;
  Sort sort;
  TreeHandle child;
};

/// One canonical node. For Send/Recv `from` holds the peer and `to` is unused.
struct TreeNode {
  Domain domain = Domain::Global;
  Head head = Head::End;
  Participant from;
  Participant to;
  std::vector<NodeBranch> branches;  // sorted by label
  std::vector<Participant> participants;  // Comm endpoints (or peers) of the whole tree

  Participant peer() const { return from; }
  const NodeBranch* find(Label l) const;
  bool involves(Participant r) const {
    return head == Head::Comm ? (from == r || to == r) : (head != Head::End && from == r);
  }
};

/// Reference used while building a graph: either a node of the same raw
/// graph or an already canonical arena node.
struct RawRef {
  bool arena = false;
  std::uint32_t index = 0;
  static RawRef raw(std::uint32_t i) { return {false, i}; }
  static RawRef tree(TreeHandle h) { return {true, h.id}; }
};

struct RawBranch {
  Label label;
  Sort sort;
  RawRef child;
};

/// A graph of type nodes, possibly cyclic, to be canonicalized in one go.
/// `Alias` nodes forward to another reference; they model `rec` binders and
/// must not form a cycle on their own.
struct RawGraph {
  struct Node {
    bool alias = false;
    RawRef target;
    Domain domain = Domain::Global;
    Head head = Head::End;
    Participant from;
    Participant to;
    std::vector<RawBranch> branches;
  };
  std::vector<Node> nodes;

  std::uint32_t add(Node n) {
    nodes.push_back(std::move(n));
    return static_cast<std::uint32_t>(nodes.size() - 1);
  }
  std::uint32_t add_alias(RawRef target = {}) {
    Node n;
    n.alias = true;
    n.target = target;
    return add(std::move(n));
  }
};

struct GContextBranch;

/// Finite global type prefix with numbered holes.
struct GContext {
  enum class Kind { Hole, Comm };
  Kind kind = Kind::Hole;
  std::size_t hole = 0;
  Participant from;
  Participant to;
  std::vector<GContextBranch> branches;

  static GContext make_hole(std::size_t j) {
    GContext c;
    c.hole = j;
    return c;
  }
};

struct GContextBranch {
  Label label;
  Sort sort;
  GContext ctx;
};

using HoleAssignment = std::map<std::size_t, TreeHandle>;

struct PGrafting {
  GContext context;
  HoleAssignment holes;
};

/// Arena of hash-consed regular trees. Two handles are equal iff the trees
/// they denote are equal, so bisimilarity is an id comparison.
class TypeStore {
 public:
  TypeStore();

  TreeHandle intern_global(const SynGlobal& g);
  TreeHandle intern_local(const SynLocal& t);
  TreeHandle intern(const SynType& t, Domain d);

  /// Canonicalize a raw graph; returns the handle of every raw node.
  std::vector<TreeHandle> intern_graph(const RawGraph& g);
  TreeHandle intern_graph(const RawGraph& g, RawRef root);

  TreeHandle end(Domain d) const { return d == Domain::Global ? global_end_ : local_end_; }

  /// Head view; never a binder since nodes are already unfolded.
  const TreeNode& unfold_head(TreeHandle h) const { return nodes_.at(h.id); }
  const TreeNode& node(TreeHandle h) const { return nodes_.at(h.id); }
  std::size_t size() const { return nodes_.size(); }

  bool bisim(TreeHandle a, TreeHandle b) const;
  const std::vector<Participant>& participants(TreeHandle h) const {
    return nodes_.at(h.id).participants;
  }
  bool has_participant(TreeHandle h, Participant r) const;

  /// Handles reachable from h (h first, breadth-first, label order).
  std::vector<TreeHandle> reachable(TreeHandle h) const;

  /// Back to μ-syntax; the result interns to the same handle.
  SynType to_syntax(TreeHandle h) const;

 private:
  TreeHandle add_node(TreeNode n);
  struct Quotient;
  void intern_scc(const std::vector<std::uint32_t>& members, Quotient& q);

  std::vector<TreeNode> nodes_;
  std::unordered_map<std::string, TreeHandle> canon_;
  TreeHandle global_end_;
  TreeHandle local_end_;
};

bool balanced(const TypeStore& store, TreeHandle g);
PGrafting p_grafting(TypeStore& store, TreeHandle g, Participant r);
TreeHandle graft(TypeStore& store, const GContext& c, const HoleAssignment& a);
std::size_t context_height(const GContext& c);
bool context_mentions(const GContext& c, Participant r);

std::string render(const TypeStore& store, TreeHandle h, const RoleNames& roles);
std::string to_dot(const TypeStore& store, TreeHandle h, const RoleNames& roles);

/// Independent check of tree equality directly on μ-syntax (pairs of
/// unfolded terms explored coinductively). Used as a test oracle.
bool syntactic_bisim(const SynType& a, const SynType& b);

/// Brute-force balancedness: looks for an r-avoiding path longer than the
/// number of reachable nodes. Used as a test oracle.
bool balanced_by_paths(const TypeStore& store, TreeHandle g);

}  // namespace mpst

template <>
struct std::hash<mpst::TreeHandle> {
  std::size_t operator()(mpst::TreeHandle h) const noexcept {
    return std::hash<std::uint32_t>{}(h.id);
  }
};
