#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mpst/core.hpp"

namespace mpst {

/// A runtime value. Booleans are stored as 0/1.
struct Value {
  Sort sort = Sort::Nat;
  std::int64_t number = 0;

  static Value nat(std::int64_t n) { return {Sort::Nat, n}; }
  static Value integer(std::int64_t z) { return {Sort::Int, z}; }
  static Value boolean(bool b) { return {Sort::Bool, b ? 1 : 0}; }

  friend auto operator<=>(const Value&, const Value&) = default;
};

struct SourcePos {
  int line = 0;
  int column = 0;
};

class Expr {
 public:
  enum class Kind { Var, Lit, Succ, Neg, Not, Choice };

  static Expr var(std::string name);
  static Expr lit(Value v);
  static Expr succ(Expr e);
  static Expr neg(Expr e);
  static Expr logical_not(Expr e);
  static Expr choice(Expr lhs, Expr rhs);

  Kind kind() const;
  const std::string& name() const;
  const Value& value() const;
  const Expr& operand() const;  // Succ / Neg / Not, lhs of Choice
  const Expr& rhs() const;      // Choice only
  std::size_t hash() const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend std::strong_ordering operator<=>(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Finite syntax for global and local types with de Bruijn recursion
/// variables. Global terms use End/Var/Rec/Comm, local terms End/Var/Rec/
/// Send/Recv; the parsers never mix the two.
class SynType {
 public:
  enum class Kind { End, Var, Rec, Comm, Send, Recv };

  struct Branch;

  static SynType end();
  static SynType var(std::size_t index);
  static SynType rec(SynType body, std::string hint = "X");
  static SynType comm(Participant from, Participant to, std::vector<Branch> branches);
  static SynType send(Participant peer, std::vector<Branch> branches);
  static SynType recv(Participant peer, std::vector<Branch> branches);

  Kind kind() const;
  bool is_global() const;  // End/Var/Rec are neutral and report true
  std::size_t index() const;
  const std::string& hint() const;
  const SynType& body() const;
  Participant from() const;  // Comm sender, Send/Recv peer
  Participant to() const;    // Comm receiver
  Participant peer() const { return from(); }
  const std::vector<Branch>& branches() const;

  friend bool operator==(const SynType& a, const SynType& b);

 private:
  struct Node;
  explicit SynType(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct SynType::Branch {
  Label label;
  Sort sort;
  SynType cont;
};

using SynGlobal = SynType;
using SynLocal = SynType;

class Process {
 public:
  enum class Kind { Inact, Var, Rec, Send, Recv, Ite };

  struct RecvBranch;

  static Process inact(SourcePos pos = {});
  static Process var(std::size_t index, SourcePos pos = {});
  static Process rec(Process body, std::string hint = "X", SourcePos pos = {});
  static Process send(Participant peer, Label label, Expr payload, Process cont,
                      SourcePos pos = {});
  static Process recv(Participant peer, std::vector<RecvBranch> branches,
                      SourcePos pos = {});
  static Process ite(Expr guard, Process then_branch, Process else_branch,
                     SourcePos pos = {});

  Kind kind() const;
  std::size_t index() const;
  const std::string& hint() const;
  const Process& body() const;  // Rec body, Send continuation
  Participant peer() const;
  Label label() const;
  const Expr& payload() const;  // Send payload, Ite guard
  const std::vector<RecvBranch>& branches() const;
  const RecvBranch* find_branch(Label l) const;
  const Process& then_branch() const;
  const Process& else_branch() const;
  SourcePos pos() const;
  std::size_t hash() const;

  friend bool operator==(const Process& a, const Process& b);
  friend std::strong_ordering operator<=>(const Process& a, const Process& b);

 private:
  struct Node;
  explicit Process(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct Process::RecvBranch {
  Label label;
  std::string binder;
  Process body;
};

/// Normal form of `p <| P || q <| Q || ...`; the empty map is the unit
/// session. Structural congruence holds by construction.
using SessionForm = std::map<Participant, Process>;

/// Parsed `p : T` entries, before interning.
using EnvSyntax = std::map<Participant, SynLocal>;

SynGlobal parse_global(std::string_view text, RoleNames& roles);
SynLocal parse_local(std::string_view text, RoleNames& roles);
Expr parse_expr(std::string_view text, RoleNames& roles);
Process parse_process(std::string_view text, RoleNames& roles);
SessionForm parse_session(std::string_view text, RoleNames& roles);
EnvSyntax parse_env(std::string_view text, RoleNames& roles);

std::string render(Sort s);
std::string render(const Value& v);
std::string render(const Expr& e);
std::string render(const SynType& t, const RoleNames& roles);
std::string render(const Process& p, const RoleNames& roles);
std::string render(const SessionForm& m, const RoleNames& roles);
std::string render(const EnvSyntax& env, const RoleNames& roles);

/// Replace recursion variable 0 by `replacement` (closed) in `body`.
SynType substitute_top(const SynType& body, const SynType& replacement);
Process substitute_top(const Process& body, const Process& replacement);

/// Unfold a top-level `mu X. P` once.
Process unfold_rec(const Process& rec);

/// P[v/x]: replace free expression variable `name` by a literal.
Process substitute_value(const Process& p, const std::string& name, const Value& v);
Expr substitute_value(const Expr& e, const std::string& name, const Value& v);

bool is_closed(const Process& p);
bool is_closed(const SynType& t);

}  // namespace mpst

template <>
struct std::hash<mpst::Process> {
  std::size_t operator()(const mpst::Process& p) const noexcept { return p.hash(); }
};
