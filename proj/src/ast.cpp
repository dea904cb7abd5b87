#include <algorithm>
#include <cassert>
#include <functional>

#include "mpst/syntax.hpp"

namespace mpst {

// ---------------------------------------------------------------- Expr

struct Expr::Node {
  Kind kind;
  std::string name;
  Value value;
  std::vector<Expr> args;
  std::size_t hash = 0;
};

namespace {

std::size_t hash_value(const Value& v) {
  return hash_combine(static_cast<std::size_t>(v.sort) + 1,
                      std::hash<std::int64_t>{}(v.number));
}

}  // namespace

Expr Expr::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->hash = hash_combine(11, std::hash<std::string>{}(name));
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::lit(Value v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Lit;
  n->value = v;
  n->hash = hash_combine(13, hash_value(v));
  return Expr(std::move(n));
}

namespace {

template <class Node, class Kind, class E>
std::shared_ptr<Node> unary_node(Kind k, E e) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->hash = hash_combine(17 + static_cast<std::size_t>(k), e.hash());
  n->args.push_back(std::move(e));
  return n;
}

}  // namespace

Expr Expr::succ(Expr e) { return Expr(unary_node<Node>(Kind::Succ, std::move(e))); }
Expr Expr::neg(Expr e) { return Expr(unary_node<Node>(Kind::Neg, std::move(e))); }
Expr Expr::logical_not(Expr e) { return Expr(unary_node<Node>(Kind::Not, std::move(e))); }

Expr Expr::choice(Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Choice;
  n->hash = hash_combine(hash_combine(29, lhs.hash()), rhs.hash());
  n->args.push_back(std::move(lhs));
  n->args.push_back(std::move(rhs));
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const { return node_->kind; }
const std::string& Expr::name() const { return node_->name; }
const Value& Expr::value() const { return node_->value; }
const Expr& Expr::operand() const { return node_->args.at(0); }
const Expr& Expr::rhs() const { return node_->args.at(1); }
std::size_t Expr::hash() const { return node_->hash; }

std::strong_ordering operator<=>(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.hash() <=> b.hash(); c != 0) return c;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  switch (a.kind()) {
    case Expr::Kind::Var: return a.name() <=> b.name();
    case Expr::Kind::Lit: return a.value() <=> b.value();
    default: break;
  }
  for (std::size_t i = 0; i < a.node_->args.size(); ++i) {
    if (auto c = a.node_->args[i] <=> b.node_->args[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

bool operator==(const Expr& a, const Expr& b) { return (a <=> b) == 0; }

// ---------------------------------------------------------------- SynType

struct SynType::Node {
  Kind kind;
  std::size_t index = 0;
  std::string hint;
  std::vector<SynType> body;  // 0 or 1 element
  Participant from, to;
  std::vector<Branch> branches;
};

namespace {

std::vector<SynType::Branch> sorted(std::vector<SynType::Branch> bs) {
  std::sort(bs.begin(), bs.end(),
            [](const auto& x, const auto& y) { return x.label < y.label; });
  return bs;
}

}  // namespace

SynType SynType::end() {
  static const SynType kEnd = [] {
    auto n = std::make_shared<Node>();
    n->kind = Kind::End;
    return SynType(std::move(n));
  }();
  return kEnd;
}

SynType SynType::var(std::size_t index) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->index = index;
  return SynType(std::move(n));
}

SynType SynType::rec(SynType body, std::string hint) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Rec;
  n->hint = std::move(hint);
  n->body.push_back(std::move(body));
  return SynType(std::move(n));
}

SynType SynType::comm(Participant from, Participant to, std::vector<Branch> branches) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Comm;
  n->from = from;
  n->to = to;
  n->branches = sorted(std::move(branches));
  return SynType(std::move(n));
}

SynType SynType::send(Participant peer, std::vector<Branch> branches) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Send;
  n->from = peer;
  n->branches = sorted(std::move(branches));
  return SynType(std::move(n));
}

SynType SynType::recv(Participant peer, std::vector<Branch> branches) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Recv;
  n->from = peer;
  n->branches = sorted(std::move(branches));
  return SynType(std::move(n));
}

SynType::Kind SynType::kind() const { return node_->kind; }
bool SynType::is_global() const {
  return node_->kind != Kind::Send && node_->kind != Kind::Recv;
}
std::size_t SynType::index() const { return node_->index; }
const std::string& SynType::hint() const { return node_->hint; }
const SynType& SynType::body() const { return node_->body.at(0); }
Participant SynType::from() const { return node_->from; }
Participant SynType::to() const { return node_->to; }
const std::vector<SynType::Branch>& SynType::branches() const { return node_->branches; }

bool operator==(const SynType& a, const SynType& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case SynType::Kind::End: return true;
    case SynType::Kind::Var: return a.index() == b.index();
    case SynType::Kind::Rec: return a.body() == b.body();
    case SynType::Kind::Comm:
    case SynType::Kind::Send:
    case SynType::Kind::Recv: {
      if (a.from() != b.from() || a.to() != b.to()) return false;
      const auto& x = a.branches();
      const auto& y = b.branches();
      if (x.size() != y.size()) return false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i].label != y[i].label || x[i].sort != y[i].sort || !(x[i].cont == y[i].cont))
          return false;
      }
      return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------- Process

struct Process::Node {
  Kind kind;
  std::size_t index = 0;
  std::string hint;
  Participant peer;
  Label label;
  std::vector<Expr> expr;       // Send payload or Ite guard
  std::vector<Process> kids;    // Rec body | Send cont | Ite then/else
  std::vector<RecvBranch> branches;
  SourcePos pos;
  std::size_t hash = 0;
};

namespace {

std::size_t hash_node_head(Process::Kind k, std::size_t extra) {
  return hash_combine(101 + static_cast<std::size_t>(k), extra);
}

}  // namespace

Process Process::inact(SourcePos pos) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Inact;
  n->pos = pos;
  n->hash = hash_node_head(Kind::Inact, 0);
  return Process(std::move(n));
}

Process Process::var(std::size_t index, SourcePos pos) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->index = index;
  n->pos = pos;
  n->hash = hash_node_head(Kind::Var, index);
  return Process(std::move(n));
}

Process Process::rec(Process body, std::string hint, SourcePos pos) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Rec;
  n->hint = std::move(hint);
  n->pos = pos;
  n->hash = hash_node_head(Kind::Rec, body.hash());
  n->kids.push_back(std::move(body));
  return Process(std::move(n));
}

Process Process::send(Participant peer, Label label, Expr payload, Process cont,
                      SourcePos pos) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Send;
  n->peer = peer;
  n->label = label;
  n->pos = pos;
  std::size_t h = hash_combine(peer.id, label.index);
  h = hash_combine(h, payload.hash());
  h = hash_combine(h, cont.hash());
  n->hash = hash_node_head(Kind::Send, h);
  n->expr.push_back(std::move(payload));
  n->kids.push_back(std::move(cont));
  return Process(std::move(n));
}

Process Process::recv(Participant peer, std::vector<RecvBranch> branches, SourcePos pos) {
  std::sort(branches.begin(), branches.end(),
            [](const auto& x, const auto& y) { return x.label < y.label; });
  auto n = std::make_shared<Node>();
  n->kind = Kind::Recv;
  n->peer = peer;
  n->pos = pos;
  std::size_t h = peer.id;
  for (const auto& b : branches) {
    h = hash_combine(h, b.label.index);
    h = hash_combine(h, std::hash<std::string>{}(b.binder));
    h = hash_combine(h, b.body.hash());
  }
  n->hash = hash_node_head(Kind::Recv, h);
  n->branches = std::move(branches);
  return Process(std::move(n));
}

Process Process::ite(Expr guard, Process then_branch, Process else_branch, SourcePos pos) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Ite;
  n->pos = pos;
  std::size_t h = hash_combine(guard.hash(), then_branch.hash());
  n->hash = hash_node_head(Kind::Ite, hash_combine(h, else_branch.hash()));
  n->expr.push_back(std::move(guard));
  n->kids.push_back(std::move(then_branch));
  n->kids.push_back(std::move(else_branch));
  return Process(std::move(n));
}

Process::Kind Process::kind() const { return node_->kind; }
std::size_t Process::index() const { return node_->index; }
const std::string& Process::hint() const { return node_->hint; }
const Process& Process::body() const { return node_->kids.at(0); }
Participant Process::peer() const { return node_->peer; }
Label Process::label() const { return node_->label; }
const Expr& Process::payload() const { return node_->expr.at(0); }
const std::vector<Process::RecvBranch>& Process::branches() const { return node_->branches; }
const Process& Process::then_branch() const { return node_->kids.at(0); }
const Process& Process::else_branch() const { return node_->kids.at(1); }
SourcePos Process::pos() const { return node_->pos; }
std::size_t Process::hash() const { return node_->hash; }

const Process::RecvBranch* Process::find_branch(Label l) const {
  for (const auto& b : node_->branches)
    if (b.label == l) return &b;
  return nullptr;
}

std::strong_ordering operator<=>(const Process& a, const Process& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.hash() <=> b.hash(); c != 0) return c;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (auto c = x.kind <=> y.kind; c != 0) return c;
  if (auto c = x.index <=> y.index; c != 0) return c;
  if (auto c = x.peer <=> y.peer; c != 0) return c;
  if (auto c = x.label <=> y.label; c != 0) return c;
  if (auto c = x.expr.size() <=> y.expr.size(); c != 0) return c;
  for (std::size_t i = 0; i < x.expr.size(); ++i)
    if (auto c = x.expr[i] <=> y.expr[i]; c != 0) return c;
  if (auto c = x.kids.size() <=> y.kids.size(); c != 0) return c;
  for (std::size_t i = 0; i < x.kids.size(); ++i)
    if (auto c = x.kids[i] <=> y.kids[i]; c != 0) return c;
  if (auto c = x.branches.size() <=> y.branches.size(); c != 0) return c;
  for (std::size_t i = 0; i < x.branches.size(); ++i) {
    const auto& p = x.branches[i];
    const auto& q = y.branches[i];
    if (auto c = p.label <=> q.label; c != 0) return c;
    if (auto c = p.binder <=> q.binder; c != 0) return c;
    if (auto c = p.body <=> q.body; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

bool operator==(const Process& a, const Process& b) { return (a <=> b) == 0; }

// ---------------------------------------------------------------- substitution

namespace {

SynType subst_type(const SynType& t, std::size_t depth, const SynType& repl) {
  switch (t.kind()) {
    case SynType::Kind::End: return t;
    case SynType::Kind::Var:
      if (t.index() == depth) return repl;
      if (t.index() > depth) return SynType::var(t.index() - 1);
      return t;
    case SynType::Kind::Rec:
      return SynType::rec(subst_type(t.body(), depth + 1, repl), t.hint());
    case SynType::Kind::Comm:
    case SynType::Kind::Send:
    case SynType::Kind::Recv: {
      std::vector<SynType::Branch> bs;
      for (const auto& b : t.branches())
        bs.push_back({b.label, b.sort, subst_type(b.cont, depth, repl)});
      if (t.kind() == SynType::Kind::Comm) return SynType::comm(t.from(), t.to(), std::move(bs));
      if (t.kind() == SynType::Kind::Send) return SynType::send(t.peer(), std::move(bs));
      return SynType::recv(t.peer(), std::move(bs));
    }
  }
  return t;
}

Process subst_proc(const Process& p, std::size_t depth, const Process& repl) {
  switch (p.kind()) {
    case Process::Kind::Inact: return p;
    case Process::Kind::Var:
      if (p.index() == depth) return repl;
      if (p.index() > depth) return Process::var(p.index() - 1, p.pos());
      return p;
    case Process::Kind::Rec:
      return Process::rec(subst_proc(p.body(), depth + 1, repl), p.hint(), p.pos());
    case Process::Kind::Send:
      return Process::send(p.peer(), p.label(), p.payload(),
                           subst_proc(p.body(), depth, repl), p.pos());
    case Process::Kind::Recv: {
      std::vector<Process::RecvBranch> bs;
      for (const auto& b : p.branches())
        bs.push_back({b.label, b.binder, subst_proc(b.body, depth, repl)});
      return Process::recv(p.peer(), std::move(bs), p.pos());
    }
    case Process::Kind::Ite:
      return Process::ite(p.payload(), subst_proc(p.then_branch(), depth, repl),
                          subst_proc(p.else_branch(), depth, repl), p.pos());
  }
  return p;
}

}  // namespace

SynType substitute_top(const SynType& body, const SynType& replacement) {
  return subst_type(body, 0, replacement);
}

Process substitute_top(const Process& body, const Process& replacement) {
  return subst_proc(body, 0, replacement);
}

Process unfold_rec(const Process& rec) {
  assert(rec.kind() == Process::Kind::Rec);
  return substitute_top(rec.body(), rec);
}

Expr substitute_value(const Expr& e, const std::string& name, const Value& v) {
  switch (e.kind()) {
    case Expr::Kind::Var: return e.name() == name ? Expr::lit(v) : e;
    case Expr::Kind::Lit: return e;
    case Expr::Kind::Succ: return Expr::succ(substitute_value(e.operand(), name, v));
    case Expr::Kind::Neg: return Expr::neg(substitute_value(e.operand(), name, v));
    case Expr::Kind::Not: return Expr::logical_not(substitute_value(e.operand(), name, v));
    case Expr::Kind::Choice:
      return Expr::choice(substitute_value(e.operand(), name, v),
                          substitute_value(e.rhs(), name, v));
  }
  return e;
}

Process substitute_value(const Process& p, const std::string& name, const Value& v) {
  switch (p.kind()) {
    case Process::Kind::Inact:
    case Process::Kind::Var: return p;
    case Process::Kind::Rec:
      return Process::rec(substitute_value(p.body(), name, v), p.hint(), p.pos());
    case Process::Kind::Send:
      return Process::send(p.peer(), p.label(), substitute_value(p.payload(), name, v),
                           substitute_value(p.body(), name, v), p.pos());
    case Process::Kind::Recv: {
      std::vector<Process::RecvBranch> bs;
      for (const auto& b : p.branches()) {
        // An inner binder with the same name shadows the substitution.
        bs.push_back({b.label, b.binder,
                      b.binder == name ? b.body : substitute_value(b.body, name, v)});
      }
      return Process::recv(p.peer(), std::move(bs), p.pos());
    }
    case Process::Kind::Ite:
      return Process::ite(substitute_value(p.payload(), name, v),
                          substitute_value(p.then_branch(), name, v),
                          substitute_value(p.else_branch(), name, v), p.pos());
  }
  return p;
}

namespace {

bool expr_closed(const Expr& e, std::vector<std::string>& scope) {
  switch (e.kind()) {
    case Expr::Kind::Var:
      return std::find(scope.begin(), scope.end(), e.name()) != scope.end();
    case Expr::Kind::Lit: return true;
    case Expr::Kind::Choice:
      return expr_closed(e.operand(), scope) && expr_closed(e.rhs(), scope);
    default: return expr_closed(e.operand(), scope);
  }
}

bool proc_closed(const Process& p, std::size_t depth, std::vector<std::string>& scope) {
  switch (p.kind()) {
    case Process::Kind::Inact: return true;
    case Process::Kind::Var: return p.index() < depth;
    case Process::Kind::Rec: return proc_closed(p.body(), depth + 1, scope);
    case Process::Kind::Send:
      return expr_closed(p.payload(), scope) && proc_closed(p.body(), depth, scope);
    case Process::Kind::Recv:
      for (const auto& b : p.branches()) {
        scope.push_back(b.binder);
        bool ok = proc_closed(b.body, depth, scope);
        scope.pop_back();
        if (!ok) return false;
      }
      return true;
    case Process::Kind::Ite:
      return expr_closed(p.payload(), scope) && proc_closed(p.then_branch(), depth, scope) &&
             proc_closed(p.else_branch(), depth, scope);
  }
  return false;
}

bool type_closed(const SynType& t, std::size_t depth) {
  switch (t.kind()) {
    case SynType::Kind::End: return true;
    case SynType::Kind::Var: return t.index() < depth;
    case SynType::Kind::Rec: return type_closed(t.body(), depth + 1);
    default:
      for (const auto& b : t.branches())
        if (!type_closed(b.cont, depth)) return false;
      return true;
  }
}

}  // namespace

bool is_closed(const Process& p) {
  std::vector<std::string> scope;
  return proc_closed(p, 0, scope);
}

bool is_closed(const SynType& t) { return type_closed(t, 0); }

}  // namespace mpst
