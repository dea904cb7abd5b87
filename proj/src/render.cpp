#include <algorithm>

#include "mpst/syntax.hpp"

namespace mpst {
namespace {

// Names for de Bruijn binders. A hint already visible in scope gets a
// numeric suffix so that rendering never captures.
class Scope {
 public:
  std::string push(const std::string& hint) {
    std::string base = hint.empty() ? "X" : hint;
    std::string name = base;
    for (int k = 1; visible(name); ++k) name = base + std::to_string(k);
    names_.push_back(name);
    return name;
  }
  void pop() { names_.pop_back(); }
  std::string lookup(std::size_t index) const {
    if (index >= names_.size()) return "?" + std::to_string(index);
    return names_[names_.size() - 1 - index];
  }

 private:
  bool visible(const std::string& n) const {
    return std::find(names_.begin(), names_.end(), n) != names_.end();
  }
  std::vector<std::string> names_;
};

std::string label_text(Label l) { return "l" + std::to_string(l.index); }

void render_type(const SynType& t, const RoleNames& roles, Scope& scope, std::string& out) {
  switch (t.kind()) {
    case SynType::Kind::End:
      out += "end";
      return;
    case SynType::Kind::Var:
      out += scope.lookup(t.index());
      return;
    case SynType::Kind::Rec: {
      out += "rec " + scope.push(t.hint()) + " . ";
      render_type(t.body(), roles, scope, out);
      scope.pop();
      return;
    }
    case SynType::Kind::Comm:
      out += roles.name(t.from()) + " -> " + roles.name(t.to()) + " { ";
      break;
    case SynType::Kind::Send:
      out += roles.name(t.peer()) + " (+) { ";
      break;
    case SynType::Kind::Recv:
      out += roles.name(t.peer()) + " & { ";
      break;
  }
  bool first = true;
  for (const auto& b : t.branches()) {
    if (!first) out += ", ";
    first = false;
    out += label_text(b.label) + "(" + std::string(to_string(b.sort)) + "). ";
    render_type(b.cont, roles, scope, out);
  }
  out += " }";
}

void render_expr(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case Expr::Kind::Var:
      out += e.name();
      return;
    case Expr::Kind::Lit:
      out += render(e.value());
      return;
    case Expr::Kind::Succ:
    case Expr::Kind::Neg:
    case Expr::Kind::Not: {
      out += e.kind() == Expr::Kind::Succ ? "succ " : e.kind() == Expr::Kind::Neg ? "neg " : "not ";
      bool paren = e.operand().kind() == Expr::Kind::Choice;
      if (paren) out += "(";
      render_expr(e.operand(), out);
      if (paren) out += ")";
      return;
    }
    case Expr::Kind::Choice: {
      // Choice is left-associative, so only a right operand choice needs parens.
      render_expr(e.operand(), out);
      out += " (+) ";
      bool paren = e.rhs().kind() == Expr::Kind::Choice;
      if (paren) out += "(";
      render_expr(e.rhs(), out);
      if (paren) out += ")";
      return;
    }
  }
}

void render_proc(const Process& p, const RoleNames& roles, Scope& scope, std::string& out) {
  switch (p.kind()) {
    case Process::Kind::Inact:
      out += "0";
      return;
    case Process::Kind::Var:
      out += scope.lookup(p.index());
      return;
    case Process::Kind::Rec:
      out += "mu " + scope.push(p.hint()) + " . ";
      render_proc(p.body(), roles, scope, out);
      scope.pop();
      return;
    case Process::Kind::Send:
      out += roles.name(p.peer()) + "!" + label_text(p.label()) + "(";
      render_expr(p.payload(), out);
      out += "). ";
      render_proc(p.body(), roles, scope, out);
      return;
    case Process::Kind::Recv: {
      out += roles.name(p.peer()) + "?{ ";
      bool first = true;
      for (const auto& b : p.branches()) {
        if (!first) out += ", ";
        first = false;
        out += label_text(b.label) + "(" + b.binder + "). ";
        render_proc(b.body, roles, scope, out);
      }
      out += " }";
      return;
    }
    case Process::Kind::Ite: {
      out += "if ";
      render_expr(p.payload(), out);
      out += " then ";
      // A nested conditional in the then-branch would swallow our else.
      bool paren = p.then_branch().kind() == Process::Kind::Ite;
      if (paren) out += "(";
      render_proc(p.then_branch(), roles, scope, out);
      if (paren) out += ")";
      out += " else ";
      render_proc(p.else_branch(), roles, scope, out);
      return;
    }
  }
}

}  // namespace

std::string render(Sort s) { return std::string(to_string(s)); }

std::string render(const Value& v) {
  switch (v.sort) {
    case Sort::Nat: return std::to_string(v.number);
    case Sort::Int: return (v.number < 0 ? "" : "+") + std::to_string(v.number);
    case Sort::Bool: return v.number ? "true" : "false";
  }
  return "?";
}

std::string render(const Expr& e) {
  std::string out;
  render_expr(e, out);
  return out;
}

std::string render(const SynType& t, const RoleNames& roles) {
  Scope scope;
  std::string out;
  render_type(t, roles, scope, out);
  return out;
}

std::string render(const Process& p, const RoleNames& roles) {
  Scope scope;
  std::string out;
  render_proc(p, roles, scope, out);
  return out;
}

std::string render(const SessionForm& m, const RoleNames& roles) {
  std::string out;
  for (const auto& [who, proc] : m) {
    if (!out.empty()) out += " || ";
    out += roles.name(who) + " <| " + render(proc, roles);
  }
  return out;
}

std::string render(const EnvSyntax& env, const RoleNames& roles) {
  std::string out;
  for (const auto& [who, t] : env) out += roles.name(who) + " : " + render(t, roles) + "\n";
  return out;
}

}  // namespace mpst
