#include "mpst/typecheck.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "mpst/subtyping.hpp"

namespace mpst {

Sort sort_of_expr(const TypingCtx& ctx, const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Var: {
      auto it = ctx.exprs.find(e.name());
      if (it == ctx.exprs.end())
        throw Error(ErrorCode::UnboundVariable, "unbound variable '" + e.name() + "'");
      return it->second;
    }
    case Expr::Kind::Lit:
      return e.value().sort;
    case Expr::Kind::Succ: {
      auto s = sort_of_expr(ctx, e.operand());
      if (s == Sort::Bool) throw Error(ErrorCode::SortError, "succ applied to a boolean");
      return s;
    }
    case Expr::Kind::Neg:
      if (sort_of_expr(ctx, e.operand()) == Sort::Bool)
        throw Error(ErrorCode::SortError, "neg applied to a boolean");
      return Sort::Int;
    case Expr::Kind::Not:
      if (sort_of_expr(ctx, e.operand()) != Sort::Bool)
        throw Error(ErrorCode::SortError, "not applied to a number");
      return Sort::Bool;
    case Expr::Kind::Choice: {
      auto a = sort_of_expr(ctx, e.operand());
      auto b = sort_of_expr(ctx, e.rhs());
      auto lub = sort_lub(a, b);
      if (!lub)
        throw Error(ErrorCode::NoUpperBound, "no common sort for " + std::string(to_string(a)) +
                                                 " and " + std::string(to_string(b)));
      return *lub;
    }
  }
  throw Error(ErrorCode::SortError, "unknown expression");
}

const char* to_string(TypingErrorKind k) {
  switch (k) {
    case TypingErrorKind::HeadMismatch: return "HeadMismatch";
    case TypingErrorKind::MissingLabel: return "MissingLabel";
    case TypingErrorKind::SortMismatch: return "SortMismatch";
    case TypingErrorKind::UnexpectedEnd: return "UnexpectedEnd";
    case TypingErrorKind::UnboundVariable: return "UnboundVariable";
    case TypingErrorKind::NotAssociated: return "NotAssociated";
    case TypingErrorKind::DomainMismatch: return "DomainMismatch";
  }
  return "?";
}

namespace {

class Checker {
 public:
  Checker(const TypeStore& store, const RoleNames* roles) : store_(store), roles_(roles) {}

  TypingVerdict run(TypingCtx& ctx, const Process& p, TreeHandle t) {
    const auto& n = store_.node(t);
    switch (p.kind()) {
      case Process::Kind::Inact:
        if (n.head != Head::End) return fail(TypingErrorKind::HeadMismatch, p, "expected " + show(t) + ", found 0");
        return {};
      case Process::Kind::Var: {
        if (p.index() >= ctx.procs.size())
          return fail(TypingErrorKind::UnboundVariable, p, "unbound process variable");
        auto assumed = ctx.procs[ctx.procs.size() - 1 - p.index()];
        if (!subtype(store_, assumed, t))
          return fail(TypingErrorKind::HeadMismatch, p,
                      "recursion assumes " + show(assumed) + ", expected " + show(t));
        return {};
      }
      case Process::Kind::Rec: {
        ctx.procs.push_back(t);
        auto v = run(ctx, p.body(), t);
        ctx.procs.pop_back();
        return v;
      }
      case Process::Kind::Ite: {
        auto s = sort(ctx, p.payload(), p);
        if (!s.first) return s.second;
        if (*s.first != Sort::Bool)
          return fail(TypingErrorKind::SortMismatch, p, "condition has sort " + std::string(to_string(*s.first)));
        auto a = run(ctx, p.then_branch(), t);
        if (!a) return a;
        return run(ctx, p.else_branch(), t);
      }
      case Process::Kind::Send: {
        if (n.head == Head::End) return fail(TypingErrorKind::UnexpectedEnd, p, "expected end, found a send");
        if (n.head != Head::Send || n.peer() != p.peer())
          return fail(TypingErrorKind::HeadMismatch, p, "expected " + show(t) + ", found a send to " + name(p.peer()));
        const auto* b = n.find(p.label());
        if (!b) return fail(TypingErrorKind::MissingLabel, p, "label l" + std::to_string(p.label().index) + " not offered by " + show(t));
        auto s = sort(ctx, p.payload(), p);
        if (!s.first) return s.second;
        if (!subsort(*s.first, b->sort))
          return fail(TypingErrorKind::SortMismatch, p,
                      "payload has sort " + std::string(to_string(*s.first)) + ", expected " +
                          std::string(to_string(b->sort)));
        return run(ctx, p.body(), b->child);
      }
      case Process::Kind::Recv: {
        if (n.head == Head::End) return fail(TypingErrorKind::UnexpectedEnd, p, "expected end, found a receive");
        if (n.head != Head::Recv || n.peer() != p.peer())
          return fail(TypingErrorKind::HeadMismatch, p, "expected " + show(t) + ", found a receive from " + name(p.peer()));
        for (const auto& b : n.branches) {
          const auto* pb = p.find_branch(b.label);
          if (!pb)
            return fail(TypingErrorKind::MissingLabel, p, "no branch for l" + std::to_string(b.label.index));
          auto saved = ctx.exprs.find(pb->binder) == ctx.exprs.end()
                           ? std::nullopt
                           : std::optional<Sort>(ctx.exprs[pb->binder]);
          ctx.exprs[pb->binder] = b.sort;
          auto v = run(ctx, pb->body, b.child);
          if (saved)
            ctx.exprs[pb->binder] = *saved;
          else
            ctx.exprs.erase(pb->binder);
          if (!v) return v;
        }
        return {};
      }
    }
    return {};
  }

 private:
  std::pair<std::optional<Sort>, TypingVerdict> sort(const TypingCtx& ctx, const Expr& e, const Process& at) {
    try {
      return {sort_of_expr(ctx, e), {}};
    } catch (const Error& err) {
      auto kind = err.code() == ErrorCode::UnboundVariable ? TypingErrorKind::UnboundVariable
                                                           : TypingErrorKind::SortMismatch;
      return {std::nullopt, fail(kind, at, err.what())};
    }
  }

  TypingVerdict fail(TypingErrorKind k, const Process& at, std::string msg) const {
    TypingVerdict v;
    v.holds = false;
    v.failure = TypingFailure{k, std::move(msg), at.pos(), std::nullopt};
    return v;
  }

  std::string show(TreeHandle t) const {
    if (roles_) return render(store_, t, *roles_);
    return "type #" + std::to_string(t.id);
  }
  std::string name(Participant p) const {
    return roles_ ? roles_->name(p) : "#" + std::to_string(p.id);
  }

  const TypeStore& store_;
  const RoleNames* roles_;
};

}  // namespace

TypingVerdict check_process(const TypeStore& store, const TypingCtx& ctx, const Process& p,
                            TreeHandle t, const RoleNames* roles) {
  TypingCtx local = ctx;
  return Checker(store, roles).run(local, p, t);
}

TypingVerdict check_process(const TypeStore& store, const Process& p, TreeHandle t,
                            const RoleNames* roles) {
  return check_process(store, TypingCtx{}, p, t, roles);
}

TypingVerdict check_session(TypeStore& store, const SessionForm& m, const TypeEnv& env,
                            TreeHandle g, bool strict, const RoleNames* roles) {
  auto failure = [](TypingErrorKind k, std::string msg, std::optional<Participant> who = std::nullopt) {
    TypingVerdict v;
    v.holds = false;
    v.failure = TypingFailure{k, std::move(msg), {}, who};
    return v;
  };
  auto name = [&](Participant p) { return roles ? roles->name(p) : "#" + std::to_string(p.id); };
  for (const auto& [p, proc] : m)
    if (!env.contains(p)) return failure(TypingErrorKind::DomainMismatch, "no type for " + name(p), p);
  for (const auto& [p, t] : env)
    if (!m.contains(p)) return failure(TypingErrorKind::DomainMismatch, "no process for " + name(p), p);
  try {
    auto report = check_associated(store, env, g, strict);
    if (!report.holds) {
      std::string why = "environment is not associated with the global type";
      for (const auto& [who, e] : report.entries)
        if (!e.ok) {
          why += ": " + name(who) + " " + e.note;
          break;
        }
      return failure(TypingErrorKind::NotAssociated, why);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::PreconditionViolation) throw;
    return failure(TypingErrorKind::NotAssociated, e.what());
  }
  for (const auto& [p, proc] : m) {
    auto v = check_process(store, proc, env.at(p), roles);
    if (!v) {
      v.failure->participant = p;
      return v;
    }
  }
  return {};
}

// ---------------------------------------------------------------- realizers

namespace {

class Realizer {
 public:
  explicit Realizer(const TypeStore& store) : store_(store) {}

  Process build(TreeHandle t) {
    std::vector<TreeHandle> ancestors, kept;
    return go(t, ancestors, kept, 0);
  }

 private:
  // Ancestors referenced from the unrolling of t below the given stack.
  std::set<TreeHandle> refs(TreeHandle t, std::vector<TreeHandle>& ancestors) {
    if (std::find(ancestors.begin(), ancestors.end(), t) != ancestors.end()) return {t};
    ancestors.push_back(t);
    std::set<TreeHandle> out;
    for (const auto& b : store_.node(t).branches) {
      auto r = refs(b.child, ancestors);
      out.insert(r.begin(), r.end());
    }
    ancestors.pop_back();
    out.erase(t);
    return out;
  }

  Process go(TreeHandle t, std::vector<TreeHandle>& ancestors, std::vector<TreeHandle>& kept,
             std::size_t vars) {
    auto at = std::find(kept.begin(), kept.end(), t);
    if (at != kept.end()) return Process::var(static_cast<std::size_t>(kept.end() - at) - 1);

    ancestors.push_back(t);
    bool recursive = false;
    for (const auto& b : store_.node(t).branches)
      recursive = recursive || refs(b.child, ancestors).contains(t);
    if (recursive) kept.push_back(t);

    const auto& n = store_.node(t);
    Process body = Process::inact();
    if (n.head == Head::Send) {
      // Last branch is the fallback; earlier ones are each chosen by a coin.
      std::vector<Process> options;
      for (const auto& b : n.branches)
        options.push_back(Process::send(n.peer(), b.label, Expr::lit(least(b.sort)),
                                        go(b.child, ancestors, kept, vars)));
      body = options.back();
      for (std::size_t i = options.size() - 1; i-- > 0;)
        body = Process::ite(Expr::choice(Expr::lit(Value::boolean(true)), Expr::lit(Value::boolean(false))),
                            options[i], body);
    } else if (n.head == Head::Recv) {
      std::vector<Process::RecvBranch> bs;
      std::string x = "x" + std::to_string(vars);
      for (const auto& b : n.branches) bs.push_back({b.label, x, go(b.child, ancestors, kept, vars + 1)});
      body = Process::recv(n.peer(), std::move(bs));
    }

    if (recursive) {
      kept.pop_back();
      body = Process::rec(std::move(body), "X" + std::to_string(kept.size()));
    }
    ancestors.pop_back();
    return body;
  }

  static Value least(Sort s) {
    return s == Sort::Bool ? Value::boolean(false) : Value::nat(0);
  }

  const TypeStore& store_;
};

}  // namespace

Process realize(const TypeStore& store, TreeHandle t) { return Realizer(store).build(t); }

SessionForm realize_env(const TypeStore& store, const TypeEnv& env) {
  SessionForm m;
  for (const auto& [p, t] : env) m.emplace(p, realize(store, t));
  return m;
}

}  // namespace mpst
