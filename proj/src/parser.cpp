#include <algorithm>
#include <cctype>
#include <optional>
#include <set>
#include <sstream>

#include "mpst/syntax.hpp"

namespace mpst {
namespace {

enum class Tok {
  Ident, Number, Signed, Arrow, Amp, Oplus, LBrace, RBrace, LParen, RParen,
  Comma, Dot, Colon, Semi, Tri, Par, Bang, Query, Eof,
};

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      SourcePos pos{line_, col_};
      if (i_ >= src_.size()) {
        out.push_back({Tok::Eof, "", pos});
        return out;
      }
      out.push_back(next(pos));
    }
  }

 private:
  void advance(std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i_ < src_.size(); ++k, ++i_) {
      if (src_[i_] == '\n') {
        ++line_;
        col_ = 1;
      } else if ((static_cast<unsigned char>(src_[i_]) & 0xC0) != 0x80) {
        ++col_;
      }
    }
  }

  bool starts(std::string_view s) const { return src_.substr(i_, s.size()) == s; }

  void skip_space() {
    while (i_ < src_.size()) {
      if (std::isspace(static_cast<unsigned char>(src_[i_]))) {
        advance();
      } else if (starts("//")) {
        while (i_ < src_.size() && src_[i_] != '\n') advance();
      } else {
        return;
      }
    }
  }

  [[noreturn]] void fail(SourcePos pos, const std::string& msg) {
    throw Error(ErrorCode::SyntaxError,
                std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + msg);
  }

  Token symbol(Tok k, std::string_view text, SourcePos pos) {
    advance(text.size());
    return {k, std::string(text), pos};
  }

  Token next(SourcePos pos) {
    char c = src_[i_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i_;
      while (j < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[j])) ||
                                 src_[j] == '_' || src_[j] == '\''))
        ++j;
      std::string text(src_.substr(i_, j - i_));
      advance(j - i_);
      return {Tok::Ident, text, pos};
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i_;
      while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
      std::string text(src_.substr(i_, j - i_));
      advance(j - i_);
      return {Tok::Number, text, pos};
    }
    if ((c == '+' || c == '-') && i_ + 1 < src_.size() &&
        std::isdigit(static_cast<unsigned char>(src_[i_ + 1]))) {
      std::size_t j = i_ + 1;
      while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]))) ++j;
      std::string text(src_.substr(i_, j - i_));
      advance(j - i_);
      return {Tok::Signed, text, pos};
    }
    if (starts("->")) return symbol(Tok::Arrow, "->", pos);
    if (starts("(+)")) return symbol(Tok::Oplus, "(+)", pos);
    if (starts("\xE2\x8A\x95")) return symbol(Tok::Oplus, "\xE2\x8A\x95", pos);
    if (starts("<|")) return symbol(Tok::Tri, "<|", pos);
    if (starts("\xE2\x97\x81")) return symbol(Tok::Tri, "\xE2\x97\x81", pos);
    if (starts("||")) return symbol(Tok::Par, "||", pos);
    switch (c) {
      case '&': return symbol(Tok::Amp, "&", pos);
      case '{': return symbol(Tok::LBrace, "{", pos);
      case '}': return symbol(Tok::RBrace, "}", pos);
      case '(': return symbol(Tok::LParen, "(", pos);
      case ')': return symbol(Tok::RParen, ")", pos);
      case ',': return symbol(Tok::Comma, ",", pos);
      case '.': return symbol(Tok::Dot, ".", pos);
      case ':': return symbol(Tok::Colon, ":", pos);
      case ';': return symbol(Tok::Semi, ";", pos);
      case '!': return symbol(Tok::Bang, "!", pos);
      case '?': return symbol(Tok::Query, "?", pos);
      default: break;
    }
    fail(pos, std::string("unexpected character '") + c + "'");
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

bool is_keyword(const std::string& s) {
  static const std::set<std::string> kw = {"end",  "rec",   "mu",   "if",  "then",
                                           "else", "nat",   "int",  "bool", "true",
                                           "false", "succ", "neg",  "not"};
  return kw.count(s) > 0;
}

class Parser {
 public:
  Parser(std::string_view text, RoleNames& roles) : toks_(Lexer(text).run()), roles_(roles) {}

  SynType global_top() {
    auto g = global(0);
    expect_eof();
    return g;
  }

  SynType local_top() {
    auto t = local(0);
    expect_eof();
    return t;
  }

  Expr expr_top() {
    auto e = expr();
    expect_eof();
    return e;
  }

  Process process_top() {
    auto p = process(0);
    expect_eof();
    return p;
  }

  SessionForm session_top() {
    SessionForm m;
    if (at(Tok::Eof)) return m;
    while (true) {
      auto name = ident("participant");
      auto who = roles_.intern(name.text);
      expect(Tok::Tri, "'<|'");
      auto p = process(0);
      if (!m.emplace(who, std::move(p)).second)
        fail(name.pos, "participant '" + name.text + "' appears twice in session");
      if (!accept(Tok::Par)) break;
    }
    expect_eof();
    return m;
  }

  EnvSyntax env_top() {
    EnvSyntax env;
    while (!at(Tok::Eof)) {
      auto name = ident("participant");
      expect(Tok::Colon, "':'");
      auto t = local(0);
      if (!env.emplace(roles_.intern(name.text), std::move(t)).second)
        fail(name.pos, "participant '" + name.text + "' appears twice in environment");
      while (accept(Tok::Comma) || accept(Tok::Semi)) {
      }
    }
    return env;
  }

 private:
  // ---- token helpers
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_word(std::string_view w) const { return at(Tok::Ident) && peek().text == w; }
  bool accept(Tok k) {
    if (!at(k)) return false;
    ++pos_;
    return true;
  }
  bool accept_word(std::string_view w) {
    if (!at_word(w)) return false;
    ++pos_;
    return true;
  }
  [[noreturn]] void fail(SourcePos pos, const std::string& msg) const {
    throw Error(ErrorCode::SyntaxError,
                std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + msg);
  }
  [[noreturn]] void fail_here(const std::string& msg) const {
    const auto& t = peek();
    fail(t.pos, msg + (t.kind == Tok::Eof ? " (found end of input)" : " (found '" + t.text + "')"));
  }
  const Token& expect(Tok k, const std::string& what) {
    if (!at(k)) fail_here("expected " + what);
    return toks_[pos_++];
  }
  void expect_word(std::string_view w) {
    if (!accept_word(w)) fail_here("expected '" + std::string(w) + "'");
  }
  void expect_eof() {
    if (!at(Tok::Eof)) fail_here("unexpected trailing input");
  }
  Token ident(const std::string& what) {
    if (!at(Tok::Ident) || is_keyword(peek().text)) fail_here("expected " + what);
    return toks_[pos_++];
  }

  Label label() {
    const auto& t = peek();
    if (t.kind != Tok::Ident || t.text.size() < 2 || t.text[0] != 'l')
      fail_here("expected label l<k>");
    for (std::size_t i = 1; i < t.text.size(); ++i)
      if (!std::isdigit(static_cast<unsigned char>(t.text[i]))) fail_here("expected label l<k>");
    ++pos_;
    return Label{static_cast<std::uint32_t>(std::stoul(t.text.substr(1)))};
  }

  Sort sort() {
    if (accept_word("nat")) return Sort::Nat;
    if (accept_word("int")) return Sort::Int;
    if (accept_word("bool")) return Sort::Bool;
    fail_here("expected sort (nat, int or bool)");
  }

  // ---- recursion binders. A variable is guarded iff its binder was
  // introduced before the most recent communication on the current path.
  std::optional<std::size_t> lookup_binder(const std::string& name) const {
    for (std::size_t i = binders_.size(); i-- > 0;)
      if (binders_[i] == name) return i;
    return std::nullopt;
  }

  template <class Make>
  auto bound_var(const Token& name, std::size_t guard_level, Make make) {
    auto pos = lookup_binder(name.text);
    if (!pos) fail(name.pos, "unbound recursion variable '" + name.text + "'");
    if (*pos >= guard_level)
      throw Error(ErrorCode::UnguardedRecursion,
                  std::to_string(name.pos.line) + ":" + std::to_string(name.pos.column) +
                      ": recursion variable '" + name.text + "' is not guarded");
    return make(binders_.size() - 1 - *pos);
  }

  // ---- types
  template <class Cont>
  std::vector<SynType::Branch> type_branches(Cont cont) {
    auto open = expect(Tok::LBrace, "'{'");
    std::vector<SynType::Branch> bs;
    std::set<Label> seen;
    if (at(Tok::RBrace)) {
      throw Error(ErrorCode::EmptyBranchSet, std::to_string(open.pos.line) + ":" +
                                                 std::to_string(open.pos.column) +
                                                 ": empty branch set");
    }
    do {
      auto lpos = peek().pos;
      auto l = label();
      if (!seen.insert(l).second) fail(lpos, "duplicate label l" + std::to_string(l.index));
      expect(Tok::LParen, "'('");
      auto s = sort();
      expect(Tok::RParen, "')'");
      expect(Tok::Dot, "'.'");
      bs.push_back({l, s, cont()});
    } while (accept(Tok::Comma));
    expect(Tok::RBrace, "'}' or ','");
    return bs;
  }

  SynType global(std::size_t guard) {
    if (accept_word("end")) return SynType::end();
    if (accept(Tok::LParen)) {
      auto g = global(guard);
      expect(Tok::RParen, "')'");
      return g;
    }
    if (accept_word("rec")) {
      auto name = ident("recursion variable");
      expect(Tok::Dot, "'.'");
      binders_.push_back(name.text);
      auto body = global(guard);
      binders_.pop_back();
      return SynType::rec(std::move(body), name.text);
    }
    auto name = ident("global type");
    if (accept(Tok::Arrow)) {
      auto to = ident("receiver");
      auto from_p = roles_.intern(name.text);
      auto to_p = roles_.intern(to.text);
      if (from_p == to_p)
        throw Error(ErrorCode::SelfCommunication,
                    std::to_string(name.pos.line) + ":" + std::to_string(name.pos.column) +
                        ": participant '" + name.text + "' communicates with itself");
      std::size_t level = binders_.size();
      auto bs = type_branches([&] { return global(level); });
      return SynType::comm(from_p, to_p, std::move(bs));
    }
    return bound_var(name, guard, [](std::size_t i) { return SynType::var(i); });
  }

  SynType local(std::size_t guard) {
    if (accept_word("end")) return SynType::end();
    if (accept(Tok::LParen)) {
      auto t = local(guard);
      expect(Tok::RParen, "')'");
      return t;
    }
    if (accept_word("rec")) {
      auto name = ident("recursion variable");
      expect(Tok::Dot, "'.'");
      binders_.push_back(name.text);
      auto body = local(guard);
      binders_.pop_back();
      return SynType::rec(std::move(body), name.text);
    }
    auto name = ident("local type");
    bool is_recv = at(Tok::Amp);
    if (accept(Tok::Amp) || accept(Tok::Oplus)) {
      auto peer = roles_.intern(name.text);
      std::size_t level = binders_.size();
      auto bs = type_branches([&] { return local(level); });
      return is_recv ? SynType::recv(peer, std::move(bs)) : SynType::send(peer, std::move(bs));
    }
    return bound_var(name, guard, [](std::size_t i) { return SynType::var(i); });
  }

  // ---- expressions
  Expr expr() {
    auto e = unary();
    while (accept(Tok::Oplus)) e = Expr::choice(std::move(e), unary());
    return e;
  }

  Expr unary() {
    if (accept_word("succ")) return Expr::succ(unary());
    if (accept_word("neg")) return Expr::neg(unary());
    if (accept_word("not")) return Expr::logical_not(unary());
    return atom();
  }

  Expr atom() {
    if (at(Tok::Number)) {
      auto t = toks_[pos_++];
      return Expr::lit(Value::nat(std::stoll(t.text)));
    }
    if (at(Tok::Signed)) {
      auto t = toks_[pos_++];
      return Expr::lit(Value::integer(std::stoll(t.text)));
    }
    if (accept_word("true")) return Expr::lit(Value::boolean(true));
    if (accept_word("false")) return Expr::lit(Value::boolean(false));
    if (accept(Tok::LParen)) {
      auto e = expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    auto name = ident("expression");
    if (expr_scope_ &&
        std::find(expr_vars_.begin(), expr_vars_.end(), name.text) == expr_vars_.end())
      throw Error(ErrorCode::UnboundVariable,
                  std::to_string(name.pos.line) + ":" + std::to_string(name.pos.column) +
                      ": unbound variable '" + name.text + "'");
    return Expr::var(name.text);
  }

  // ---- processes
  Process process(std::size_t guard) {
    expr_scope_ = true;
    auto pos = peek().pos;
    if (at(Tok::Number) && peek().text == "0") {
      ++pos_;
      return Process::inact(pos);
    }
    if (accept(Tok::LParen)) {
      auto p = process(guard);
      expect(Tok::RParen, "')'");
      return p;
    }
    if (accept_word("mu")) {
      auto name = ident("recursion variable");
      expect(Tok::Dot, "'.'");
      binders_.push_back(name.text);
      auto body = process(guard);
      binders_.pop_back();
      return Process::rec(std::move(body), name.text, pos);
    }
    if (accept_word("if")) {
      auto g = expr();
      expect_word("then");
      auto t = process(guard);
      expect_word("else");
      auto e = process(guard);
      return Process::ite(std::move(g), std::move(t), std::move(e), pos);
    }
    auto name = ident("process");
    if (accept(Tok::Bang)) {
      auto peer = roles_.intern(name.text);
      auto l = label();
      expect(Tok::LParen, "'('");
      auto e = expr();
      expect(Tok::RParen, "')'");
      expect(Tok::Dot, "'.'");
      auto cont = process(binders_.size());
      return Process::send(peer, l, std::move(e), std::move(cont), pos);
    }
    if (accept(Tok::Query)) {
      auto peer = roles_.intern(name.text);
      auto open = expect(Tok::LBrace, "'{'");
      if (at(Tok::RBrace))
        throw Error(ErrorCode::EmptyBranchSet, std::to_string(open.pos.line) + ":" +
                                                   std::to_string(open.pos.column) +
                                                   ": empty branch set");
      std::vector<Process::RecvBranch> bs;
      std::set<Label> seen;
      std::size_t level = binders_.size();
      do {
        auto lpos = peek().pos;
        auto l = label();
        if (!seen.insert(l).second) fail(lpos, "duplicate label l" + std::to_string(l.index));
        expect(Tok::LParen, "'('");
        auto x = ident("variable");
        expect(Tok::RParen, "')'");
        expect(Tok::Dot, "'.'");
        expr_vars_.push_back(x.text);
        auto body = process(level);
        expr_vars_.pop_back();
        bs.push_back({l, x.text, std::move(body)});
      } while (accept(Tok::Comma));
      expect(Tok::RBrace, "'}' or ','");
      return Process::recv(peer, std::move(bs), pos);
    }
    return bound_var(name, guard, [pos](std::size_t i) { return Process::var(i, pos); });
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  RoleNames& roles_;
  std::vector<std::string> binders_;
  std::vector<std::string> expr_vars_;
  bool expr_scope_ = false;
};

}  // namespace

SynGlobal parse_global(std::string_view text, RoleNames& roles) {
  return Parser(text, roles).global_top();
}
SynLocal parse_local(std::string_view text, RoleNames& roles) {
  return Parser(text, roles).local_top();
}
Expr parse_expr(std::string_view text, RoleNames& roles) {
  return Parser(text, roles).expr_top();
}
Process parse_process(std::string_view text, RoleNames& roles) {
  return Parser(text, roles).process_top();
}
SessionForm parse_session(std::string_view text, RoleNames& roles) {
  return Parser(text, roles).session_top();
}
EnvSyntax parse_env(std::string_view text, RoleNames& roles) {
  return Parser(text, roles).env_top();
}

}  // namespace mpst
