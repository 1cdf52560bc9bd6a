#pragma once

#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "schemec/congruence.hpp"
#include "schemec/connectives.hpp"
#include "schemec/error.hpp"
#include "schemec/print.hpp"
#include "schemec/proposition.hpp"
#include "schemec/scheme.hpp"
#include "schemec/term.hpp"

namespace schemec {

namespace detail {

struct Token {
  enum class Kind { kIdent, kPattern, kPunct, kEnd };
  Kind kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

// '#' starts a comment running to the end of the line.
inline std::vector<Token> tokenize(std::string_view src, std::size_t first_line = 1) {
  static const char* kPuncts[] = {"<=>", "=>", "~>", "->", "/\\", "\\/", "=", "(", ")", ",", ":", ".",
                                  ";",   "{",  "}",  "[",  "]",   "<",   ">", "\\", "~", "@"};
  std::vector<Token> out;
  std::size_t line = first_line, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    std::size_t l = line, cl = col;
    if (ident_start(c) || (c == '?' && i + 1 < src.size() && ident_start(src[i + 1]))) {
      std::size_t j = i + 1;
      while (j < src.size() && ident_char(src[j])) ++j;
      Token::Kind kind = c == '?' ? Token::Kind::kPattern : Token::Kind::kIdent;
      out.push_back(Token{kind, std::string(src.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const char* p : kPuncts) {
      std::string_view pv(p);
      if (src.substr(i, pv.size()) == pv) {
        out.push_back(Token{Token::Kind::kPunct, std::string(pv), l, cl});
        advance(pv.size());
        matched = true;
        break;
      }
    }
    if (!matched) throw SyntaxError(std::string("unexpected character '") + c + "'", l, cl);
  }
  out.push_back(Token{Token::Kind::kEnd, "", line, col});
  return out;
}

class Parser {
 public:
  Parser(const Signature& sig, std::vector<Token> tokens) : sig_(sig), toks_(std::move(tokens)) {}

  void allow_patterns() { patterns_enabled_ = true; }

  Term term() {
    const Token& t = peek();
    if (t.kind == Token::Kind::kPattern) return pattern_var();
    if (t.kind != Token::Kind::kIdent) fail("expected a term", t);
    Token name = next();
    bool bound = false;
    for (const Variable& v : env_) bound |= v.name == name.text;
    const FunctionSymbol* f = bound ? nullptr : sig_.function(name.text);
    // After '@' a parenthesis may open the next scheme: only symbols with
    // arguments, or an empty "()", take one.
    bool empty_args = is_punct("(") && toks_[pos_ + 1].kind == Token::Kind::kPunct && toks_[pos_ + 1].text == ")";
    if (is_punct("(") && !bound && (f == nullptr || !f->domain.empty() || empty_args)) {
      if (f == nullptr) fail("unknown function symbol '" + name.text + "'", name);
      std::vector<Term> args = term_list();
      return make_app(name, *f, std::move(args));
    }
    if (is_punct(":")) {
      next();
      return Term::var(name.text, sort());
    }
    for (auto it = env_.rbegin(); it != env_.rend(); ++it)
      if (it->name == name.text) return Term::var(*it);
    if (const FunctionSymbol* f = sig_.function(name.text)) return make_app(name, *f, {});
    fail("unbound variable '" + name.text + "' (free variables are written name:sort)", name);
  }

  Prop prop() {
    Prop left = implication();
    if (is_punct("<=>")) {
      Token op = next();
      require_connectives(op);
      Prop right = implication();
      return connectives::iff(left, right);
    }
    return left;
  }

  Scheme scheme() {
    const Token& t = peek();
    if (is_punct("<")) {
      next();
      Prop a = prop();
      expect(">");
      return Scheme::var(std::move(a));
    }
    if (is_punct("\\")) {
      next();
      expect("[");
      Prop a = prop();
      expect("]");
      return Scheme::lam(std::move(a), scheme());
    }
    if (is_punct("/\\")) {
      next();
      Variable x = binder();
      expect(".");
      env_.push_back(x);
      Scheme body = scheme();
      env_.pop_back();
      return Scheme::term_lam(x, std::move(body));
    }
    if (is_punct("(")) {
      next();
      Scheme head = scheme();
      while (!is_punct(")")) {
        if (peek().kind == Token::Kind::kEnd) fail("unbalanced parenthesis: expected ')'", peek());
        if (is_punct("@")) {
          next();
          head = Scheme::term_app(std::move(head), term());
        } else {
          head = Scheme::app(std::move(head), scheme());
        }
      }
      next();
      return head;
    }
    fail("expected a scheme", t);
  }

  Context context() {
    Context g;
    if (at_end()) return g;
    expect("{");
    while (!is_punct("}")) {
      if (peek().kind == Token::Kind::kEnd) fail("unbalanced brace: expected '}'", peek());
      g.insert(prop());
      if (!is_punct(";")) break;
      next();
    }
    expect("}");
    return g;
  }

  Sort sort() {
    Token t = next();
    if (t.kind != Token::Kind::kIdent) fail("expected a sort name", t);
    Sort s{t.text};
    if (!sig_.has_sort(s)) fail("undeclared sort '" + t.text + "'", t);
    return s;
  }

  Variable binder() {
    Token t = next();
    if (t.kind != Token::Kind::kIdent) fail("expected a variable name", t);
    expect(":");
    return Variable{t.text, sort()};
  }

  const Token& peek() const { return toks_[pos_]; }
  Token next() {
    Token t = toks_[pos_];
    if (t.kind != Token::Kind::kEnd) ++pos_;
    return t;
  }
  bool at_end() const { return peek().kind == Token::Kind::kEnd; }
  bool is_punct(std::string_view p) const {
    return peek().kind == Token::Kind::kPunct && peek().text == p;
  }
  bool is_keyword(std::string_view k) const {
    return peek().kind == Token::Kind::kIdent && peek().text == k;
  }
  void expect(std::string_view p) {
    if (!is_punct(p)) fail("expected '" + std::string(p) + "'", peek());
    next();
  }
  void expect_end() {
    if (!at_end()) fail("unexpected '" + peek().text + "' after end of input", peek());
  }
  [[noreturn]] static void fail(const std::string& what, const Token& at) {
    throw SyntaxError(what, at.line, at.column);
  }

 private:
  Prop implication() {
    Prop left = disjunction();
    if (is_punct("=>")) {
      next();
      return Prop::implies(std::move(left), implication());
    }
    return left;
  }

  Prop disjunction() {
    Prop left = conjunction();
    if (is_punct("\\/")) {
      Token op = next();
      require_connectives(op);
      return connectives::disj(left, disjunction());
    }
    return left;
  }

  Prop conjunction() {
    Prop left = unary();
    if (is_punct("/\\")) {
      Token op = next();
      require_connectives(op);
      return connectives::conj(left, conjunction());
    }
    return left;
  }

  Prop unary() {
    const Token& t = peek();
    if (is_punct("(")) {
      next();
      Prop p = prop();
      expect(")");
      return p;
    }
    if (is_punct("~")) {
      Token op = next();
      require_connectives(op);
      return connectives::neg(unary());
    }
    if (t.kind != Token::Kind::kIdent) fail("expected a proposition", t);
    if (t.text == "forall" || t.text == "exists") {
      Token q = next();
      if (q.text == "exists") require_connectives(q);
      Variable x = binder();
      expect(".");
      env_.push_back(x);
      Prop body = prop();
      env_.pop_back();
      return q.text == "forall" ? Prop::forall(x, std::move(body)) : connectives::exists(x, body);
    }
    if ((t.text == "true" || t.text == "false") && sig_.predicate(t.text) == nullptr &&
        has_class_connectives(sig_)) {
      Token k = next();
      return k.text == "true" ? connectives::top() : connectives::bot();
    }
    if (starts_equation()) {
      Token at = peek();
      Term lhs = term();
      expect("=");
      Term rhs = term();
      const auto* e = sig_.predicate("eq");
      if (e == nullptr || e->size() != 2) fail("'=' needs a binary predicate eq", at);
      if (lhs.sort() != (*e)[0] || rhs.sort() != (*e)[1])
        fail("sides of '=' have sorts " + lhs.sort().name + " and " + rhs.sort().name, at);
      return Prop::atom("eq", {std::move(lhs), std::move(rhs)});
    }
    return atom();
  }

  // An identifier that cannot start an atom starts an equation a = b.
  bool starts_equation() const {
    const Token& t = peek();
    if (t.kind == Token::Kind::kPattern) return true;
    if (t.kind != Token::Kind::kIdent) return false;
    const Token& after = toks_[pos_ + 1];
    if (after.kind == Token::Kind::kPunct && after.text == ":") return true;
    for (const Variable& v : env_)
      if (v.name == t.text) return true;
    return sig_.function(t.text) != nullptr;
  }

  Prop atom() {
    Token name = next();
    std::vector<Term> args;
    if (is_punct("(")) args = term_list();
    std::vector<Sort> arity;
    try {
      arity = sig_.predicate_arity(name.text, args.size());
    } catch (const SortError& e) {
      fail(e.what(), name);
    }
    if (arity.size() != args.size())
      fail("arity mismatch for '" + name.text + "': expected " + std::to_string(arity.size()) +
               " arguments, got " + std::to_string(args.size()),
           name);
    for (std::size_t i = 0; i < args.size(); ++i)
      if (args[i].sort() != arity[i])
        fail("argument " + std::to_string(i + 1) + " of '" + name.text + "' has sort " +
                 args[i].sort().name + ", expected " + arity[i].name,
             name);
    return Prop::atom(name.text, std::move(args));
  }

  std::vector<Term> term_list() {
    expect("(");
    std::vector<Term> args;
    if (is_punct(")")) {
      next();
      return args;
    }
    while (true) {
      args.push_back(term());
      if (is_punct(",")) {
        next();
        continue;
      }
      if (!is_punct(")")) fail("unbalanced parenthesis: expected ',' or ')'", peek());
      next();
      return args;
    }
  }

  Term make_app(const Token& name, const FunctionSymbol& f, std::vector<Term> args) {
    if (f.domain.size() != args.size())
      fail("arity mismatch for '" + name.text + "': expected " + std::to_string(f.domain.size()) +
               " arguments, got " + std::to_string(args.size()),
           name);
    for (std::size_t i = 0; i < args.size(); ++i)
      if (args[i].sort() != f.domain[i])
        fail("argument " + std::to_string(i + 1) + " of '" + name.text + "' has sort " +
                 args[i].sort().name + ", expected " + f.domain[i].name,
             name);
    return Term::app(name.text, std::move(args), f.codomain);
  }

  Term pattern_var() {
    Token t = next();
    if (!patterns_enabled_) fail("pattern variables are only allowed in rules", t);
    if (is_punct(":")) {
      next();
      Variable v{t.text, sort()};
      auto [it, inserted] = patterns_.emplace(t.text, v);
      if (!inserted && it->second != v) fail("pattern variable '" + t.text + "' used at two sorts", t);
      return Term::var(v);
    }
    auto it = patterns_.find(t.text);
    if (it == patterns_.end()) fail("pattern variable '" + t.text + "' needs a sort", t);
    return Term::var(it->second);
  }

  void require_connectives(const Token& at) const {
    if (!has_class_connectives(sig_))
      fail("derived connective '" + at.text + "' needs sort kappa0 and predicate eps0", at);
  }

  const Signature& sig_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<Variable> env_;
  std::map<std::string, Variable> patterns_;
  bool patterns_enabled_ = false;
};

template <typename F>
auto parse_whole(const Signature& sig, std::string_view text, F&& f) {
  Parser p(sig, tokenize(text));
  auto out = f(p);
  p.expect_end();
  return out;
}

inline bool mentions_comprehension(const Prop& p) {
  std::set<std::string> fs;
  collect_function_symbols(p, fs);
  for (const std::string& f : fs)
    if (f.starts_with("_f")) return true;
  return false;
}

}  // namespace detail

inline Term parse_term(const Signature& sig, std::string_view text) {
  return detail::parse_whole(sig, text, [](detail::Parser& p) { return p.term(); });
}
inline Prop parse_prop(const Signature& sig, std::string_view text) {
  return detail::parse_whole(sig, text, [](detail::Parser& p) { return p.prop(); });
}
inline Context parse_context(const Signature& sig, std::string_view text) {
  return detail::parse_whole(sig, text, [](detail::Parser& p) { return p.context(); });
}
inline Scheme parse_scheme(const Signature& sig, std::string_view text) {
  return detail::parse_whole(sig, text, [](detail::Parser& p) { return p.scheme(); });
}

// Theory files hold one declaration per line:
//   sort s | func f : s1 ... sn -> s | func c : s | pred P : (s1, ..., sn)
//   rule P(...) ~> A | trule t ~> u | atoms implicit
inline Theory parse_theory(std::string_view text) {
  Theory th;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    detail::Parser p(th.signature(), detail::tokenize(line, line_no));
    if (p.at_end()) continue;
    detail::Token kw = p.next();
    try {
      if (kw.kind != detail::Token::Kind::kIdent) detail::Parser::fail("expected a declaration", kw);
      if (kw.text == "sort") {
        detail::Token name = p.next();
        if (name.kind != detail::Token::Kind::kIdent) detail::Parser::fail("expected a sort name", name);
        th.signature().add_sort(name.text);
      } else if (kw.text == "func") {
        detail::Token name = p.next();
        if (name.kind != detail::Token::Kind::kIdent)
          detail::Parser::fail("expected a function name", name);
        p.expect(":");
        std::vector<Sort> sorts{p.sort()};
        while (!p.at_end() && !p.is_punct("->")) sorts.push_back(p.sort());
        if (p.is_punct("->")) {
          p.next();
          Sort cod = p.sort();
          th.signature().add_function(name.text, std::move(sorts), cod);
        } else {
          if (sorts.size() != 1) detail::Parser::fail("expected '->'", p.peek());
          th.signature().add_function(name.text, {}, sorts[0]);
        }
      } else if (kw.text == "pred") {
        detail::Token name = p.next();
        if (name.kind != detail::Token::Kind::kIdent)
          detail::Parser::fail("expected a predicate name", name);
        std::vector<Sort> sorts;
        if (p.is_punct(":")) {
          p.next();
          p.expect("(");
          if (!p.is_punct(")")) {
            sorts.push_back(p.sort());
            while (p.is_punct(",")) {
              p.next();
              sorts.push_back(p.sort());
            }
          }
          p.expect(")");
        }
        th.signature().add_predicate(name.text, std::move(sorts));
      } else if (kw.text == "rule") {
        p.allow_patterns();
        detail::Token at = p.peek();
        Prop lhs = p.prop();
        p.expect("~>");
        Prop rhs = p.prop();
        if (!lhs.is_atom())
          detail::Parser::fail("rule left-hand side must be atomic (non-confusing congruence)", at);
        bool foldable = !detail::mentions_comprehension(lhs);
        p.expect_end();
        th.add_prop_rule(std::move(lhs), std::move(rhs), foldable);
      } else if (kw.text == "trule") {
        p.allow_patterns();
        Term lhs = p.term();
        p.expect("~>");
        Term rhs = p.term();
        p.expect_end();
        th.add_term_rule(std::move(lhs), std::move(rhs));
      } else if (kw.text == "atoms") {
        detail::Token what = p.next();
        if (what.text != "implicit") detail::Parser::fail("expected 'implicit'", what);
        th.signature().set_implicit_atoms(true);
      } else {
        detail::Parser::fail("unknown declaration '" + kw.text + "'", kw);
      }
      p.expect_end();
    } catch (const TheoryError& e) {
      throw TheoryError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const SortError& e) {
      throw SyntaxError(e.what(), kw.line, kw.column);
    }
  }
  return th;
}

inline std::string print_theory(const Theory& th) {
  std::ostringstream out;
  const Signature& sig = th.signature();
  if (sig.implicit_atoms()) out << "atoms implicit\n";
  for (const Sort& s : sig.sorts()) out << "sort " << s.name << "\n";
  for (const auto& [name, f] : sig.functions()) {
    out << "func " << name << " :";
    for (const Sort& s : f.domain) out << ' ' << s.name;
    if (!f.domain.empty()) out << " ->";
    out << ' ' << f.codomain.name << "\n";
  }
  for (const auto& [name, dom] : sig.predicates()) {
    out << "pred " << name << " : (";
    for (std::size_t i = 0; i < dom.size(); ++i) out << (i ? ", " : "") << dom[i].name;
    out << ")\n";
  }
  for (const PropRule& r : th.prop_rules()) out << "rule " << print(r.lhs) << " ~> " << print(r.rhs) << "\n";
  for (const TermRule& r : th.term_rules()) out << "trule " << print(r.lhs) << " ~> " << print(r.rhs) << "\n";
  return out.str();
}

}  // namespace schemec
