#pragma once

#include <cstddef>
#include <initializer_list>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "schemec/proposition.hpp"
#include "schemec/term.hpp"

namespace schemec {

// Proof skeleton without hypothesis names. There is exactly one variable per
// type: the canonical variable <A>.
class Scheme {
 public:
  enum class Kind { kVar, kLam, kApp, kTermLam, kTermApp };

  // <A>
  static Scheme var(Prop type) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kVar;
    n->type = std::move(type);
    n->size = 1;
    return Scheme(std::move(n));
  }
  // λ_A body
  static Scheme lam(Prop type, Scheme body) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kLam;
    n->type = std::move(type);
    n->size = saturating_add(1, body.size());
    n->children = {std::move(body)};
    return Scheme(std::move(n));
  }
  // (fn arg)
  static Scheme app(Scheme fn, Scheme arg) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kApp;
    n->size = saturating_add(1, saturating_add(fn.size(), arg.size()));
    n->children = {std::move(fn), std::move(arg)};
    return Scheme(std::move(n));
  }
  // Λx body
  static Scheme term_lam(std::string var, Sort sort, Scheme body) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kTermLam;
    n->var = Variable{std::move(var), std::move(sort)};
    n->size = saturating_add(1, body.size());
    n->children = {std::move(body)};
    return Scheme(std::move(n));
  }
  static Scheme term_lam(const Variable& v, Scheme body) {
    return term_lam(v.name, v.sort, std::move(body));
  }
  // (fn a)
  static Scheme term_app(Scheme fn, Term arg) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kTermApp;
    n->term = std::move(arg);
    n->size = saturating_add(1, fn.size());
    n->children = {std::move(fn)};
    return Scheme(std::move(n));
  }

  Kind kind() const { return node_->kind; }
  bool is_var() const { return node_->kind == Kind::kVar; }
  bool is_lam() const { return node_->kind == Kind::kLam; }
  bool is_app() const { return node_->kind == Kind::kApp; }
  bool is_term_lam() const { return node_->kind == Kind::kTermLam; }
  bool is_term_app() const { return node_->kind == Kind::kTermApp; }

  // Type of a canonical variable, or the binder type of λ_A.
  const Prop& type() const { return *node_->type; }
  // Body of an abstraction.
  const Scheme& body() const { return node_->children[0]; }
  // Function position of either kind of application.
  const Scheme& fn() const { return node_->children[0]; }
  const Scheme& arg() const { return node_->children[1]; }
  const Term& term_arg() const { return *node_->term; }
  const Variable& bound() const { return node_->var; }

  // Tree size; saturates instead of overflowing on highly shared schemes.
  std::size_t size() const { return node_->size; }

  bool same_node(const Scheme& other) const { return node_ == other.node_; }
  const void* identity() const { return node_.get(); }

 private:
  struct Node {
    Kind kind;
    std::optional<Prop> type;
    std::optional<Term> term;
    Variable var;
    std::vector<Scheme> children;
    std::size_t size = 1;
  };
  explicit Scheme(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static std::size_t saturating_add(std::size_t a, std::size_t b) {
    return a > std::numeric_limits<std::size_t>::max() - b ? std::numeric_limits<std::size_t>::max()
                                                            : a + b;
  }

  std::shared_ptr<const Node> node_;
};

// Left-nested application spine: apply(t, {u, v}) = ((t u) v).
inline Scheme apply(Scheme head, std::initializer_list<Scheme> args) {
  for (const Scheme& a : args) head = Scheme::app(std::move(head), a);
  return head;
}

namespace detail {

inline bool alpha_eq_scheme(const Scheme& a, const Scheme& b, BinderEnv& env) {
  if (a.same_node(b) && env.left == env.right) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Scheme::Kind::kVar:
      return alpha_eq_prop(a.type(), b.type(), env);
    case Scheme::Kind::kLam:
      return alpha_eq_prop(a.type(), b.type(), env) && alpha_eq_scheme(a.body(), b.body(), env);
    case Scheme::Kind::kApp:
      return alpha_eq_scheme(a.fn(), b.fn(), env) && alpha_eq_scheme(a.arg(), b.arg(), env);
    case Scheme::Kind::kTermLam: {
      if (a.bound().sort != b.bound().sort) return false;
      env.left.push_back(a.bound());
      env.right.push_back(b.bound());
      bool eq = alpha_eq_scheme(a.body(), b.body(), env);
      env.left.pop_back();
      env.right.pop_back();
      return eq;
    }
    case Scheme::Kind::kTermApp:
      return alpha_eq_term(a.term_arg(), b.term_arg(), env) &&
             alpha_eq_scheme(a.fn(), b.fn(), env);
  }
  return false;
}

inline void append_scheme_key(const Scheme& t, std::vector<Variable>& env, std::string& out) {
  switch (t.kind()) {
    case Scheme::Kind::kVar:
      out += '<';
      append_prop_key(t.type(), env, out);
      out += '>';
      return;
    case Scheme::Kind::kLam:
      out += "\\";
      append_prop_key(t.type(), env, out);
      out += '.';
      append_scheme_key(t.body(), env, out);
      return;
    case Scheme::Kind::kApp:
      out += '(';
      append_scheme_key(t.fn(), env, out);
      out += ' ';
      append_scheme_key(t.arg(), env, out);
      out += ')';
      return;
    case Scheme::Kind::kTermLam:
      out += "/";
      out += t.bound().sort.name;
      out += '.';
      env.push_back(t.bound());
      append_scheme_key(t.body(), env, out);
      env.pop_back();
      return;
    case Scheme::Kind::kTermApp:
      out += '(';
      append_scheme_key(t.fn(), env, out);
      out += " @";
      append_term_key(t.term_arg(), env, out);
      out += ')';
      return;
  }
}

}  // namespace detail

// Equality up to renaming of term binders (both Λ and ∀).
inline bool alpha_eq(const Scheme& a, const Scheme& b) {
  detail::BinderEnv env;
  return detail::alpha_eq_scheme(a, b, env);
}

inline std::string alpha_key(const Scheme& t) {
  std::vector<Variable> env;
  std::string out;
  detail::append_scheme_key(t, env, out);
  return out;
}

// Axiom and elimination forms are neutral; introductions are not.
inline bool is_neutral(const Scheme& t) { return !(t.is_lam() || t.is_term_lam()); }

inline bool is_redex(const Scheme& t) {
  return (t.is_app() && t.fn().is_lam()) || (t.is_term_app() && t.fn().is_term_lam());
}

namespace detail {

// Traversals below are memoized on node identity: schemes such as the
// numeral proofs share subschemes and are exponentially larger as trees.
inline const VariableSet& free_vars_memo(const Scheme& t, std::unordered_map<const void*, VariableSet>& memo) {
  auto it = memo.find(t.identity());
  if (it != memo.end()) return it->second;
  VariableSet out;
  switch (t.kind()) {
    case Scheme::Kind::kVar:
      collect_free_vars(t.type(), out);
      break;
    case Scheme::Kind::kLam:
      collect_free_vars(t.type(), out);
      for (const Variable& v : free_vars_memo(t.body(), memo)) out.insert(v);
      break;
    case Scheme::Kind::kApp:
      out = free_vars_memo(t.fn(), memo);
      for (const Variable& v : free_vars_memo(t.arg(), memo)) out.insert(v);
      break;
    case Scheme::Kind::kTermLam:
      out = free_vars_memo(t.body(), memo);
      out.erase(t.bound());
      break;
    case Scheme::Kind::kTermApp:
      out = free_vars_memo(t.fn(), memo);
      collect_free_vars(t.term_arg(), out);
      break;
  }
  return memo.emplace(t.identity(), std::move(out)).first->second;
}

inline void collect_names_memo(const Scheme& t, std::set<std::string>& out,
                               std::unordered_set<const void*>& seen) {
  if (!seen.insert(t.identity()).second) return;
  switch (t.kind()) {
    case Scheme::Kind::kVar:
      collect_names(t.type(), out);
      return;
    case Scheme::Kind::kLam:
      collect_names(t.type(), out);
      collect_names_memo(t.body(), out, seen);
      return;
    case Scheme::Kind::kApp:
      collect_names_memo(t.fn(), out, seen);
      collect_names_memo(t.arg(), out, seen);
      return;
    case Scheme::Kind::kTermLam:
      out.insert(t.bound().name);
      collect_names_memo(t.body(), out, seen);
      return;
    case Scheme::Kind::kTermApp:
      collect_names_memo(t.fn(), out, seen);
      collect_names(t.term_arg(), out);
      return;
  }
}

}  // namespace detail

inline void collect_free_vars(const Scheme& t, VariableSet& out) {
  std::unordered_map<const void*, VariableSet> memo;
  const VariableSet& fv = detail::free_vars_memo(t, memo);
  out.insert(fv.begin(), fv.end());
}

inline VariableSet free_vars(const Scheme& t) {
  VariableSet out;
  collect_free_vars(t, out);
  return out;
}

inline void collect_names(const Scheme& t, std::set<std::string>& out) {
  std::unordered_set<const void*> seen;
  detail::collect_names_memo(t, out, seen);
}

namespace detail {

class TermSubstituter {
 public:
  explicit TermSubstituter(TermSubstitution theta) : theta_(std::move(theta)) {}

  Scheme operator()(const Scheme& t) {
    if (theta_.empty()) return t;
    auto it = memo_.find(t.identity());
    if (it != memo_.end()) return it->second;
    Scheme out = go(t);
    memo_.emplace(t.identity(), out);
    return out;
  }

 private:
  Scheme go(const Scheme& t) {
    switch (t.kind()) {
      case Scheme::Kind::kVar:
        return Scheme::var(subst_prop(theta_, t.type()));
      case Scheme::Kind::kLam:
        return Scheme::lam(subst_prop(theta_, t.type()), (*this)(t.body()));
      case Scheme::Kind::kApp:
        return Scheme::app((*this)(t.fn()), (*this)(t.arg()));
      case Scheme::Kind::kTermLam: {
        TermSubstitution inner = theta_;
        inner.erase(t.bound());
        if (inner.empty()) return t;
        Variable x = t.bound();
        if (free_vars(inner).contains(x)) {
          std::set<std::string> avoid;
          collect_names(t, avoid);
          collect_names(inner, avoid);
          Variable renamed{fresh_name(x.name, avoid), x.sort};
          inner.emplace(x, Term::var(renamed));
          return Scheme::term_lam(renamed, TermSubstituter(std::move(inner))(t.body()));
        }
        if (inner.size() == theta_.size()) return Scheme::term_lam(x, (*this)(t.body()));
        return Scheme::term_lam(x, TermSubstituter(std::move(inner))(t.body()));
      }
      case Scheme::Kind::kTermApp:
        return Scheme::term_app((*this)(t.fn()), subst_in_term(theta_, t.term_arg()));
    }
    return t;
  }

  TermSubstitution theta_;
  std::unordered_map<const void*, Scheme> memo_;
};

inline Scheme subst_terms_in_scheme(const TermSubstitution& theta, const Scheme& t) {
  return TermSubstituter(theta)(t);
}

}  // namespace detail

// θt: capture-avoiding substitution of term variables throughout a scheme.
inline Scheme subst_terms(const TermSubstitution& theta, const Scheme& t) {
  check_substitution_sorts(theta);
  VariableSet fv = free_vars(t);
  TermSubstitution relevant;
  for (const auto& [v, image] : theta)
    if (fv.contains(v)) relevant.emplace(v, image);
  return detail::subst_terms_in_scheme(relevant, t);
}

inline Scheme subst_terms(const Variable& x, const Term& a, const Scheme& t) {
  return subst_terms(TermSubstitution{{x, a}}, t);
}

// True iff u occurs in t as a subscheme, up to alpha-equivalence. Term
// variables bound above the occurrence in t must not be free in u.
inline bool subscheme_contains(const Scheme& t, const Scheme& u) {
  if (t.size() < u.size()) return false;
  if (alpha_eq(t, u)) return true;
  switch (t.kind()) {
    case Scheme::Kind::kVar:
      return false;
    case Scheme::Kind::kLam:
      return subscheme_contains(t.body(), u);
    case Scheme::Kind::kApp:
      return subscheme_contains(t.fn(), u) || subscheme_contains(t.arg(), u);
    case Scheme::Kind::kTermLam:
      if (free_vars(u).contains(t.bound())) return false;
      return subscheme_contains(t.body(), u);
    case Scheme::Kind::kTermApp:
      return subscheme_contains(t.fn(), u);
  }
  return false;
}

}  // namespace schemec
