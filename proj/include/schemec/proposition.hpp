#pragma once

#include <algorithm>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "schemec/term.hpp"

namespace schemec {

// Immutable proposition: atomic predicate application, implication, or
// universal quantification over a sorted variable. Bound names are kept as
// written; comparison is always up to renaming of bound variables.
class Prop {
 public:
  enum class Kind { kAtom, kImplies, kForall };

  static Prop atom(std::string predicate, std::vector<Term> args = {}) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kAtom;
    n->name = std::move(predicate);
    n->args = std::move(args);
    return Prop(std::move(n));
  }
  static Prop implies(Prop premise, Prop conclusion) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kImplies;
    n->children = {std::move(premise), std::move(conclusion)};
    return Prop(std::move(n));
  }
  static Prop forall(std::string var, Sort sort, Prop body) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::kForall;
    n->name = std::move(var);
    n->sort = std::move(sort);
    n->children = {std::move(body)};
    return Prop(std::move(n));
  }
  static Prop forall(const Variable& v, Prop body) { return forall(v.name, v.sort, std::move(body)); }

  Kind kind() const { return node_->kind; }
  bool is_atom() const { return node_->kind == Kind::kAtom; }
  bool is_implies() const { return node_->kind == Kind::kImplies; }
  bool is_forall() const { return node_->kind == Kind::kForall; }

  // Predicate symbol of an atom.
  const std::string& predicate() const { return node_->name; }
  std::span<const Term> args() const { return node_->args; }
  const Prop& premise() const { return node_->children[0]; }
  const Prop& conclusion() const { return node_->children[1]; }
  // Bound variable and body of a quantification.
  Variable bound() const { return Variable{node_->name, node_->sort}; }
  const std::string& bound_name() const { return node_->name; }
  const Sort& bound_sort() const { return node_->sort; }
  const Prop& body() const { return node_->children[0]; }

  bool same_node(const Prop& other) const { return node_ == other.node_; }
  const void* identity() const { return node_.get(); }

 private:
  struct Node {
    Kind kind;
    std::string name;
    Sort sort;
    std::vector<Term> args;
    std::vector<Prop> children;
  };
  explicit Prop(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

// Chains of implications, right-associated: imp({A, B}, C) = A => B => C.
inline Prop imp(std::initializer_list<Prop> premises, Prop conclusion) {
  std::vector<Prop> ps(premises);
  Prop out = std::move(conclusion);
  for (auto it = ps.rbegin(); it != ps.rend(); ++it) out = Prop::implies(*it, out);
  return out;
}

namespace detail {

// Binder stacks for comparison up to renaming. A variable resolves to the
// innermost binder with the same name and sort.
struct BinderEnv {
  std::vector<Variable> left;
  std::vector<Variable> right;
};

inline std::optional<std::size_t> depth_of(const std::vector<Variable>& env, const Variable& v) {
  for (std::size_t i = env.size(); i-- > 0;)
    if (env[i] == v) return env.size() - 1 - i;
  return std::nullopt;
}

inline bool alpha_eq_term(const Term& a, const Term& b, const BinderEnv& env) {
  if (a.is_var() != b.is_var()) return false;
  if (a.is_var()) {
    if (a.sort() != b.sort()) return false;
    auto da = depth_of(env.left, a.variable());
    auto db = depth_of(env.right, b.variable());
    if (da.has_value() != db.has_value()) return false;
    if (da) return *da == *db;
    return a.name() == b.name();
  }
  if (a.name() != b.name() || a.args().size() != b.args().size()) return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (!alpha_eq_term(a.args()[i], b.args()[i], env)) return false;
  return true;
}

inline bool alpha_eq_prop(const Prop& a, const Prop& b, BinderEnv& env) {
  if (a.same_node(b) && env.left == env.right) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Prop::Kind::kAtom:
      if (a.predicate() != b.predicate() || a.args().size() != b.args().size()) return false;
      for (std::size_t i = 0; i < a.args().size(); ++i)
        if (!alpha_eq_term(a.args()[i], b.args()[i], env)) return false;
      return true;
    case Prop::Kind::kImplies:
      return alpha_eq_prop(a.premise(), b.premise(), env) &&
             alpha_eq_prop(a.conclusion(), b.conclusion(), env);
    case Prop::Kind::kForall: {
      if (a.bound_sort() != b.bound_sort()) return false;
      env.left.push_back(a.bound());
      env.right.push_back(b.bound());
      bool eq = alpha_eq_prop(a.body(), b.body(), env);
      env.left.pop_back();
      env.right.pop_back();
      return eq;
    }
  }
  return false;
}

inline void append_term_key(const Term& t, const std::vector<Variable>& env, std::string& out) {
  if (t.is_var()) {
    if (auto d = depth_of(env, t.variable())) {
      out += '#';
      out += std::to_string(*d);
    } else {
      out += t.name();
      out += ':';
      out += t.sort().name;
    }
    return;
  }
  out += t.name();
  out += '(';
  for (const Term& a : t.args()) {
    append_term_key(a, env, out);
    out += ',';
  }
  out += ')';
}

inline void append_prop_key(const Prop& p, std::vector<Variable>& env, std::string& out) {
  switch (p.kind()) {
    case Prop::Kind::kAtom:
      out += p.predicate();
      out += '(';
      for (const Term& a : p.args()) {
        append_term_key(a, env, out);
        out += ',';
      }
      out += ')';
      return;
    case Prop::Kind::kImplies:
      out += '[';
      append_prop_key(p.premise(), env, out);
      out += '>';
      append_prop_key(p.conclusion(), env, out);
      out += ']';
      return;
    case Prop::Kind::kForall:
      out += "{";
      out += p.bound_sort().name;
      out += '.';
      env.push_back(p.bound());
      append_prop_key(p.body(), env, out);
      env.pop_back();
      out += '}';
      return;
  }
}

}  // namespace detail

inline bool alpha_eq(const Prop& a, const Prop& b) {
  detail::BinderEnv env;
  return detail::alpha_eq_prop(a, b, env);
}

// Canonical string, equal for two propositions iff they are alpha-equivalent.
inline std::string alpha_key(const Prop& p) {
  std::vector<Variable> env;
  std::string out;
  detail::append_prop_key(p, env, out);
  return out;
}

inline void collect_free_vars(const Prop& p, VariableSet& out) {
  switch (p.kind()) {
    case Prop::Kind::kAtom:
      for (const Term& a : p.args()) collect_free_vars(a, out);
      return;
    case Prop::Kind::kImplies:
      collect_free_vars(p.premise(), out);
      collect_free_vars(p.conclusion(), out);
      return;
    case Prop::Kind::kForall: {
      VariableSet inner;
      collect_free_vars(p.body(), inner);
      inner.erase(p.bound());
      out.insert(inner.begin(), inner.end());
      return;
    }
  }
}

inline VariableSet free_vars(const Prop& p) {
  VariableSet out;
  collect_free_vars(p, out);
  return out;
}

inline bool occurs_free(const Variable& v, const Prop& p) {
  switch (p.kind()) {
    case Prop::Kind::kAtom:
      for (const Term& a : p.args())
        if (occurs(v, a)) return true;
      return false;
    case Prop::Kind::kImplies:
      return occurs_free(v, p.premise()) || occurs_free(v, p.conclusion());
    case Prop::Kind::kForall:
      return p.bound() != v && occurs_free(v, p.body());
  }
  return false;
}

// Every variable name appearing in p, free or bound.
inline void collect_names(const Prop& p, std::set<std::string>& out) {
  switch (p.kind()) {
    case Prop::Kind::kAtom:
      for (const Term& a : p.args()) collect_names(a, out);
      return;
    case Prop::Kind::kImplies:
      collect_names(p.premise(), out);
      collect_names(p.conclusion(), out);
      return;
    case Prop::Kind::kForall:
      out.insert(p.bound_name());
      collect_names(p.body(), out);
      return;
  }
}

inline void collect_names(const TermSubstitution& theta, std::set<std::string>& out) {
  for (const auto& [v, image] : theta) {
    out.insert(v.name);
    collect_names(image, out);
  }
}

inline void collect_function_symbols(const Term& t, std::set<std::string>& out) {
  if (t.is_var()) return;
  out.insert(t.name());
  for (const Term& a : t.args()) collect_function_symbols(a, out);
}

inline void collect_function_symbols(const Prop& p, std::set<std::string>& out) {
  switch (p.kind()) {
    case Prop::Kind::kAtom:
      for (const Term& a : p.args()) collect_function_symbols(a, out);
      return;
    case Prop::Kind::kImplies:
      collect_function_symbols(p.premise(), out);
      collect_function_symbols(p.conclusion(), out);
      return;
    case Prop::Kind::kForall:
      collect_function_symbols(p.body(), out);
      return;
  }
}

inline std::size_t prop_size(const Prop& p) {
  switch (p.kind()) {
    case Prop::Kind::kAtom: {
      std::size_t n = 1;
      for (const Term& a : p.args()) n += term_size(a);
      return n;
    }
    case Prop::Kind::kImplies:
      return 1 + prop_size(p.premise()) + prop_size(p.conclusion());
    case Prop::Kind::kForall:
      return 1 + prop_size(p.body());
  }
  return 1;
}

namespace detail {

inline Prop subst_prop(const TermSubstitution& theta, const Prop& p) {
  if (theta.empty()) return p;
  switch (p.kind()) {
    case Prop::Kind::kAtom: {
      std::vector<Term> args;
      bool changed = false;
      for (const Term& a : p.args()) {
        args.push_back(subst_in_term(theta, a));
        changed = changed || !args.back().same_node(a);
      }
      return changed ? Prop::atom(p.predicate(), std::move(args)) : p;
    }
    case Prop::Kind::kImplies: {
      Prop l = subst_prop(theta, p.premise());
      Prop r = subst_prop(theta, p.conclusion());
      if (l.same_node(p.premise()) && r.same_node(p.conclusion())) return p;
      return Prop::implies(std::move(l), std::move(r));
    }
    case Prop::Kind::kForall: {
      TermSubstitution inner = theta;
      inner.erase(p.bound());
      if (inner.empty()) return p;
      Variable x = p.bound();
      if (free_vars(inner).contains(x)) {
        std::set<std::string> avoid;
        collect_names(p, avoid);
        collect_names(inner, avoid);
        Variable renamed{fresh_name(x.name, avoid), x.sort};
        inner.emplace(x, Term::var(renamed));
        return Prop::forall(renamed, subst_prop(inner, p.body()));
      }
      Prop b = subst_prop(inner, p.body());
      return b.same_node(p.body()) ? p : Prop::forall(x, std::move(b));
    }
  }
  return p;
}

}  // namespace detail

// Capture-avoiding simultaneous substitution. Bound variables are renamed
// away from the free variables of the images when they would capture.
inline Prop subst_in_prop(const TermSubstitution& theta, const Prop& p) {
  check_substitution_sorts(theta);
  VariableSet fv = free_vars(p);
  TermSubstitution relevant;
  for (const auto& [v, image] : theta)
    if (fv.contains(v)) relevant.emplace(v, image);
  return detail::subst_prop(relevant, p);
}

inline Prop subst_in_prop(const Variable& x, const Term& a, const Prop& p) {
  return subst_in_prop(TermSubstitution{{x, a}}, p);
}

// Finite set of propositions, deduplicated up to alpha-equivalence.
class Context {
 public:
  Context() = default;
  Context(std::initializer_list<Prop> props) {
    for (const Prop& p : props) insert(p);
  }
  explicit Context(std::span<const Prop> props) {
    for (const Prop& p : props) insert(p);
  }

  bool contains(const Prop& p) const { return contains_key(alpha_key(p)); }
  bool contains_key(const std::string& key) const {
    return std::binary_search(keys_.begin(), keys_.end(), key);
  }

  // Γ ∪ {A}; returns *this unchanged when A is already a member.
  Context with(const Prop& p) const {
    Context out = *this;
    out.insert(p);
    return out;
  }

  bool insert(const Prop& p) {
    std::string key = alpha_key(p);
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it != keys_.end() && *it == key) return false;
    auto pos = it - keys_.begin();
    keys_.insert(it, key);
    props_.insert(props_.begin() + pos, p);
    hash_ = 0;
    for (const auto& k : keys_) hash_ = hash_ * 1000003u ^ std::hash<std::string>{}(k);
    return true;
  }

  std::span<const Prop> props() const { return props_; }
  const std::vector<std::string>& keys() const { return keys_; }
  std::size_t size() const { return props_.size(); }
  bool empty() const { return props_.empty(); }
  std::size_t hash() const { return hash_; }

  friend bool operator==(const Context& a, const Context& b) { return a.keys_ == b.keys_; }

 private:
  std::vector<std::string> keys_;  // sorted
  std::vector<Prop> props_;        // parallel to keys_
  std::size_t hash_ = 0;
};

inline VariableSet free_term_vars(const Context& g) {
  VariableSet out;
  for (const Prop& p : g.props()) collect_free_vars(p, out);
  return out;
}

inline Context subst_in_context(const TermSubstitution& theta, const Context& g) {
  Context out;
  for (const Prop& p : g.props()) out.insert(subst_in_prop(theta, p));
  return out;
}

}  // namespace schemec
