#pragma once

#include <compare>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "schemec/error.hpp"

namespace schemec {

struct Sort {
  std::string name;

  friend bool operator==(const Sort&, const Sort&) = default;
  friend auto operator<=>(const Sort&, const Sort&) = default;
};

// A term variable is identified by its name together with its sort.
struct Variable {
  std::string name;
  Sort sort;

  friend bool operator==(const Variable&, const Variable&) = default;
  friend auto operator<=>(const Variable&, const Variable&) = default;
};

using VariableSet = std::set<Variable>;

// Immutable first-order term. Function applications record the codomain
// sort of their symbol so that the sort of any term is intrinsic.
class Term {
 public:
  enum class Kind { kVar, kApp };

  static Term var(std::string name, Sort sort) {
    return Term(std::make_shared<const Node>(Node{Kind::kVar, std::move(name), std::move(sort), {}}));
  }
  static Term var(const Variable& v) { return var(v.name, v.sort); }
  static Term app(std::string symbol, std::vector<Term> args, Sort codomain) {
    return Term(std::make_shared<const Node>(
        Node{Kind::kApp, std::move(symbol), std::move(codomain), std::move(args)}));
  }

  Kind kind() const { return node_->kind; }
  bool is_var() const { return node_->kind == Kind::kVar; }
  // Variable name or function symbol.
  const std::string& name() const { return node_->name; }
  const Sort& sort() const { return node_->sort; }
  std::span<const Term> args() const { return node_->args; }
  Variable variable() const { return Variable{node_->name, node_->sort}; }

  bool same_node(const Term& other) const { return node_ == other.node_; }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.kind() != b.kind() || a.name() != b.name() || a.sort() != b.sort()) return false;
    auto xs = a.args(), ys = b.args();
    if (xs.size() != ys.size()) return false;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (!(xs[i] == ys[i])) return false;
    return true;
  }

 private:
  struct Node {
    Kind kind;
    std::string name;
    Sort sort;
    std::vector<Term> args;
  };
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

using TermSubstitution = std::map<Variable, Term>;

inline void collect_free_vars(const Term& t, VariableSet& out) {
  if (t.is_var()) {
    out.insert(t.variable());
    return;
  }
  for (const Term& a : t.args()) collect_free_vars(a, out);
}

inline VariableSet free_vars(const Term& t) {
  VariableSet out;
  collect_free_vars(t, out);
  return out;
}

inline bool occurs(const Variable& v, const Term& t) {
  if (t.is_var()) return t.variable() == v;
  for (const Term& a : t.args())
    if (occurs(v, a)) return true;
  return false;
}

inline void collect_names(const Term& t, std::set<std::string>& out) {
  if (t.is_var()) {
    out.insert(t.name());
    return;
  }
  for (const Term& a : t.args()) collect_names(a, out);
}

inline std::size_t term_size(const Term& t) {
  std::size_t n = 1;
  for (const Term& a : t.args()) n += term_size(a);
  return n;
}

inline void check_substitution_sorts(const TermSubstitution& theta) {
  for (const auto& [v, image] : theta)
    if (v.sort != image.sort())
      throw SortError("substitution maps " + v.name + ":" + v.sort.name + " to a term of sort " +
                      image.sort().name);
}

// Terms have no binders, so substitution is plain replacement.
inline Term subst_in_term(const TermSubstitution& theta, const Term& t) {
  if (theta.empty()) return t;
  if (t.is_var()) {
    auto it = theta.find(t.variable());
    return it == theta.end() ? t : it->second;
  }
  std::vector<Term> args;
  args.reserve(t.args().size());
  bool changed = false;
  for (const Term& a : t.args()) {
    args.push_back(subst_in_term(theta, a));
    changed = changed || !args.back().same_node(a);
  }
  if (!changed) return t;
  return Term::app(t.name(), std::move(args), t.sort());
}

inline VariableSet free_vars(const TermSubstitution& theta) {
  VariableSet out;
  for (const auto& [v, image] : theta) collect_free_vars(image, out);
  return out;
}

// Returns `base` decorated with primes, then numeric suffixes, until it
// avoids every name in `avoid`.
inline std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string root = base;
  while (!root.empty() && root.back() == '\'') root.pop_back();
  if (root.empty()) root = "x";
  if (!avoid.contains(base)) return base;
  std::string candidate = root;
  for (int primes = 1; primes <= 3; ++primes) {
    candidate += '\'';
    if (!avoid.contains(candidate)) return candidate;
  }
  for (std::size_t i = 1;; ++i) {
    candidate = root + "_" + std::to_string(i);
    if (!avoid.contains(candidate)) return candidate;
  }
}

struct FunctionSymbol {
  std::vector<Sort> domain;
  Sort codomain;
};

// Sorted first-order signature. `implicit_atoms` admits undeclared
// nullary predicates, which is how the propositional calculus is obtained.
class Signature {
 public:
  void add_sort(const std::string& name) {
    if (functions_.contains(name) || predicates_.contains(name))
      throw TheoryError("sort name already used as a symbol: " + name);
    sorts_.insert(Sort{name});
  }

  void add_function(const std::string& name, std::vector<Sort> domain, Sort codomain) {
    if (functions_.contains(name)) throw TheoryError("function symbol declared twice: " + name);
    if (predicates_.contains(name))
      throw TheoryError("function and predicate namespaces must be disjoint: " + name);
    for (const Sort& s : domain) require_sort(s);
    require_sort(codomain);
    functions_.emplace(name, FunctionSymbol{std::move(domain), std::move(codomain)});
  }

  void add_predicate(const std::string& name, std::vector<Sort> domain) {
    if (predicates_.contains(name)) throw TheoryError("predicate symbol declared twice: " + name);
    if (functions_.contains(name))
      throw TheoryError("function and predicate namespaces must be disjoint: " + name);
    for (const Sort& s : domain) require_sort(s);
    predicates_.emplace(name, std::move(domain));
  }

  bool has_sort(const Sort& s) const { return sorts_.contains(s); }
  const FunctionSymbol* function(const std::string& name) const {
    auto it = functions_.find(name);
    return it == functions_.end() ? nullptr : &it->second;
  }
  const std::vector<Sort>* predicate(const std::string& name) const {
    auto it = predicates_.find(name);
    return it == predicates_.end() ? nullptr : &it->second;
  }
  bool is_predicate_name(const std::string& name) const {
    return predicates_.contains(name) || (implicit_atoms_ && !functions_.contains(name));
  }

  bool implicit_atoms() const { return implicit_atoms_; }
  void set_implicit_atoms(bool on) { implicit_atoms_ = on; }

  const std::set<Sort>& sorts() const { return sorts_; }
  const std::map<std::string, FunctionSymbol>& functions() const { return functions_; }
  const std::map<std::string, std::vector<Sort>>& predicates() const { return predicates_; }

  void require_sort(const Sort& s) const {
    if (!sorts_.contains(s)) throw SortError("undeclared sort: " + s.name);
  }

  void check_term(const Term& t) const {
    if (t.is_var()) {
      require_sort(t.sort());
      return;
    }
    const FunctionSymbol* f = function(t.name());
    if (f == nullptr) throw SortError("unknown function symbol: " + t.name());
    if (f->domain.size() != t.args().size())
      throw SortError("arity mismatch for " + t.name() + ": expected " +
                      std::to_string(f->domain.size()) + " arguments, got " +
                      std::to_string(t.args().size()));
    if (f->codomain != t.sort()) throw SortError("wrong codomain recorded for " + t.name());
    for (std::size_t i = 0; i < f->domain.size(); ++i) {
      check_term(t.args()[i]);
      if (t.args()[i].sort() != f->domain[i])
        throw SortError("argument " + std::to_string(i + 1) + " of " + t.name() + " has sort " +
                        t.args()[i].sort().name + ", expected " + f->domain[i].name);
    }
  }

  // Arity of a predicate; for implicit atoms only nullary use is accepted.
  std::vector<Sort> predicate_arity(const std::string& name, std::size_t used_with) const {
    if (const auto* p = predicate(name)) return *p;
    if (implicit_atoms_ && !functions_.contains(name) && used_with == 0) return {};
    throw SortError("unknown predicate symbol: " + name);
  }

 private:
  std::set<Sort> sorts_;
  std::map<std::string, FunctionSymbol> functions_;
  std::map<std::string, std::vector<Sort>> predicates_;
  bool implicit_atoms_ = false;
};

}  // namespace schemec
