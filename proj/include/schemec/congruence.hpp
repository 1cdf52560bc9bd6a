#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "schemec/proposition.hpp"
#include "schemec/term.hpp"

namespace schemec {

inline void check_prop(const Signature& sig, const Prop& p) {
  switch (p.kind()) {
    case Prop::Kind::kAtom: {
      std::vector<Sort> arity = sig.predicate_arity(p.predicate(), p.args().size());
      if (arity.size() != p.args().size())
        throw SortError("arity mismatch for " + p.predicate() + ": expected " +
                        std::to_string(arity.size()) + " arguments, got " +
                        std::to_string(p.args().size()));
      for (std::size_t i = 0; i < arity.size(); ++i) {
        sig.check_term(p.args()[i]);
        if (p.args()[i].sort() != arity[i])
          throw SortError("argument " + std::to_string(i + 1) + " of " + p.predicate() +
                          " has sort " + p.args()[i].sort().name + ", expected " + arity[i].name);
      }
      return;
    }
    case Prop::Kind::kImplies:
      check_prop(sig, p.premise());
      check_prop(sig, p.conclusion());
      return;
    case Prop::Kind::kForall:
      sig.require_sort(p.bound_sort());
      check_prop(sig, p.body());
      return;
  }
}

// Rewrites an atomic proposition. Variables of the left-hand side act as
// pattern variables.
struct PropRule {
  Prop lhs;
  Prop rhs;
  // Comprehension rules are excluded from display folding.
  bool foldable = true;
};

struct TermRule {
  Term lhs;
  Term rhs;
};

inline constexpr std::size_t kDefaultFuel = 10000;
inline constexpr std::size_t kDefaultTermSteps = 10000;

// Budget of head unfoldings for one conversion query.
class Fuel {
 public:
  explicit Fuel(std::size_t budget = kDefaultFuel) : remaining_(budget) {}

  void burn() {
    if (remaining_ == 0) throw FuelExhausted("conversion fuel exhausted");
    --remaining_;
  }
  std::size_t remaining() const { return remaining_; }

 private:
  std::size_t remaining_;
};

class Theory {
 public:
  // Empty theory with implicit propositional atoms: the simply-typed case.
  static Theory propositional() {
    Theory th;
    th.signature_.set_implicit_atoms(true);
    return th;
  }

  Signature& signature() { return signature_; }
  const Signature& signature() const { return signature_; }

  void add_prop_rule(Prop lhs, Prop rhs, bool foldable = true) {
    if (!lhs.is_atom())
      throw TheoryError("rule left-hand side must be atomic (non-confusing congruence)");
    check_prop(signature_, lhs);
    check_prop(signature_, rhs);
    VariableSet lhs_vars = free_vars(lhs);
    for (const Variable& v : free_vars(rhs))
      if (!lhs_vars.contains(v))
        throw TheoryError("rule right-hand side variable " + v.name + " does not occur in lhs");
    by_predicate_[lhs.predicate()].push_back(prop_rules_.size());
    prop_rules_.push_back(PropRule{std::move(lhs), std::move(rhs), foldable});
  }

  void add_term_rule(Term lhs, Term rhs) {
    if (lhs.is_var()) throw TheoryError("term rule left-hand side must not be a variable");
    signature_.check_term(lhs);
    signature_.check_term(rhs);
    if (lhs.sort() != rhs.sort()) throw TheoryError("term rule sides have different sorts");
    std::vector<Variable> seen;
    collect_pattern_occurrences(lhs, seen);
    std::set<Variable> uniq(seen.begin(), seen.end());
    if (uniq.size() != seen.size()) throw TheoryError("term rule left-hand side must be linear");
    for (const Variable& v : free_vars(rhs))
      if (!uniq.contains(v))
        throw TheoryError("term rule right-hand side variable " + v.name + " does not occur in lhs");
    term_rules_.push_back(TermRule{std::move(lhs), std::move(rhs)});
  }

  const std::vector<PropRule>& prop_rules() const { return prop_rules_; }
  const std::vector<TermRule>& term_rules() const { return term_rules_; }

  // Indices into prop_rules() whose lhs has the given head, in declaration order.
  const std::vector<std::size_t>& rules_for(const std::string& predicate) const {
    static const std::vector<std::size_t> kNone;
    auto it = by_predicate_.find(predicate);
    return it == by_predicate_.end() ? kNone : it->second;
  }

  std::size_t term_step_bound() const { return term_step_bound_; }
  void set_term_step_bound(std::size_t n) { term_step_bound_ = n; }

 private:
  static void collect_pattern_occurrences(const Term& t, std::vector<Variable>& out) {
    if (t.is_var()) {
      out.push_back(t.variable());
      return;
    }
    for (const Term& a : t.args()) collect_pattern_occurrences(a, out);
  }

  Signature signature_;
  std::vector<PropRule> prop_rules_;
  std::vector<TermRule> term_rules_;
  std::map<std::string, std::vector<std::size_t>> by_predicate_;
  std::size_t term_step_bound_ = kDefaultTermSteps;
};

// Syntactic first-order matching; repeated pattern variables must agree.
inline bool match_term(const Term& pattern, const Term& t, TermSubstitution& binding) {
  if (pattern.is_var()) {
    if (pattern.sort() != t.sort()) return false;
    auto [it, inserted] = binding.emplace(pattern.variable(), t);
    return inserted || it->second == t;
  }
  if (t.is_var() || pattern.name() != t.name() || pattern.args().size() != t.args().size())
    return false;
  for (std::size_t i = 0; i < t.args().size(); ++i)
    if (!match_term(pattern.args()[i], t.args()[i], binding)) return false;
  return true;
}

namespace detail {

inline Term normalize_term(const Theory& th, const Term& a, std::size_t& budget) {
  if (a.is_var()) return a;
  std::vector<Term> args;
  bool changed = false;
  for (const Term& x : a.args()) {
    args.push_back(normalize_term(th, x, budget));
    changed = changed || !args.back().same_node(x);
  }
  Term t = changed ? Term::app(a.name(), std::move(args), a.sort()) : a;
  for (const TermRule& r : th.term_rules()) {
    TermSubstitution binding;
    if (match_term(r.lhs, t, binding)) {
      if (budget == 0) throw FuelExhausted("term rewriting step bound exceeded");
      --budget;
      return normalize_term(th, subst_in_term(binding, r.rhs), budget);
    }
  }
  return t;
}

inline Prop normalize_atom_args(const Theory& th, const Prop& p, std::size_t& budget) {
  std::vector<Term> args;
  bool changed = false;
  for (const Term& a : p.args()) {
    args.push_back(normalize_term(th, a, budget));
    changed = changed || !args.back().same_node(a);
  }
  return changed ? Prop::atom(p.predicate(), std::move(args)) : p;
}

}  // namespace detail

// Innermost normal form under the term rules.
inline Term normalize_term(const Theory& th, const Term& a) {
  if (th.term_rules().empty()) return a;
  std::size_t budget = th.term_step_bound();
  return detail::normalize_term(th, a, budget);
}

// Normalizes every term occurring in p.
inline Prop normalize_terms(const Theory& th, const Prop& p) {
  if (th.term_rules().empty()) return p;
  switch (p.kind()) {
    case Prop::Kind::kAtom: {
      std::size_t budget = th.term_step_bound();
      return detail::normalize_atom_args(th, p, budget);
    }
    case Prop::Kind::kImplies:
      return Prop::implies(normalize_terms(th, p.premise()), normalize_terms(th, p.conclusion()));
    case Prop::Kind::kForall:
      return Prop::forall(p.bound(), normalize_terms(th, p.body()));
  }
  return p;
}

// One unfolding of an atomic proposition by the first matching rule.
inline std::optional<Prop> head_unfold(const Theory& th, const Prop& a) {
  if (!a.is_atom()) throw PreconditionError("head_unfold expects an atomic proposition");
  const auto& candidates = th.rules_for(a.predicate());
  if (candidates.empty()) return std::nullopt;
  std::size_t budget = th.term_step_bound();
  Prop atom = detail::normalize_atom_args(th, a, budget);
  for (std::size_t idx : candidates) {
    const PropRule& r = th.prop_rules()[idx];
    if (r.lhs.args().size() != atom.args().size()) continue;
    TermSubstitution binding;
    bool ok = true;
    for (std::size_t i = 0; ok && i < atom.args().size(); ++i)
      ok = match_term(r.lhs.args()[i], atom.args()[i], binding);
    if (ok) return subst_in_prop(binding, r.rhs);
  }
  return std::nullopt;
}

// Unfolds the head until it is an implication, a quantification, or an atom
// no rule matches. Atom arguments come back term-normalized.
inline Prop whnf_prop(const Theory& th, const Prop& a, Fuel& fuel) {
  Prop cur = a;
  while (cur.is_atom()) {
    std::optional<Prop> next = head_unfold(th, cur);
    if (!next) {
      std::size_t budget = th.term_step_bound();
      return detail::normalize_atom_args(th, cur, budget);
    }
    fuel.burn();
    cur = *next;
  }
  return cur;
}

inline Prop whnf_prop(const Theory& th, const Prop& a) {
  Fuel fuel;
  return whnf_prop(th, a, fuel);
}

namespace detail {

// Opens a quantification onto the given variable.
inline Prop instantiate_body(const Prop& forall, const Variable& v) {
  if (forall.bound() == v) return forall.body();
  return subst_in_prop(forall.bound(), Term::var(v), forall.body());
}

inline bool convertible(const Theory& th, const Prop& a, const Prop& b, Fuel& fuel) {
  if (alpha_eq(a, b)) return true;
  Prop x = whnf_prop(th, a, fuel);
  Prop y = whnf_prop(th, b, fuel);
  if (x.kind() != y.kind()) return false;
  switch (x.kind()) {
    case Prop::Kind::kImplies:
      return convertible(th, x.premise(), y.premise(), fuel) &&
             convertible(th, x.conclusion(), y.conclusion(), fuel);
    case Prop::Kind::kForall: {
      if (x.bound_sort() != y.bound_sort()) return false;
      Variable z = x.bound();
      if (x.bound_name() != y.bound_name()) {
        std::set<std::string> avoid;
        collect_names(x, avoid);
        collect_names(y, avoid);
        z.name = fresh_name(x.bound_name(), avoid);
      }
      return convertible(th, instantiate_body(x, z), instantiate_body(y, z), fuel);
    }
    case Prop::Kind::kAtom: {
      if (x.predicate() != y.predicate() || x.args().size() != y.args().size()) return false;
      for (std::size_t i = 0; i < x.args().size(); ++i)
        if (!(x.args()[i] == y.args()[i])) return false;
      return true;
    }
  }
  return false;
}

}  // namespace detail

// Decides A ≡ B by alpha comparison first, then lazy head unfolding and
// componentwise recursion. Throws FuelExhausted rather than answering false
// when the budget runs out.
inline bool convertible(const Theory& th, const Prop& a, const Prop& b, Fuel& fuel) {
  return detail::convertible(th, a, b, fuel);
}

inline bool convertible(const Theory& th, const Prop& a, const Prop& b,
                        std::size_t fuel = kDefaultFuel) {
  Fuel f(fuel);
  return detail::convertible(th, a, b, f);
}

namespace detail {

// Matches a rule right-hand side against a proposition up to renaming of
// bound variables. Pattern variables may not capture target binders.
inline bool match_prop_term(const Term& pattern, const Term& t, const VariableSet& pattern_vars,
                            const BinderEnv& env, TermSubstitution& binding) {
  if (pattern.is_var()) {
    if (pattern.sort() != t.sort()) return false;
    auto dp = depth_of(env.left, pattern.variable());
    if (dp) {
      if (!t.is_var()) return false;
      auto dt = depth_of(env.right, t.variable());
      return dt && *dt == *dp;
    }
    if (pattern_vars.contains(pattern.variable())) {
      for (const Variable& v : free_vars(t))
        if (depth_of(env.right, v)) return false;
      auto [it, inserted] = binding.emplace(pattern.variable(), t);
      return inserted || it->second == t;
    }
    return t.is_var() && !depth_of(env.right, t.variable()) && t.variable() == pattern.variable();
  }
  if (t.is_var() || pattern.name() != t.name() || pattern.args().size() != t.args().size())
    return false;
  for (std::size_t i = 0; i < t.args().size(); ++i)
    if (!match_prop_term(pattern.args()[i], t.args()[i], pattern_vars, env, binding)) return false;
  return true;
}

inline bool match_prop(const Prop& pattern, const Prop& p, const VariableSet& pattern_vars,
                       BinderEnv& env, TermSubstitution& binding) {
  if (pattern.kind() != p.kind()) return false;
  switch (p.kind()) {
    case Prop::Kind::kAtom:
      if (pattern.predicate() != p.predicate() || pattern.args().size() != p.args().size())
        return false;
      for (std::size_t i = 0; i < p.args().size(); ++i)
        if (!match_prop_term(pattern.args()[i], p.args()[i], pattern_vars, env, binding))
          return false;
      return true;
    case Prop::Kind::kImplies:
      return match_prop(pattern.premise(), p.premise(), pattern_vars, env, binding) &&
             match_prop(pattern.conclusion(), p.conclusion(), pattern_vars, env, binding);
    case Prop::Kind::kForall: {
      if (pattern.bound_sort() != p.bound_sort()) return false;
      env.left.push_back(pattern.bound());
      env.right.push_back(p.bound());
      bool ok = match_prop(pattern.body(), p.body(), pattern_vars, env, binding);
      env.left.pop_back();
      env.right.pop_back();
      return ok;
    }
  }
  return false;
}

}  // namespace detail

// Display aid: rewrites subpropositions that are instances of a foldable
// rule's right-hand side back to the rule's atomic left-hand side, outermost
// first. The result is convertible to the input.
inline Prop fold_prop(const Theory& th, const Prop& p) {
  for (const PropRule& r : th.prop_rules()) {
    if (!r.foldable) continue;
    VariableSet pattern_vars = free_vars(r.lhs);
    detail::BinderEnv env;
    TermSubstitution binding;
    if (detail::match_prop(r.rhs, p, pattern_vars, env, binding) &&
        binding.size() == pattern_vars.size())
      return subst_in_prop(binding, r.lhs);
  }
  switch (p.kind()) {
    case Prop::Kind::kAtom:
      return p;
    case Prop::Kind::kImplies:
      return Prop::implies(fold_prop(th, p.premise()), fold_prop(th, p.conclusion()));
    case Prop::Kind::kForall:
      return Prop::forall(p.bound(), fold_prop(th, p.body()));
  }
  return p;
}

}  // namespace schemec
