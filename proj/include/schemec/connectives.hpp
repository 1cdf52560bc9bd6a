#pragma once

#include <initializer_list>
#include <optional>
#include <set>
#include <string>

#include "schemec/proposition.hpp"
#include "schemec/term.hpp"

namespace schemec {

// Second-order encodings of the remaining connectives over the nullary class
// sort. The quantified class variable is named from a reserved prefix and is
// kept apart from every name occurring in the arguments.
namespace connectives {

inline const Sort& class0() {
  static const Sort s{"kappa0"};
  return s;
}

inline Prop eps0(const Term& c) { return Prop::atom("eps0", {c}); }

inline Variable fresh_class(std::initializer_list<const Prop*> parts) {
  std::set<std::string> avoid;
  for (const Prop* p : parts) collect_names(*p, avoid);
  return Variable{fresh_name("_c", avoid), class0()};
}

inline Prop top() {
  Variable c{"_c", class0()};
  Term tc = Term::var(c);
  return Prop::forall(c, Prop::implies(eps0(tc), eps0(tc)));
}

inline Prop bot() {
  Variable c{"_c", class0()};
  return Prop::forall(c, eps0(Term::var(c)));
}

inline Prop neg(const Prop& a) { return Prop::implies(a, bot()); }

inline Prop conj(const Prop& a, const Prop& b) {
  Variable c = fresh_class({&a, &b});
  Prop e = eps0(Term::var(c));
  return Prop::forall(c, Prop::implies(imp({a, b}, e), e));
}

inline Prop disj(const Prop& a, const Prop& b) {
  Variable c = fresh_class({&a, &b});
  Prop e = eps0(Term::var(c));
  return Prop::forall(c, imp({Prop::implies(a, e), Prop::implies(b, e)}, e));
}

inline Prop iff(const Prop& a, const Prop& b) {
  return conj(Prop::implies(a, b), Prop::implies(b, a));
}

inline Prop exists(const Variable& x, const Prop& a) {
  Prop bound = Prop::forall(x, a);
  Variable c = fresh_class({&bound});
  Prop e = eps0(Term::var(c));
  return Prop::forall(c, Prop::implies(Prop::forall(x, Prop::implies(a, e)), e));
}

// Parts of an encoded existential ∀c ((∀x (A ⇒ ε₀(c))) ⇒ ε₀(c)).
struct ExistsView {
  Variable c;
  Variable x;
  Prop body;
};

inline std::optional<ExistsView> as_exists(const Prop& p) {
  if (!p.is_forall() || p.bound_sort() != class0()) return std::nullopt;
  Variable c = p.bound();
  const Prop& imp1 = p.body();
  if (!imp1.is_implies()) return std::nullopt;
  const Prop& goal = imp1.conclusion();
  if (!alpha_eq(goal, eps0(Term::var(c)))) return std::nullopt;
  const Prop& q = imp1.premise();
  if (!q.is_forall() || q.bound() == c) return std::nullopt;
  const Prop& inner = q.body();
  if (!inner.is_implies() || !alpha_eq(inner.conclusion(), eps0(Term::var(c)))) return std::nullopt;
  if (occurs_free(c, inner.premise())) return std::nullopt;
  return ExistsView{c, q.bound(), inner.premise()};
}

}  // namespace connectives

// True when the signature carries what the encodings need.
inline bool has_class_connectives(const Signature& sig) {
  const auto* e = sig.predicate("eps0");
  return sig.has_sort(connectives::class0()) && e != nullptr && e->size() == 1 &&
         (*e)[0] == connectives::class0();
}

}  // namespace schemec
