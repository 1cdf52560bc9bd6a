#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "schemec/congruence.hpp"
#include "schemec/print.hpp"
#include "schemec/proposition.hpp"
#include "schemec/scheme.hpp"

namespace schemec {

struct TypingOptions {
  // Test-only switch: with conversion off, whnf is the identity and
  // convertibility is alpha-equivalence.
  bool conversion = true;
  std::size_t fuel = kDefaultFuel;
};

// One node of a natural-deduction derivation.
struct Derivation {
  enum class Rule { kAx, kImpIntro, kImpElim, kForallIntro, kForallElim, kConv };

  Rule rule;
  Context context;
  Scheme scheme;
  Prop type;
  std::vector<Derivation> premises;
};

inline const char* rule_name(Derivation::Rule r) {
  switch (r) {
    case Derivation::Rule::kAx: return "ax";
    case Derivation::Rule::kImpIntro: return "=>i";
    case Derivation::Rule::kImpElim: return "=>e";
    case Derivation::Rule::kForallIntro: return "forall-i";
    case Derivation::Rule::kForallElim: return "forall-e";
    case Derivation::Rule::kConv: return "conv";
  }
  return "?";
}

namespace detail {

class TypeInferrer {
 public:
  TypeInferrer(const Theory& th, const TypingOptions& opts) : th_(th), opts_(opts) {}

  Prop infer(const Context& g, const Scheme& t) {
    MemoKey key{t.identity(), g.hash()};
    auto it = memo_.find(key);
    if (it != memo_.end())
      for (const auto& [ctx, type] : it->second)
        if (ctx == g) return type;
    Prop type = infer_uncached(g, t);
    memo_[key].emplace_back(g, type);
    return type;
  }

  Derivation derive(const Context& g, const Scheme& t) {
    switch (t.kind()) {
      case Scheme::Kind::kVar:
        return Derivation{Derivation::Rule::kAx, g, t, axiom(g, t), {}};
      case Scheme::Kind::kLam: {
        check_wellsorted(t.type());
        Derivation body = derive(g.with(t.type()), t.body());
        Prop type = Prop::implies(t.type(), body.type);
        return Derivation{Derivation::Rule::kImpIntro, g, t, type, {std::move(body)}};
      }
      case Scheme::Kind::kApp: {
        Derivation fn = derive(g, t.fn());
        Prop arrow = whnf(fn.type);
        if (!arrow.is_implies()) throw not_an_implication(t, fn.type);
        Derivation arg = derive(g, t.arg());
        if (!convertible(arg.type, arrow.premise())) throw argument_mismatch(t, arg.type, arrow.premise());
        Prop result = arrow.conclusion();
        return Derivation{Derivation::Rule::kImpElim, g, t, result,
                          {conv(std::move(fn), arrow), conv(std::move(arg), arrow.premise())}};
      }
      case Scheme::Kind::kTermLam: {
        check_generalizable(g, t);
        Derivation body = derive(g, t.body());
        Prop type = Prop::forall(t.bound(), body.type);
        return Derivation{Derivation::Rule::kForallIntro, g, t, type, {std::move(body)}};
      }
      case Scheme::Kind::kTermApp: {
        Derivation fn = derive(g, t.fn());
        Prop q = whnf(fn.type);
        Prop result = instantiate(t, fn.type, q);
        return Derivation{Derivation::Rule::kForallElim, g, t, result, {conv(std::move(fn), q)}};
      }
    }
    throw TypingError("unknown scheme form");
  }

  Prop whnf(const Prop& a) {
    if (!opts_.conversion) return a;
    Fuel fuel(opts_.fuel);
    return whnf_prop(th_, a, fuel);
  }

  bool convertible(const Prop& a, const Prop& b) {
    if (!opts_.conversion) return alpha_eq(a, b);
    Fuel fuel(opts_.fuel);
    return schemec::convertible(th_, a, b, fuel);
  }

 private:
  struct MemoKey {
    const void* node;
    std::size_t context_hash;
    friend bool operator==(const MemoKey&, const MemoKey&) = default;
  };
  struct MemoHash {
    std::size_t operator()(const MemoKey& k) const {
      return std::hash<const void*>{}(k.node) ^ (k.context_hash * 0x9e3779b97f4a7c15ull);
    }
  };

  Prop infer_uncached(const Context& g, const Scheme& t) {
    switch (t.kind()) {
      case Scheme::Kind::kVar:
        return axiom(g, t);
      case Scheme::Kind::kLam:
        check_wellsorted(t.type());
        return Prop::implies(t.type(), infer(g.with(t.type()), t.body()));
      case Scheme::Kind::kApp: {
        Prop fn_type = infer(g, t.fn());
        Prop arrow = whnf(fn_type);
        if (!arrow.is_implies()) throw not_an_implication(t, fn_type);
        Prop arg_type = infer(g, t.arg());
        if (!convertible(arg_type, arrow.premise()))
          throw argument_mismatch(t, arg_type, arrow.premise());
        return arrow.conclusion();
      }
      case Scheme::Kind::kTermLam:
        check_generalizable(g, t);
        return Prop::forall(t.bound(), infer(g, t.body()));
      case Scheme::Kind::kTermApp: {
        Prop fn_type = infer(g, t.fn());
        return instantiate(t, fn_type, whnf(fn_type));
      }
    }
    throw TypingError("unknown scheme form");
  }

  Prop axiom(const Context& g, const Scheme& t) {
    if (!g.contains(t.type()))
      throw TypingError("canonical variable <" + print(t.type()) + "> is not in the context " +
                        print(g));
    return t.type();
  }

  void check_wellsorted(const Prop& a) {
    try {
      check_prop(th_.signature(), a);
    } catch (const SortError& e) {
      throw TypingError(std::string("ill-sorted binder type: ") + e.what());
    }
  }

  void check_generalizable(const Context& g, const Scheme& t) {
    th_.signature().require_sort(t.bound().sort);
    if (free_term_vars(g).contains(t.bound()))
      throw TypingError("cannot generalize " + t.bound().name + ":" + t.bound().sort.name +
                        ": it occurs free in the context " + print(g));
  }

  Prop instantiate(const Scheme& t, const Prop& fn_type, const Prop& q) {
    if (!q.is_forall())
      throw TypingError("term application of a scheme of type " + print(fn_type) +
                        ", which is not convertible to a quantification");
    const Term& a = t.term_arg();
    try {
      th_.signature().check_term(a);
    } catch (const SortError& e) {
      throw TypingError(std::string("ill-sorted term argument: ") + e.what());
    }
    if (a.sort() != q.bound_sort())
      throw TypingError("term " + print(a) + " has sort " + a.sort().name + ", expected " +
                        q.bound_sort().name);
    return subst_in_prop(q.bound(), a, q.body());
  }

  Derivation conv(Derivation d, const Prop& target) {
    if (alpha_eq(d.type, target)) return d;
    Context g = d.context;
    Scheme s = d.scheme;
    return Derivation{Derivation::Rule::kConv, std::move(g), std::move(s), target, {std::move(d)}};
  }

  static TypingError not_an_implication(const Scheme& t, const Prop& fn_type) {
    return TypingError("cannot apply " + print(t.fn()) + " of type " + print(fn_type) +
                       ", which is not convertible to an implication");
  }
  static TypingError argument_mismatch(const Scheme& t, const Prop& got, const Prop& want) {
    return TypingError("argument " + print(t.arg()) + " has type " + print(got) +
                       ", expected a type convertible to " + print(want));
  }

  const Theory& th_;
  TypingOptions opts_;
  std::unordered_map<MemoKey, std::vector<std::pair<Context, Prop>>, MemoHash> memo_;
};

}  // namespace detail

// Synthesizes A with Γ ⊢ t : A. Conversion is applied at elimination sites:
// the function type is put in weak head form and the argument type is
// checked for convertibility.
inline Prop infer(const Theory& th, const Context& g, const Scheme& t,
                  const TypingOptions& opts = {}) {
  detail::TypeInferrer inf(th, opts);
  return inf.infer(g, t);
}

inline bool check(const Theory& th, const Context& g, const Scheme& t, const Prop& a,
                  const TypingOptions& opts = {}) {
  detail::TypeInferrer inf(th, opts);
  Prop got = inf.infer(g, t);
  return inf.convertible(got, a);
}

// Same algorithm as infer, recording the derivation with explicit conv steps.
inline Derivation infer_derivation(const Theory& th, const Context& g, const Scheme& t,
                                   const TypingOptions& opts = {}) {
  detail::TypeInferrer inf(th, opts);
  return inf.derive(g, t);
}

struct Judgement {
  Context context;
  Scheme scheme;
  Prop type;
};

// Premise data guaranteed by the inversion property, one clause per form:
//   1 <B>           B ∈ Γ, A ≡ B
//   2 λ_B u         Γ ∪ {B} ⊢ u : C, A ≡ B ⇒ C
//   3 (u v)         Γ ⊢ u : B ⇒ C, Γ ⊢ v : B, A ≡ C
//   4 Λx u          Γ ⊢ u : B, A ≡ ∀x B, x ∉ FV(Γ)
//   5 (u a)         Γ ⊢ u : ∀x B, A ≡ [a/x]B
struct Inversion {
  int clause = 0;
  std::optional<Prop> b;
  std::optional<Prop> c;
  std::optional<Variable> x;
};

inline Inversion invert(const Theory& th, const Judgement& j, const TypingOptions& opts = {}) {
  detail::TypeInferrer inf(th, opts);
  const Scheme& t = j.scheme;
  Inversion out;
  Prop claimed = j.type;
  Prop derived = claimed;
  switch (t.kind()) {
    case Scheme::Kind::kVar:
      out.clause = 1;
      out.b = t.type();
      if (!j.context.contains(t.type()))
        throw PreconditionError("judgement not derivable: variable type not in context");
      derived = t.type();
      break;
    case Scheme::Kind::kLam:
      out.clause = 2;
      out.b = t.type();
      out.c = inf.infer(j.context.with(t.type()), t.body());
      derived = Prop::implies(*out.b, *out.c);
      break;
    case Scheme::Kind::kApp: {
      out.clause = 3;
      Prop arrow = inf.whnf(inf.infer(j.context, t.fn()));
      if (!arrow.is_implies()) throw PreconditionError("judgement not derivable");
      out.b = arrow.premise();
      out.c = arrow.conclusion();
      if (!inf.convertible(inf.infer(j.context, t.arg()), *out.b))
        throw PreconditionError("judgement not derivable");
      derived = *out.c;
      break;
    }
    case Scheme::Kind::kTermLam:
      out.clause = 4;
      out.x = t.bound();
      if (free_term_vars(j.context).contains(t.bound()))
        throw PreconditionError("judgement not derivable: bound variable free in context");
      out.b = inf.infer(j.context, t.body());
      derived = Prop::forall(*out.x, *out.b);
      break;
    case Scheme::Kind::kTermApp: {
      out.clause = 5;
      Prop q = inf.whnf(inf.infer(j.context, t.fn()));
      if (!q.is_forall()) throw PreconditionError("judgement not derivable");
      out.x = q.bound();
      out.b = q.body();
      derived = subst_in_prop(q.bound(), t.term_arg(), q.body());
      break;
    }
  }
  if (!inf.convertible(derived, claimed))
    throw PreconditionError("judgement not derivable: type " + print(claimed) +
                            " is not convertible to " + print(derived));
  return out;
}

}  // namespace schemec
