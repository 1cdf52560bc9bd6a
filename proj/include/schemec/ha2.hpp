#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <deque>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "schemec/congruence.hpp"
#include "schemec/connectives.hpp"
#include "schemec/error.hpp"
#include "schemec/proposition.hpp"
#include "schemec/reduction.hpp"
#include "schemec/scheme.hpp"
#include "schemec/term.hpp"
#include "schemec/typing.hpp"

namespace schemec {

namespace ha2 {

inline const Sort& iota() {
  static const Sort s{"iota"};
  return s;
}
inline Sort kappa(std::size_t n) { return Sort{"kappa" + std::to_string(n)}; }
inline std::string eps_name(std::size_t n) { return "eps" + std::to_string(n); }

inline Term zero() { return Term::app("zero", {}, iota()); }
inline Term succ(Term a) { return Term::app("S", {std::move(a)}, iota()); }
inline Term pred(Term a) { return Term::app("Pred", {std::move(a)}, iota()); }
inline Term var(const std::string& name) { return Term::var(name, iota()); }

inline Prop eq(Term a, Term b) { return Prop::atom("eq", {std::move(a), std::move(b)}); }
inline Prop nat(Term a) { return Prop::atom("N", {std::move(a)}); }
inline Prop null(Term a) { return Prop::atom("Null", {std::move(a)}); }
inline Prop eps(std::vector<Term> xs, Term c) {
  std::size_t n = xs.size();
  xs.push_back(std::move(c));
  return Prop::atom(eps_name(n), std::move(xs));
}
inline Prop eps1(Term x, Term c) { return eps({std::move(x)}, std::move(c)); }

// 0 ε₁ c and ∀y (N(y) ⇒ y ε₁ c ⇒ S(y) ε₁ c), the two hypotheses of N.
inline Prop base_case(const Term& c) { return eps1(zero(), c); }
inline Prop step_case(const Term& c) {
  Term y = var("y");
  return Prop::forall("y", iota(), imp({nat(y), eps1(y, c)}, eps1(succ(y), c)));
}

}  // namespace ha2

struct ComprehensionSymbol {
  std::string name;
  std::vector<Variable> xs;  // class arguments
  std::vector<Variable> ys;  // parameters
  Prop body;

  Term apply(std::vector<Term> params) const {
    return Term::app(name, std::move(params), ha2::kappa(xs.size()));
  }
  Term constant() const { return apply({}); }
};

class HA2Theory {
 public:
  static HA2Theory make(std::size_t max_arity = 2) {
    using namespace ha2;
    HA2Theory out;
    out.k_ = max_arity;
    Signature& sig = out.th_.signature();
    sig.add_sort("iota");
    for (std::size_t n = 0; n <= max_arity; ++n) sig.add_sort(kappa(n).name);
    sig.add_function("zero", {}, iota());
    sig.add_function("S", {iota()}, iota());
    sig.add_function("Pred", {iota()}, iota());
    sig.add_predicate("eq", {iota(), iota()});
    sig.add_predicate("N", {iota()});
    sig.add_predicate("Null", {iota()});
    for (std::size_t n = 0; n <= max_arity; ++n) {
      std::vector<Sort> dom(n, iota());
      dom.push_back(kappa(n));
      sig.add_predicate(eps_name(n), std::move(dom));
    }
    Term x = Term::var("?x", iota());
    Term y = Term::var("?y", iota());
    Term c1 = Term::var("c", kappa(1));
    Term c0 = Term::var("c", kappa(0));
    out.th_.add_prop_rule(eq(x, y), Prop::forall("c", kappa(1), Prop::implies(eps1(x, c1), eps1(y, c1))));
    out.th_.add_prop_rule(
        nat(x), Prop::forall("c", kappa(1), imp({base_case(c1), step_case(c1)}, eps1(x, c1))));
    out.th_.add_prop_rule(null(zero()),
                          Prop::forall("c", kappa(0), Prop::implies(eps({}, c0), eps({}, c0))));
    out.th_.add_prop_rule(null(succ(x)), Prop::forall("c", kappa(0), eps({}, c0)));
    out.th_.add_term_rule(pred(zero()), zero());
    out.th_.add_term_rule(pred(succ(x)), x);
    return out;
  }

  // Adopts a parsed theory file, recovering declared comprehension symbols
  // from their ε-rules.
  static HA2Theory from_theory(Theory th) {
    using namespace ha2;
    const Signature& sig = th.signature();
    auto need_pred = [&](const std::string& p, std::size_t arity) {
      const auto* d = sig.predicate(p);
      if (d == nullptr || d->size() != arity) throw TheoryError("not an HA2 theory: missing predicate " + p);
    };
    if (!sig.has_sort(iota()) || !sig.function("zero") || !sig.function("S") || !sig.function("Pred"))
      throw TheoryError("not an HA2 theory: missing iota, zero, S or Pred");
    need_pred("eq", 2);
    need_pred("N", 1);
    need_pred("Null", 1);
    HA2Theory out;
    std::size_t k = 0;
    while (sig.has_sort(kappa(k)) && sig.predicate(eps_name(k)) != nullptr) ++k;
    if (k < 2) throw TheoryError("not an HA2 theory: needs kappa0, kappa1, eps0 and eps1");
    out.k_ = k - 1;
    for (const PropRule& r : th.prop_rules()) {
      const Prop& lhs = r.lhs;
      if (lhs.args().empty()) continue;
      const Term& cls = lhs.args().back();
      if (cls.is_var() || !cls.name().starts_with("_f")) continue;
      ComprehensionSymbol sym{cls.name(), {}, {}, r.rhs};
      TermSubstitution back;
      auto unpattern = [&](const Term& v, std::vector<Variable>& into) {
        if (!v.is_var()) throw TheoryError("malformed comprehension rule for " + sym.name);
        Variable plain{v.name().substr(1), v.sort()};
        back.emplace(v.variable(), Term::var(plain));
        into.push_back(plain);
      };
      for (std::size_t i = 0; i + 1 < lhs.args().size(); ++i) unpattern(lhs.args()[i], sym.xs);
      for (const Term& a : cls.args()) unpattern(a, sym.ys);
      sym.body = subst_in_prop(back, r.rhs);
      out.register_symbol(std::move(sym));
    }
    out.th_ = std::move(th);
    return out;
  }

  const Theory& theory() const { return th_; }
  const Signature& signature() const { return th_.signature(); }
  std::size_t max_class_arity() const { return k_; }
  const std::deque<ComprehensionSymbol>& classes() const { return classes_; }

  // f_{⟨xs⟩,⟨ys⟩,body} with its rule xs ε_p f(ys) ~> body. Declaring the same
  // triple twice returns the existing symbol.
  const ComprehensionSymbol& declare_class(const std::vector<Variable>& xs,
                                           const std::vector<Variable>& ys, const Prop& body) {
    if (xs.size() > k_)
      throw TheoryError("class arity " + std::to_string(xs.size()) + " exceeds the maximum " +
                        std::to_string(k_));
    std::set<Variable> allowed;
    for (const Variable& v : xs) {
      if (v.sort != ha2::iota()) throw TheoryError("class argument " + v.name + " must have sort iota");
      if (!allowed.insert(v).second) throw TheoryError("repeated class variable " + v.name);
    }
    for (const Variable& v : ys) {
      if (v.sort != ha2::iota()) throw TheoryError("class parameter " + v.name + " must have sort iota");
      if (!allowed.insert(v).second) throw TheoryError("repeated class variable " + v.name);
    }
    std::set<std::string> fs;
    collect_function_symbols(body, fs);
    for (const std::string& f : fs)
      if (f.starts_with("_f"))
        throw TheoryError("comprehension body must not contain comprehension symbols (found " + f + ")");
    for (const Variable& v : free_vars(body))
      if (!allowed.contains(v))
        throw TheoryError("stray free variable " + v.name + " in comprehension body");
    check_prop(th_.signature(), body);

    std::string key = registry_key(xs, ys, body);
    if (auto it = by_key_.find(key); it != by_key_.end()) return classes_[it->second];

    ComprehensionSymbol sym{"_f" + std::to_string(next_index_), xs, ys, body};
    std::vector<Sort> dom(ys.size(), ha2::iota());
    th_.signature().add_function(sym.name, std::move(dom), ha2::kappa(xs.size()));

    TermSubstitution to_pattern;
    std::vector<Term> lhs_args, params;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      Term p = Term::var("?x" + std::to_string(i + 1), ha2::iota());
      to_pattern.emplace(xs[i], p);
      lhs_args.push_back(p);
    }
    for (std::size_t j = 0; j < ys.size(); ++j) {
      Term p = Term::var("?y" + std::to_string(j + 1), ha2::iota());
      to_pattern.emplace(ys[j], p);
      params.push_back(p);
    }
    lhs_args.push_back(sym.apply(params));
    Prop lhs = Prop::atom(ha2::eps_name(xs.size()), std::move(lhs_args));
    th_.add_prop_rule(std::move(lhs), subst_in_prop(to_pattern, body), false);
    return register_symbol(std::move(sym));
  }

 private:
  static std::string registry_key(const std::vector<Variable>& xs, const std::vector<Variable>& ys,
                                  const Prop& body) {
    Prop closed = body;
    for (auto it = xs.rbegin(); it != xs.rend(); ++it) closed = Prop::forall(*it, closed);
    for (auto it = ys.rbegin(); it != ys.rend(); ++it) closed = Prop::forall(*it, closed);
    return std::to_string(xs.size()) + "/" + std::to_string(ys.size()) + "/" + alpha_key(closed);
  }

  const ComprehensionSymbol& register_symbol(ComprehensionSymbol sym) {
    std::size_t idx = 0;
    if (std::from_chars(sym.name.data() + 2, sym.name.data() + sym.name.size(), idx).ec == std::errc{})
      next_index_ = std::max(next_index_, idx + 1);
    by_key_.emplace(registry_key(sym.xs, sym.ys, sym.body), classes_.size());
    classes_.push_back(std::move(sym));
    return classes_.back();
  }

  Theory th_;
  std::size_t k_ = 2;
  std::deque<ComprehensionSymbol> classes_;
  std::map<std::string, std::size_t> by_key_;
  std::size_t next_index_ = 1;
};

// Sⁿ(0)
inline Term numeral_term(std::size_t n) {
  Term t = ha2::zero();
  for (std::size_t i = 0; i < n; ++i) t = ha2::succ(std::move(t));
  return t;
}

// ρ₀ = Λc λ_A λ_B ⟨A⟩, ρ_{n+1} = Λc λ_A λ_B (⟨B⟩ n ρ_n (ρ_n c ⟨A⟩ ⟨B⟩)).
// Each level binds its own class variable c<n>, so the inner Λ is not
// blocked by the outer hypotheses. ρ_n is shared, not copied.
inline Scheme numeral_proof(std::size_t n) {
  auto level = [&](std::size_t i, auto&& body_of) {
    Variable c{"c" + std::to_string(i), ha2::kappa(1)};
    Term tc = Term::var(c);
    Prop a = ha2::base_case(tc), b = ha2::step_case(tc);
    return Scheme::term_lam(c, Scheme::lam(a, Scheme::lam(b, body_of(tc, a, b))));
  };
  Scheme rho = level(0, [](const Term&, const Prop& a, const Prop&) { return Scheme::var(a); });
  for (std::size_t i = 1; i <= n; ++i) {
    Term prev = numeral_term(i - 1);
    rho = level(i, [&](const Term& c, const Prop& a, const Prop& b) {
      Scheme inner = apply(Scheme::term_app(rho, c), {Scheme::var(a), Scheme::var(b)});
      return apply(Scheme::term_app(Scheme::var(b), prev), {rho, inner});
    });
  }
  return rho;
}

// q when the term normalizes to S^q(0).
inline std::size_t decode_numeral(const Theory& th, const Term& a) {
  Term t = normalize_term(th, a);
  std::size_t q = 0;
  const Term* cur = &t;
  while (!cur->is_var() && cur->name() == "S" && cur->args().size() == 1) {
    ++q;
    cur = &cur->args()[0];
  }
  if (cur->is_var() || cur->name() != "zero" || !cur->args().empty())
    throw PreconditionError("not a numeral: " + print(t));
  return q;
}

struct Fixture {
  std::string name;
  Prop statement;
  Scheme proof;
};

namespace detail {

// Λc λ_{x ε₁ c} ⟨x ε₁ c⟩ : x = x
inline Scheme refl_proof(const Term& x, const std::string& cname = "c") {
  Variable c{cname, ha2::kappa(1)};
  Prop h = ha2::eps1(x, Term::var(c));
  return Scheme::term_lam(c, Scheme::lam(h, Scheme::var(h)));
}

// Under the hypothesis N(x): Λc λ_A λ_B (⟨B⟩ x ⟨N(x)⟩ (⟨N(x)⟩ c ⟨A⟩ ⟨B⟩)) : N(S(x))
inline Scheme succ_step(const Term& x, const std::string& cname = "c") {
  Variable c{cname, ha2::kappa(1)};
  Term tc = Term::var(c);
  Prop a = ha2::base_case(tc), b = ha2::step_case(tc);
  Scheme hyp = Scheme::var(ha2::nat(x));
  Scheme rec = apply(Scheme::term_app(hyp, tc), {Scheme::var(a), Scheme::var(b)});
  return Scheme::term_lam(
      c, Scheme::lam(a, Scheme::lam(b, apply(Scheme::term_app(Scheme::var(b), x), {hyp, rec}))));
}

}  // namespace detail

// Proofs of the usual axioms of second-order arithmetic. Declares the
// comprehension symbols they use.
inline std::vector<Fixture> axiom_fixtures(HA2Theory& th) {
  using namespace ha2;
  using connectives::neg;
  std::vector<Fixture> out;
  Term x = var("x"), y = var("y");
  Variable vx{"x", iota()}, vy{"y", iota()};

  out.push_back({"reflexivity", Prop::forall(vx, eq(x, x)), Scheme::term_lam(vx, detail::refl_proof(x))});

  {
    Variable c{"c", kappa(1)};
    Term tc = Term::var(c);
    Prop h = eq(x, y);
    Prop stmt = Prop::forall(
        vx, Prop::forall(vy, Prop::forall(c, imp({h, eps1(x, tc)}, eps1(y, tc)))));
    Scheme pf = Scheme::term_lam(
        vx, Scheme::term_lam(vy, Scheme::term_lam(c, Scheme::lam(h, Scheme::term_app(Scheme::var(h), tc)))));
    out.push_back({"leibniz", stmt, pf});
  }

  out.push_back({"zero", nat(zero()), numeral_proof(0)});

  out.push_back({"successor", Prop::forall(vx, Prop::implies(nat(x), nat(succ(x)))),
                 Scheme::term_lam(vx, Scheme::lam(nat(x), detail::succ_step(x)))});

  {
    // Class {z | x = Pred(z)} with parameter x: S(x) is in it by reflexivity,
    // and S(y) being in it is x = y.
    const ComprehensionSymbol& cls = th.declare_class({Variable{"z", iota()}}, {vx}, eq(x, pred(var("z"))));
    Prop h = eq(succ(x), succ(y));
    Prop stmt = Prop::forall(vx, Prop::forall(vy, Prop::implies(h, eq(x, y))));
    Scheme pf = Scheme::term_lam(
        vx, Scheme::term_lam(
                vy, Scheme::lam(h, Scheme::app(Scheme::term_app(Scheme::var(h), cls.apply({x})),
                                                detail::refl_proof(x)))));
    out.push_back({"injectivity", stmt, pf});
  }

  {
    // Class {z | Null(z)}: 0 is in it by ⊤, S(x) being in it is ⊥.
    const ComprehensionSymbol& cls = th.declare_class({Variable{"z", iota()}}, {}, null(var("z")));
    Prop h = eq(zero(), succ(x));
    Variable c{"c", kappa(0)};
    Prop e = connectives::eps0(Term::var(c));
    Scheme top_pf = Scheme::term_lam(c, Scheme::lam(e, Scheme::var(e)));
    Scheme pf = Scheme::term_lam(
        vx, Scheme::lam(h, Scheme::app(Scheme::term_app(Scheme::var(h), cls.constant()), top_pf)));
    out.push_back({"zero-not-successor", Prop::forall(vx, neg(h)), pf});
  }

  {
    Variable c{"c", kappa(1)};
    Term tc = Term::var(c);
    Prop a = base_case(tc), b = step_case(tc);
    Prop stmt = Prop::forall(c, imp({a, b}, Prop::forall(vx, Prop::implies(nat(x), eps1(x, tc)))));
    Scheme use = apply(Scheme::term_app(Scheme::var(nat(x)), tc), {Scheme::var(a), Scheme::var(b)});
    Scheme pf = Scheme::term_lam(
        c, Scheme::lam(a, Scheme::lam(b, Scheme::term_lam(vx, Scheme::lam(nat(x), use)))));
    out.push_back({"induction", stmt, pf});
  }

  {
    // ∃c ∀x (x ε₁ c ⇔ N(x)), witnessed by the class {x | N(x)}.
    const ComprehensionSymbol& cls = th.declare_class({vx}, {}, nat(x));
    Variable c{"c", kappa(1)};
    Prop member = eps1(x, Term::var(c));
    Prop stmt = connectives::exists(c, Prop::forall(vx, connectives::iff(member, nat(x))));
    auto view = connectives::as_exists(stmt);
    Term f = cls.constant();
    Prop fm = eps1(x, f);
    Variable d{"d", kappa(0)};
    // (A ⇒ B) ⇒ (B ⇒ A) ⇒ ε₀(d), matching the conjunction encoding.
    Prop k = imp({Prop::implies(fm, nat(x)), Prop::implies(nat(x), fm)}, connectives::eps0(Term::var(d)));
    Scheme iff_pf = Scheme::term_lam(
        d, Scheme::lam(k, apply(Scheme::var(k), {Scheme::lam(fm, Scheme::var(fm)),
                                                 Scheme::lam(nat(x), Scheme::var(nat(x)))})));
    Variable kk{"k", kappa(0)};
    Prop g = Prop::forall(view->x, Prop::implies(view->body, connectives::eps0(Term::var(kk))));
    Scheme pf = Scheme::term_lam(
        kk, Scheme::lam(g, Scheme::app(Scheme::term_app(Scheme::var(g), f), Scheme::term_lam(vx, iff_pf))));
    out.push_back({"comprehension", stmt, pf});
  }
  return out;
}

// ∀x (N(x) ⇒ ∃y (N(y) ∧ y = S(x))) with its proof.
inline Fixture successor_totality() {
  using namespace ha2;
  Term x = var("x"), y = var("y"), sx = succ(x);
  Variable vx{"x", iota()}, vy{"y", iota()};
  Prop body = connectives::conj(nat(y), eq(y, sx));
  Prop ex = connectives::exists(vy, body);
  Prop stmt = Prop::forall(vx, Prop::implies(nat(x), ex));

  Variable k{"k", kappa(0)};
  Prop g = Prop::forall(vy, Prop::implies(body, connectives::eps0(Term::var(k))));
  Variable d{"d", kappa(0)};
  Prop h = imp({nat(sx), eq(sx, sx)}, connectives::eps0(Term::var(d)));
  Scheme pair = Scheme::term_lam(
      d, Scheme::lam(h, apply(Scheme::var(h), {detail::succ_step(x, "c1"), detail::refl_proof(sx, "c2")})));
  Scheme pf = Scheme::term_lam(
      vx, Scheme::lam(nat(x), Scheme::term_lam(k, Scheme::lam(g, Scheme::app(Scheme::term_app(Scheme::var(g), sx), pair)))));
  return {"successor-totality", stmt, pf};
}

// ∃y (y = 0)
inline Fixture exists_zero() {
  using namespace ha2;
  Term y = var("y");
  Variable vy{"y", iota()};
  Prop stmt = connectives::exists(vy, eq(y, zero()));
  Variable c{"c", kappa(0)};
  Prop g = Prop::forall(vy, Prop::implies(eq(y, zero()), connectives::eps0(Term::var(c))));
  Scheme pf = Scheme::term_lam(
      c, Scheme::lam(g, Scheme::app(Scheme::term_app(Scheme::var(g), zero()), detail::refl_proof(zero()))));
  return {"exists-zero", stmt, pf};
}

struct Witness {
  Term term;            // b
  Scheme certificate;   // v : [b/x]A
  Prop type;            // [b/x]A
  ReductionTrace trace;  // weak minimal reduction of (t c g)
};

// From a closed proof t of ∃x A: weak minimal normalization of (t c g) with
// g = ⟨∀x (A ⇒ ε₀(c))⟩ must give (g a u); the witness is a with c replaced by
// the class e of ∃x A, and u becomes closed by substituting the closed proof
// w of ∀x (A ⇒ ∃x A) for the hypothesis.
inline Witness extract_witness(HA2Theory& th, const Scheme& t, const Prop& ex_a,
                               std::size_t max_steps = kDefaultMaxSteps,
                               const TypingOptions& opts = {}) {
  auto view = connectives::as_exists(ex_a);
  if (!view) throw PreconditionError("not an encoded existential: " + print(ex_a));
  if (!free_vars(ex_a).empty()) throw PreconditionError("existential must be closed: " + print(ex_a));
  if (!check(th.theory(), Context{}, t, ex_a, opts))
    throw PreconditionError("scheme does not prove " + print(ex_a));
  const Variable& x = view->x;
  const Prop& a = view->body;

  std::set<std::string> avoid;
  collect_names(t, avoid);
  collect_names(ex_a, avoid);
  Variable c{fresh_name("k", avoid), connectives::class0()};
  Prop hyp = Prop::forall(x, Prop::implies(a, connectives::eps0(Term::var(c))));
  Scheme g = Scheme::var(hyp);
  Context gamma{hyp};
  Scheme start = Scheme::app(Scheme::term_app(t, Term::var(c)), g);

  ReductionTrace trace = reduce(SchemeInContext::assume_typed(gamma, start), Strategy::kWeakMinimal,
                                max_steps, std::numeric_limits<std::size_t>::max());
  if (!trace.terminated)
    throw WitnessError("no weak minimal normal form within " + std::to_string(max_steps) + " steps");
  const Scheme& nf = trace.last();
  if (!(nf.is_app() && nf.fn().is_term_app() && alpha_eq(nf.fn().fn(), g)))
    throw WitnessError("normal form is not of the shape (g a u): " + print(nf));
  Term a_term = nf.fn().term_arg();
  Scheme u = nf.arg();

  const ComprehensionSymbol& e_sym = th.declare_class({}, {}, ex_a);
  Term e = e_sym.constant();

  std::set<std::string> avoid_w;
  collect_names(a, avoid_w);
  avoid_w.insert(x.name);
  Variable c2{fresh_name("c", avoid_w), connectives::class0()};
  Prop hyp2 = Prop::forall(x, Prop::implies(a, connectives::eps0(Term::var(c2))));
  Scheme w = Scheme::term_lam(
      x, Scheme::lam(a, Scheme::term_lam(
                            c2, Scheme::lam(hyp2, Scheme::app(Scheme::term_app(Scheme::var(hyp2), Term::var(x)),
                                                               Scheme::var(a))))));

  Term b = subst_in_term(TermSubstitution{{c, e}}, a_term);
  Scheme u_e = subst_terms(c, e, u);
  Prop key = subst_in_prop(c, e, hyp);
  Scheme v = subst_one(SchemeSubstitution{{key, w}}, Context{}, u_e, SubstMode::kMinimal);
  Prop type = subst_in_prop(x, b, a);
  if (!check(th.theory(), Context{}, v, type, opts))
    throw WitnessError("internal: extracted certificate does not check at " + print(type));
  return Witness{b, v, type, std::move(trace)};
}

}  // namespace schemec
