#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace schemec;
using namespace schemec::ha2;

namespace {

Prop P(const HA2Theory& th, const std::string& s) { return parse_prop(th.signature(), s); }

Scheme apply_terms(Scheme s, std::initializer_list<Term> ts) {
  for (const Term& t : ts) s = Scheme::term_app(s, t);
  return s;
}

}  // namespace

TEST(Theory, SignatureAndRules) {
  HA2Theory th = HA2Theory::make();
  const Signature& sig = th.signature();
  for (const char* s : {"iota", "kappa0", "kappa1", "kappa2"}) EXPECT_TRUE(sig.has_sort(Sort{s})) << s;
  EXPECT_FALSE(sig.has_sort(Sort{"kappa3"}));
  for (const char* f : {"zero", "S", "Pred"}) EXPECT_TRUE(sig.function(f)) << f;
  for (const char* p : {"eq", "N", "Null", "eps0", "eps1", "eps2"}) EXPECT_TRUE(sig.predicate(p)) << p;
  EXPECT_EQ(th.theory().prop_rules().size(), 4u);
  EXPECT_EQ(th.theory().term_rules().size(), 2u);
  for (const PropRule& r : th.theory().prop_rules()) EXPECT_TRUE(r.lhs.is_atom());
}

TEST(Theory, ArityParameter) {
  HA2Theory th = HA2Theory::make(4);
  EXPECT_TRUE(th.signature().has_sort(Sort{"kappa4"}));
  EXPECT_EQ(th.max_class_arity(), 4u);
}

TEST(Theory, FromParsedFile) {
  HA2Theory th = HA2Theory::make();
  th.declare_class({Variable{"z", iota()}}, {Variable{"x", iota()}}, eq(var("x"), pred(var("z"))));
  HA2Theory back = HA2Theory::from_theory(parse_theory(print_theory(th.theory())));
  ASSERT_EQ(back.classes().size(), 1u);
  EXPECT_EQ(back.classes()[0].xs.size(), 1u);
  EXPECT_EQ(back.classes()[0].ys.size(), 1u);
  EXPECT_TRUE(alpha_eq(Prop::forall(back.classes()[0].xs[0], Prop::forall(back.classes()[0].ys[0], back.classes()[0].body)),
                       P(th, "forall z:iota. forall x:iota. x = Pred(z)")));
  EXPECT_THROW(HA2Theory::from_theory(Theory::propositional()), TheoryError);
}

TEST(Comprehension, UnaryClassUnfolds) {
  HA2Theory th = HA2Theory::make();
  Variable x{"x", iota()};
  const ComprehensionSymbol& f = th.declare_class({x}, {}, nat(Term::var(x)));
  auto r = head_unfold(th.theory(), eps1(zero(), f.constant()));
  ASSERT_TRUE(r);
  EXPECT_TRUE(alpha_eq(*r, nat(zero())));
}

TEST(Comprehension, NullaryClassOfExistential) {
  HA2Theory th = HA2Theory::make();
  Prop ex = connectives::exists(Variable{"x", iota()}, nat(var("x")));
  const ComprehensionSymbol& e = th.declare_class({}, {}, ex);
  auto r = head_unfold(th.theory(), eps({}, e.constant()));
  ASSERT_TRUE(r);
  EXPECT_TRUE(alpha_eq(*r, ex));
}

TEST(Comprehension, RejectsNestedSymbols) {
  HA2Theory th = HA2Theory::make();
  const ComprehensionSymbol& f = th.declare_class({Variable{"x", iota()}}, {}, nat(var("x")));
  EXPECT_THROW(th.declare_class({Variable{"y", iota()}}, {}, eps1(var("y"), f.constant())), TheoryError);
}

TEST(Comprehension, RejectsStrayVariable) {
  HA2Theory th = HA2Theory::make();
  EXPECT_THROW(th.declare_class({Variable{"x", iota()}}, {}, eq(var("x"), var("w"))), TheoryError);
}

TEST(Comprehension, RejectsArityAboveMaximum) {
  HA2Theory th = HA2Theory::make(1);
  std::vector<Variable> xs{{"a", iota()}, {"b", iota()}};
  EXPECT_THROW(th.declare_class(xs, {}, eq(var("a"), var("b"))), TheoryError);
}

TEST(Comprehension, RedeclarationReturnsSameSymbol) {
  HA2Theory th = HA2Theory::make();
  std::string a = th.declare_class({Variable{"x", iota()}}, {}, nat(var("x"))).name;
  std::string b = th.declare_class({Variable{"y", iota()}}, {}, nat(var("y"))).name;
  EXPECT_EQ(a, b);
  EXPECT_EQ(th.classes().size(), 1u);
}

TEST(Connectives, Expansions) {
  HA2Theory th = HA2Theory::make();
  Prop a = nat(zero()), b = null(zero());
  EXPECT_TRUE(alpha_eq(connectives::bot(), P(th, "forall c:kappa0. eps0(c)")));
  EXPECT_TRUE(alpha_eq(connectives::conj(a, b),
                       P(th, "forall c:kappa0. (N(zero) => Null(zero) => eps0(c)) => eps0(c)")));
  EXPECT_TRUE(alpha_eq(connectives::neg(a), P(th, "N(zero) => forall c:kappa0. eps0(c)")));
  EXPECT_TRUE(alpha_eq(connectives::top(), P(th, "forall c:kappa0. eps0(c) => eps0(c)")));
  EXPECT_TRUE(alpha_eq(connectives::disj(a, b),
                       P(th, "forall c:kappa0. (N(zero) => eps0(c)) => (Null(zero) => eps0(c)) => eps0(c)")));
}

TEST(Connectives, FreshClassAvoidsArgument) {
  Prop a = eps({}, Term::var("_c", kappa(0)));
  Prop c = connectives::conj(a, a);
  ASSERT_TRUE(c.is_forall());
  EXPECT_NE(c.bound_name(), "_c");
  EXPECT_TRUE(occurs_free(Variable{"_c", kappa(0)}, c));
}

TEST(Connectives, ExistsView) {
  Variable y{"y", iota()};
  Prop ex = connectives::exists(y, eq(var("y"), zero()));
  auto v = connectives::as_exists(ex);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->x, y);
  EXPECT_TRUE(alpha_eq(v->body, eq(var("y"), zero())));
  EXPECT_FALSE(connectives::as_exists(nat(zero())));
}

TEST(Numerals, Terms) {
  EXPECT_EQ(print(numeral_term(3)), "S(S(S(zero)))");
  EXPECT_EQ(print(numeral_term(0)), "zero");
}

TEST(Numerals, ZeroIsLiteral) {
  HA2Theory th = HA2Theory::make();
  Scheme r0 = numeral_proof(0);
  Scheme expected = parse_scheme(
      th.signature(),
      "/\\c:kappa1. \\[eps1(zero, c)] \\[forall y:iota. N(y) => eps1(y, c) => eps1(S(y), c)] <eps1(zero, c)>");
  EXPECT_TRUE(alpha_eq(r0, expected));
}

TEST(Numerals, SuccessorShape) {
  HA2Theory th = HA2Theory::make();
  Scheme r1 = numeral_proof(1);
  Scheme r0 = numeral_proof(0);
  ASSERT_TRUE(r1.is_term_lam());
  Term c = Term::var(r1.bound());
  Prop a = base_case(c), b = step_case(c);
  Scheme inner = apply(Scheme::term_app(r0, c), {Scheme::var(a), Scheme::var(b)});
  Scheme body = apply(Scheme::term_app(Scheme::var(b), zero()), {r0, inner});
  EXPECT_TRUE(alpha_eq(r1, Scheme::term_lam(r1.bound(), Scheme::lam(a, Scheme::lam(b, body)))));
}

TEST(Numerals, TypeCheckUpToTwenty) {
  HA2Theory th = HA2Theory::make();
  for (std::size_t n = 0; n <= 20; ++n)
    EXPECT_TRUE(check(th.theory(), Context{}, numeral_proof(n), nat(numeral_term(n)))) << n;
}

TEST(Numerals, Decode) {
  HA2Theory th = HA2Theory::make();
  EXPECT_EQ(decode_numeral(th.theory(), pred(succ(succ(zero())))), 1u);
  EXPECT_EQ(decode_numeral(th.theory(), zero()), 0u);
  EXPECT_THROW(decode_numeral(th.theory(), var("x")), PreconditionError);
}

TEST(Fixtures, AllCheck) {
  HA2Theory th = HA2Theory::make();
  auto fs = axiom_fixtures(th);
  EXPECT_GE(fs.size(), 6u);
  for (const Fixture& f : fs) EXPECT_TRUE(check(th.theory(), Context{}, f.proof, f.statement)) << f.name;
  Fixture st = successor_totality();
  EXPECT_TRUE(check(th.theory(), Context{}, st.proof, st.statement));
  Fixture ez = exists_zero();
  EXPECT_TRUE(check(th.theory(), Context{}, ez.proof, ez.statement));
}

TEST(Fixtures, RequiredStatements) {
  HA2Theory th = HA2Theory::make();
  auto fs = axiom_fixtures(th);
  auto has = [&](const std::string& s) {
    Prop want = P(th, s);
    for (const Fixture& f : fs)
      if (alpha_eq(f.statement, want)) return true;
    return false;
  };
  EXPECT_TRUE(has("forall x:iota. x = x"));
  EXPECT_TRUE(has("N(zero)"));
  EXPECT_TRUE(has("forall x:iota. N(x) => N(S(x))"));
  EXPECT_TRUE(has("forall x:iota. ~(zero = S(x))"));
  EXPECT_TRUE(has("forall x:iota. forall y:iota. forall c:kappa1. x = y => eps1(x, c) => eps1(y, c)"));
  EXPECT_TRUE(has("forall c:kappa1. eps1(zero, c) => (forall y:iota. N(y) => eps1(y, c) => eps1(S(y), c)) => "
                  "forall x:iota. N(x) => eps1(x, c)"));
}

TEST(Fixtures, ReflexivityNeedsConversion) {
  HA2Theory th = HA2Theory::make();
  auto fs = axiom_fixtures(th);
  TypingOptions off;
  off.conversion = false;
  const Fixture& refl = fs.front();
  ASSERT_EQ(refl.name, "reflexivity");
  bool ok = false;
  try {
    ok = check(th.theory(), Context{}, refl.proof, refl.statement, off);
  } catch (const TypingError&) {
  }
  EXPECT_FALSE(ok);
}

TEST(Witness, ExistsZero) {
  HA2Theory th = HA2Theory::make();
  Fixture ez = exists_zero();
  Witness w = extract_witness(th, ez.proof, ez.statement);
  EXPECT_EQ(print(w.term), "zero");
  EXPECT_TRUE(alpha_eq(w.type, eq(zero(), zero())));
  EXPECT_TRUE(check(th.theory(), Context{}, w.certificate, w.type));
}

TEST(Witness, MatchesIndependentEvaluator) {
  HA2Theory th = HA2Theory::make();
  Fixture st = successor_totality();
  Scheme t = Scheme::app(Scheme::term_app(st.proof, numeral_term(2)), numeral_proof(2));
  Prop ex = subst_in_prop(Variable{"x", iota()}, numeral_term(2), st.statement.body().conclusion());
  Witness w = extract_witness(th, t, ex);
  EXPECT_EQ(decode_numeral(th.theory(), w.term), 3u);
  // Replay the weak reduction with the spine evaluator.
  Scheme start = w.trace.start.scheme();
  auto nf = oracle::weak_minimal_normal_form(w.trace.start.context(), start, 100000);
  ASSERT_TRUE(nf);
  EXPECT_TRUE(alpha_eq(*nf, w.trace.last()));
}

TEST(Witness, SuccessorTotalityOnNumerals) {
  HA2Theory th = HA2Theory::make();
  Fixture st = successor_totality();
  for (std::size_t p = 0; p <= 5; ++p) {
    Scheme t = Scheme::app(Scheme::term_app(st.proof, numeral_term(p)), numeral_proof(p));
    Prop ex = subst_in_prop(Variable{"x", iota()}, numeral_term(p), st.statement.body().conclusion());
    Witness w = extract_witness(th, t, ex);
    EXPECT_TRUE(alpha_eq(Prop::atom("N", {w.term}), nat(numeral_term(p + 1)))) << p;
    EXPECT_EQ(decode_numeral(th.theory(), w.term), p + 1);
    EXPECT_TRUE(check(th.theory(), Context{}, w.certificate, w.type));
  }
}

TEST(Witness, RejectsNonExistential) {
  HA2Theory th = HA2Theory::make();
  EXPECT_THROW(extract_witness(th, numeral_proof(0), nat(zero())), PreconditionError);
}

TEST(Witness, RejectsWrongProof) {
  HA2Theory th = HA2Theory::make();
  Fixture ez = exists_zero();
  Prop other = connectives::exists(Variable{"y", iota()}, nat(var("y")));
  EXPECT_THROW(extract_witness(th, ez.proof, other), PreconditionError);
}

TEST(Witness, BudgetExhaustion) {
  HA2Theory th = HA2Theory::make();
  Fixture st = successor_totality();
  Scheme t = Scheme::app(Scheme::term_app(st.proof, numeral_term(1)), numeral_proof(1));
  Prop ex = subst_in_prop(Variable{"x", iota()}, numeral_term(1), st.statement.body().conclusion());
  EXPECT_THROW(extract_witness(th, t, ex, 1), WitnessError);
}

TEST(Witness, NonCanonicalProofThroughRedexes) {
  // ∃y (y = 0) proved through a detour: ((λ_{0=0} proof) refl).
  HA2Theory th = HA2Theory::make();
  Fixture ez = exists_zero();
  Prop h = eq(zero(), zero());
  Scheme detour = Scheme::app(Scheme::lam(h, ez.proof), detail::refl_proof(zero()));
  Scheme t = apply_terms(Scheme::term_lam(Variable{"q", iota()}, detour), {succ(zero())});
  Witness w = extract_witness(th, t, ez.statement);
  EXPECT_EQ(print(w.term), "zero");
  EXPECT_GE(w.trace.steps.size(), 4u);
}
