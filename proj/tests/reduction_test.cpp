#include <gtest/gtest.h>

#include "cases.hpp"
#include "oracles.hpp"

using namespace schemec;
using cases::Ap;
using cases::L;
using cases::T;
using cases::V;

namespace {

const Theory& th() { return cases::propositional(); }

SchemeInContext in(Context g, Scheme s) { return SchemeInContext::make(th(), std::move(g), std::move(s)); }

Scheme step(const SchemeInContext& t, Strategy s) {
  auto r = strategy_step(t, s);
  if (!r) throw std::runtime_error("normal");
  return r->result.scheme();
}

// Closed normal schemes of type A = (B ⇒ B) ⇒ B ⇒ B.
const char* kA = "(B => B) => B => B";
Scheme first() { return L("B => B", V("B => B")); }
Scheme second() { return L("B => B", L("B", Ap(V("B => B"), V("B")))); }

}  // namespace

TEST(Subst, KeepOrReplaceInContext) {
  SchemeSubstitution s{{T("A"), V("B")}};
  auto r = subst_scheme(s, Context{T("A")}, V("A"), SubstMode::kGeneral);
  EXPECT_TRUE(oracle::same_set(r, {V("A"), V("B")}));
}

TEST(Subst, ForcedOutsideContext) {
  SchemeSubstitution s{{T("A"), V("B")}};
  auto r = subst_scheme(s, Context{}, V("A"), SubstMode::kGeneral);
  EXPECT_TRUE(oracle::same_set(r, {V("B")}));
}

TEST(Subst, BinderExtendsContext) {
  SchemeSubstitution s{{T("A"), V("B")}};
  auto r = subst_scheme(s, Context{}, L("A", V("A")), SubstMode::kGeneral);
  EXPECT_TRUE(oracle::same_set(r, {L("A", V("A")), L("A", V("B"))}));
  EXPECT_TRUE(oracle::same_set(r, oracle::substitute(s, Context{}, L("A", V("A")), SubstMode::kGeneral)));
}

TEST(Subst, MinimalAndMaximal) {
  SchemeSubstitution s{{T("A"), V("B")}};
  Scheme t = Ap(L("A", V("A")), V("A"));
  EXPECT_TRUE(alpha_eq(subst_one(s, Context{}, t, SubstMode::kMinimal), Ap(L("A", V("A")), V("B"))));
  EXPECT_TRUE(alpha_eq(subst_one(s, Context{}, t, SubstMode::kMaximal), Ap(L("A", V("B")), V("B"))));
  EXPECT_THROW(subst_one(s, Context{}, t, SubstMode::kGeneral), PreconditionError);
}

TEST(Subst, TermBinderRenamedAwayFromImage) {
  HA2Theory h = HA2Theory::make();
  const Signature& sig = h.signature();
  Prop key = parse_prop(sig, "N(zero)");
  Scheme image = parse_scheme(sig, "(<forall y:iota. N(y)> @ x:iota)");
  Scheme t = parse_scheme(sig, "/\\x:iota. <N(zero)>");
  Scheme r = subst_one(SchemeSubstitution{{key, image}}, Context{}, t, SubstMode::kMinimal);
  ASSERT_TRUE(r.is_term_lam());
  EXPECT_NE(r.bound().name, "x");
  EXPECT_TRUE(alpha_eq(r.body(), image));
}

TEST(Subst, ImageBinderRenamedAwayFromHypotheses) {
  HA2Theory h = HA2Theory::make();
  const Signature& sig = h.signature();
  Scheme u = parse_scheme(sig, "/\\x:iota. \\[N(x)] <N(x)>");
  Prop a = infer(h.theory(), Context{}, u);
  Scheme t = Scheme::lam(parse_prop(sig, "N(x:iota)"), Scheme::var(a));
  Scheme r = subst_one(SchemeSubstitution{{a, u}}, Context{}, t, SubstMode::kMinimal);
  ASSERT_TRUE(r.body().is_term_lam());
  EXPECT_NE(r.body().bound().name, "x");
  EXPECT_TRUE(alpha_eq(r.body(), u));
  EXPECT_TRUE(check(h.theory(), Context{}, r, parse_prop(sig, "N(x:iota) => forall z:iota. N(z) => N(z)")));
}

TEST(Reducts, BothBranchesOfProjection) {
  Scheme s = Ap(Ap(L(kA, L(kA, V(kA))), first()), second());
  auto rs = one_step_reducts(in(Context{}, s));
  ASSERT_EQ(rs.size(), 2u);
  EXPECT_TRUE(oracle::member(Ap(L(kA, first()), second()), {rs[0].scheme, rs[1].scheme}));
  EXPECT_TRUE(oracle::member(Ap(L(kA, V(kA)), second()), {rs[0].scheme, rs[1].scheme}));
  EXPECT_EQ(print_path(rs[0].path), "0");
}

TEST(Reducts, LoopingSchemeReachesItself) {
  cases::Looping c;
  auto rs = one_step_reducts(in(c.context, c.scheme));
  bool found = false;
  for (const Reduct& r : rs) found |= alpha_eq(r.scheme, c.scheme);
  EXPECT_TRUE(found);
}

TEST(Reducts, NormalHasNone) {
  EXPECT_TRUE(one_step_reducts(in(Context{}, L("A", V("A")))).empty());
}

TEST(Reducts, PathsUnderBinders) {
  Scheme s = L("A", Ap(L("A", V("A")), V("A")));
  auto rs = one_step_reducts(in(Context{}, s));
  ASSERT_FALSE(rs.empty());
  EXPECT_EQ(print_path(rs[0].path), "0");
}

TEST(Strategy, ProjectionUnderEachStrategy) {
  Context g{T("B => A"), T("B")};
  Scheme t = Ap(V("B => A"), V("B"));
  Scheme outer = Ap(L("A", L("A", V("A"))), t);
  Scheme inner = L("A", Ap(L("A", V("A")), t));
  SchemeInContext o = in(g, outer), i = in(g, inner);
  EXPECT_TRUE(alpha_eq(step(o, Strategy::kMinimal), L("A", V("A"))));
  EXPECT_TRUE(alpha_eq(step(o, Strategy::kMaximal), L("A", t)));
  EXPECT_TRUE(alpha_eq(step(i, Strategy::kClosestBinder), L("A", t)));
  EXPECT_TRUE(alpha_eq(step(i, Strategy::kFurthestBinder), L("A", V("A"))));
}

TEST(Strategy, Names) {
  for (const char* n : {"min", "max", "closest", "furthest", "weak-min"}) {
    auto s = parse_strategy(n);
    ASSERT_TRUE(s);
    EXPECT_STREQ(strategy_name(*s), n);
  }
  EXPECT_FALSE(parse_strategy("lazy"));
}

TEST(Strategy, WeakMinimalStopsAtAbstraction) {
  Scheme s = L("A", Ap(L("A", V("A")), V("A")));
  EXPECT_FALSE(strategy_step(in(Context{}, s), Strategy::kWeakMinimal));
}

TEST(Strategy, WeakMinimalStopsAtNormalHead) {
  Context g{T("A => A"), T("A")};
  Scheme s = Ap(V("A => A"), Ap(L("A", V("A")), V("A")));
  EXPECT_FALSE(strategy_step(in(g, s), Strategy::kWeakMinimal));
  EXPECT_TRUE(strategy_step(in(g, s), Strategy::kMinimal));
}

TEST(Strategy, WeakMinimalDescendsFunctionPosition) {
  Context g{T("A")};
  Scheme s = Ap(Ap(L("A", L("A", V("A"))), V("A")), V("A"));
  auto r = strategy_step(in(g, s), Strategy::kWeakMinimal);
  ASSERT_TRUE(r);
  EXPECT_EQ(print_path(r->path), "0");
}

TEST(Reduce, NumeralZeroAppliedWeakly) {
  HA2Theory h = HA2Theory::make();
  Term c = Term::var("c", ha2::kappa(1));
  Prop a = ha2::base_case(c), b = ha2::step_case(c);
  Scheme s = apply(Scheme::term_app(numeral_proof(0), c), {Scheme::var(a), Scheme::var(b)});
  SchemeInContext t = SchemeInContext::make(h.theory(), Context{a, b}, s);
  ReductionTrace tr = reduce(t, Strategy::kWeakMinimal);
  EXPECT_TRUE(tr.terminated);
  EXPECT_TRUE(alpha_eq(tr.last(), Scheme::var(a)));
  EXPECT_EQ(tr.steps.size(), 3u);
}

TEST(Reduce, LoopingUnderMaximalExhaustsBudget) {
  cases::Looping c;
  ReductionTrace tr = reduce(in(c.context, c.scheme), Strategy::kMaximal, 10);
  EXPECT_FALSE(tr.terminated);
  EXPECT_EQ(tr.stop, ReductionTrace::Stop::kStepBudget);
  EXPECT_EQ(tr.steps.size(), 10u);
}

TEST(Reduce, NormalGivesEmptyTrace) {
  ReductionTrace tr = reduce(in(Context{}, L("A", V("A"))), Strategy::kMinimal);
  EXPECT_TRUE(tr.terminated);
  EXPECT_TRUE(tr.steps.empty());
}

TEST(Reduce, SizeBound) {
  cases::Growing c;
  ReductionTrace tr = reduce(in(c.context, c.v(0)), Strategy::kMaximal, 1000, 200);
  EXPECT_FALSE(tr.terminated);
  EXPECT_EQ(tr.stop, ReductionTrace::Stop::kSizeBound);
  EXPECT_GT(tr.last().size(), 200u);
}

TEST(Cycle, LoopingHasLengthOne) {
  cases::Looping c;
  auto cy = detect_cycle(in(c.context, c.scheme), Strategy::kMaximal, 10);
  ASSERT_TRUE(cy);
  EXPECT_EQ(cy->length, 1u);
  EXPECT_EQ(cy->first_index, 0u);
}

TEST(Cycle, NoneForNormal) {
  for (Strategy s : {Strategy::kMinimal, Strategy::kMaximal, Strategy::kClosestBinder,
                     Strategy::kFurthestBinder, Strategy::kWeakMinimal})
    EXPECT_FALSE(detect_cycle(in(Context{}, L("A", V("A"))), s, 10));
}

TEST(Cycle, GrowingFamilyHasNoExactCycle) {
  cases::Growing c;
  EXPECT_FALSE(detect_cycle(in(c.context, c.v(0)), Strategy::kMaximal, 50, 100000));
  EXPECT_TRUE(subscheme_contains(c.grow(0), c.v(1)));
}

TEST(Subscheme, Basics) {
  Scheme t = Ap(L("A", V("A")), V("B"));
  EXPECT_TRUE(subscheme_contains(t, t));
  EXPECT_TRUE(subscheme_contains(t, V("B")));
  EXPECT_FALSE(subscheme_contains(V("A"), V("B")));
}

TEST(Neutral, Forms) {
  EXPECT_TRUE(is_neutral(V("A")));
  EXPECT_FALSE(is_neutral(L("A", V("A"))));
  EXPECT_TRUE(is_neutral(Ap(V("A => A"), V("A"))));
  EXPECT_FALSE(is_neutral(Scheme::term_lam("x", ha2::iota(), V("A"))));
}

TEST(Explore, ProjectionHasBothNormalForms) {
  Scheme s = Ap(Ap(L(kA, L(kA, V(kA))), first()), second());
  Exploration e = explore_normal_forms(in(Context{}, s));
  EXPECT_TRUE(e.complete);
  EXPECT_TRUE(oracle::member(first(), e.normal_forms));
  EXPECT_TRUE(oracle::member(second(), e.normal_forms));
  EXPECT_EQ(e.normal_forms.size(), 2u);
}

TEST(NonCommutation, LiteralResults) {
  cases::NonCommuting c;
  SchemeSubstitution sigma{{T("A"), c.v}};
  auto r = one_step_reducts(in(c.context.with(T("A")), c.t));
  bool reaches_u = false;
  for (const Reduct& x : r) reaches_u |= alpha_eq(x.scheme, c.u);
  EXPECT_TRUE(reaches_u);
  Scheme ts = subst_one(sigma, c.context, c.t, SubstMode::kMinimal);
  Scheme us = subst_one(sigma, c.context, c.u, SubstMode::kMinimal);
  EXPECT_TRUE(alpha_eq(ts, c.t_sub_expected));
  Scheme ts1 = step(in(c.context, ts), Strategy::kMinimal);
  EXPECT_TRUE(alpha_eq(ts1, c.t_sub_reduct_expected));
  EXPECT_TRUE(alpha_eq(us, c.v));
  EXPECT_FALSE(alpha_eq(ts1, us));
}

TEST(NonComposition, LiteralResults) {
  cases::NonComposing c;
  EXPECT_TRUE(alpha_eq(c.twice(c.lam), c.lam_expected));
  EXPECT_TRUE(alpha_eq(c.twice(c.var), c.var_expected));
}
