#include <gtest/gtest.h>

#include "properties.hpp"

using namespace schemec;

namespace {

const HA2Theory& ha2_th() {
  static const HA2Theory t = HA2Theory::make();
  return t;
}

}  // namespace

TEST(Property, SubjectReductionPropositional) {
  props::Outcome o = props::subject_reduction_propositional(1000, 11);
  EXPECT_GE(o.instances, 1000u);
  EXPECT_TRUE(o.ok()) << o.failures << " failures, first: " << o.first_failure;
}

TEST(Property, SubjectReductionHA2) {
  props::Outcome o = props::subject_reduction_ha2(1000, 12);
  EXPECT_GE(o.instances, 1000u);
  EXPECT_TRUE(o.ok()) << o.failures << " failures, first: " << o.first_failure;
}

TEST(Property, MinimalSubstitutionLaws) {
  props::MinimalLaws m = props::minimal_substitution_laws(1000, 13);
  for (const props::Outcome* o : {&m.well_typed, &m.in_context, &m.extra_hypothesis}) {
    EXPECT_GE(o->instances, 1000u);
    EXPECT_TRUE(o->ok()) << o->first_failure;
  }
}

TEST(Property, ModesContainedInGeneralAndGeneralMatchesOracle) {
  oracle::PropositionalGen gen(14);
  for (int i = 0; i < 500; ++i) {
    Context g = gen.context(2);
    Prop a = gen.type(1);
    SchemeSubstitution sigma{{a, gen.raw(2)}};
    Scheme t = gen.raw(3);
    auto general = subst_scheme(sigma, g, t, SubstMode::kGeneral);
    ASSERT_TRUE(oracle::member(subst_one(sigma, g, t, SubstMode::kMinimal), general)) << print(t);
    ASSERT_TRUE(oracle::member(subst_one(sigma, g, t, SubstMode::kMaximal), general)) << print(t);
    ASSERT_TRUE(oracle::same_set(general, oracle::substitute(sigma, g, t, SubstMode::kGeneral))) << print(t);
    ASSERT_TRUE(alpha_eq(subst_one(sigma, g, t, SubstMode::kMinimal),
                         oracle::substitute(sigma, g, t, SubstMode::kMinimal).front()));
    ASSERT_TRUE(alpha_eq(subst_one(sigma, g, t, SubstMode::kMaximal),
                         oracle::substitute(sigma, g, t, SubstMode::kMaximal).front()));
  }
}

TEST(Property, HA2SubstitutionMatchesOracle) {
  const HA2Theory& th = ha2_th();
  oracle::HA2Gen gen(th, 15);
  for (int i = 0; i < 300; ++i) {
    auto [g, t] = gen.typed_instance(4);
    Prop a = gen.small();
    SchemeSubstitution sigma{{a, Scheme::var(gen.small())}};
    for (SubstMode m : {SubstMode::kMinimal, SubstMode::kMaximal}) {
      Scheme got = subst_one(sigma, g, t, m);
      ASSERT_TRUE(alpha_eq(got, oracle::substitute(sigma, g, t, m).front())) << print(t);
    }
  }
}

TEST(Property, SubstitutionPreservesType) {
  oracle::PropositionalGen gen(16);
  const Theory th = Theory::propositional();
  std::size_t checked = 0;
  for (int i = 0; checked < 1000 && i < 20000; ++i) {
    Context g = gen.context(2);
    Prop a = gen.type(2), b = gen.type(2);
    auto t = gen.typed(g.with(a), b, 4);
    auto u = t ? gen.typed(g, a, 3) : std::nullopt;
    if (!u) continue;
    for (const Scheme& s : subst_scheme(SchemeSubstitution{{a, *u}}, g, *t, SubstMode::kGeneral)) {
      ASSERT_TRUE(check(th, g, s, b)) << print(g) << " |- " << print(*t) << " with " << print(*u) << " gives "
                                      << print(s);
      ++checked;
    }
  }
  EXPECT_GE(checked, 1000u);
}

TEST(Property, DerivationReplays) {
  oracle::PropositionalGen pgen(17);
  const Theory pth = Theory::propositional();
  for (int i = 0; i < 300; ++i) {
    auto [g, t] = pgen.typed_instance(6);
    std::string why;
    ASSERT_TRUE(oracle::replay(pth, infer_derivation(pth, g, t), &why)) << print(t) << ": " << why;
  }
  const HA2Theory& th = ha2_th();
  oracle::HA2Gen hgen(th, 18);
  for (int i = 0; i < 300; ++i) {
    auto [g, t] = hgen.typed_instance(6);
    std::string why;
    ASSERT_TRUE(oracle::replay(th.theory(), infer_derivation(th.theory(), g, t), &why)) << print(t) << ": " << why;
  }
}

TEST(Property, WeakMinimalIsFunctionalAndReproducible) {
  const HA2Theory& th = ha2_th();
  oracle::HA2Gen gen(th, 19);
  for (int i = 0; i < 200; ++i) {
    auto [g, t] = gen.typed_instance(6);
    SchemeInContext s = SchemeInContext::make(th.theory(), g, t);
    ReductionTrace a = reduce(s, Strategy::kWeakMinimal, 1000);
    ReductionTrace b = reduce(s, Strategy::kWeakMinimal, 1000);
    ASSERT_EQ(a.steps.size(), b.steps.size());
    for (std::size_t k = 0; k < a.steps.size(); ++k) {
      EXPECT_EQ(a.steps[k].path, b.steps[k].path);
      EXPECT_EQ(print(a.steps[k].scheme), print(b.steps[k].scheme));
    }
    auto direct = oracle::weak_minimal_normal_form(g, t, 1000);
    ASSERT_TRUE(direct);
    EXPECT_TRUE(alpha_eq(*direct, a.last())) << print(t);
  }
}

TEST(Property, AlphaEquivalenceIsAnEquivalence) {
  oracle::HA2PropGen gen(20);
  std::vector<Prop> pool;
  for (int i = 0; i < 60; ++i) pool.push_back(gen.prop(2));
  const Signature& sig = ha2_th().signature();
  for (const Prop& p : pool) {
    EXPECT_TRUE(alpha_eq(p, p));
    Prop q = parse_prop(sig, print(p));
    EXPECT_TRUE(alpha_eq(p, q));
  }
  for (const Prop& a : pool)
    for (const Prop& b : pool) {
      ASSERT_EQ(alpha_eq(a, b), alpha_eq(b, a));
      ASSERT_EQ(alpha_eq(a, b), alpha_key(a) == alpha_key(b));
      if (!alpha_eq(a, b)) continue;
      for (const Prop& c : pool)
        if (alpha_eq(b, c)) {
          ASSERT_TRUE(alpha_eq(a, c));
        }
    }
}

TEST(Property, SubstitutionNeverCaptures) {
  oracle::HA2PropGen gen(21);
  Variable p{"p", ha2::iota()};
  for (int i = 0; i < 1000; ++i) {
    Prop body = gen.prop(3);
    Term image = gen.term(2, {Variable{"x", ha2::iota()}, Variable{"y", ha2::iota()}});
    Prop r = subst_in_prop(p, image, body);
    if (!occurs_free(p, body)) {
      EXPECT_TRUE(alpha_eq(r, body));
      continue;
    }
    for (const Variable& v : free_vars(image)) ASSERT_TRUE(occurs_free(v, r)) << print(body) << " / " << print(image);
  }
}

TEST(Property, ContextInsertionIdempotent) {
  oracle::HA2PropGen gen(22);
  for (int i = 0; i < 300; ++i) {
    Prop a = gen.prop(3);
    Prop variant = parse_prop(ha2_th().signature(), print(a));
    Context g{gen.prop(2)};
    Context once = g.with(a);
    Context twice = once.with(variant);
    EXPECT_EQ(once.keys(), twice.keys());
    EXPECT_EQ(once.size(), twice.size());
  }
}

TEST(Property, PrintParseRoundTrip) {
  const Signature& sig = ha2_th().signature();
  oracle::HA2PropGen pg(23);
  for (int i = 0; i < 500; ++i) {
    Prop p = pg.prop(4);
    ASSERT_TRUE(alpha_eq(parse_prop(sig, print(p)), p)) << print(p);
  }
  const HA2Theory& th = ha2_th();
  oracle::HA2Gen sg(th, 24);
  for (int i = 0; i < 300; ++i) {
    auto [g, t] = sg.typed_instance(6);
    ASSERT_TRUE(alpha_eq(parse_scheme(sig, print(t)), t)) << print(t);
    ASSERT_EQ(parse_context(sig, print(g)).keys(), g.keys());
  }
  oracle::PropositionalGen rg(25);
  const Theory pth = Theory::propositional();
  const Signature& psig = pth.signature();
  for (int i = 0; i < 500; ++i) {
    Scheme t = rg.raw(5);
    ASSERT_TRUE(alpha_eq(parse_scheme(psig, print(t)), t)) << print(t);
  }
}

TEST(Property, ConvertibleReflexiveAndSymmetric) {
  const Theory& th = ha2_th().theory();
  oracle::HA2PropGen gen(26);
  std::size_t decided = 0, total = 0;
  for (int i = 0; i < 400; ++i) {
    Prop a = gen.prop(2), b = gen.prop(2);
    EXPECT_TRUE(convertible(th, a, a));
    ++total;
    try {
      bool ab = convertible(th, a, b);
      bool ba = convertible(th, b, a);
      ASSERT_EQ(ab, ba) << print(a) << " vs " << print(b);
      ++decided;
    } catch (const FuelExhausted&) {
    }
  }
  EXPECT_GE(decided * 10, total * 9);
}

TEST(Property, CongruenceClosure) {
  const Theory& th = ha2_th().theory();
  std::vector<std::pair<Prop, Prop>> pairs{
      {ha2::nat(ha2::zero()), whnf_prop(th, ha2::nat(ha2::zero()))},
      {ha2::null(ha2::succ(ha2::zero())), connectives::bot()},
      {ha2::null(ha2::zero()), connectives::top()},
      {ha2::eq(ha2::zero(), ha2::zero()), whnf_prop(th, ha2::eq(ha2::zero(), ha2::zero()))},
      {ha2::nat(ha2::pred(ha2::succ(ha2::zero()))), ha2::nat(ha2::zero())},
  };
  for (const auto& [a, b] : pairs) {
    ASSERT_TRUE(convertible(th, a, b)) << print(a);
    for (const auto& [c, d] : pairs) {
      EXPECT_TRUE(convertible(th, Prop::implies(a, c), Prop::implies(b, d)));
      Variable x{"x", ha2::iota()};
      EXPECT_TRUE(convertible(th, Prop::forall(x, Prop::implies(a, c)), Prop::forall(x, Prop::implies(b, d))));
    }
  }
}

TEST(Property, RuleInstancesConvertible) {
  const Theory& th = ha2_th().theory();
  oracle::HA2PropGen gen(27);
  for (const PropRule& r : th.prop_rules()) {
    for (int i = 0; i < 20; ++i) {
      TermSubstitution theta;
      for (const Variable& v : free_vars(r.lhs))
        theta.emplace(v, v.sort == ha2::iota() ? gen.term(2, {}) : Term::var("k", v.sort));
      Prop lhs = subst_in_prop(theta, r.lhs), rhs = subst_in_prop(theta, r.rhs);
      ASSERT_TRUE(convertible(th, lhs, rhs)) << print(lhs) << " vs " << print(rhs);
    }
  }
}

TEST(Property, ImplicationNeverConvertibleToQuantifier) {
  Theory th = parse_theory(
      "sort iota\n"
      "pred P : (iota)\npred Q : (iota)\npred R : (iota)\n"
      "rule P(?x:iota) ~> forall y:iota. R(y)\n"
      "rule Q(?x:iota) ~> R(?x:iota) => R(?x:iota)\n");
  const Signature& sig = th.signature();
  for (const char* a : {"P(z:iota)", "Q(z:iota)", "R(z:iota)"})
    for (const char* b : {"P(z:iota)", "Q(z:iota)", "R(z:iota)"})
      for (const char* c : {"P(y)", "Q(y)", "R(y)"}) {
        Prop imp = parse_prop(sig, std::string(a) + " => " + b);
        Prop all = parse_prop(sig, std::string("forall y:iota. ") + c);
        EXPECT_FALSE(convertible(th, imp, all)) << print(imp) << " vs " << print(all);
      }
}
