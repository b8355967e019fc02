#include "s4c/fixtures.hpp"
#include "s4c/kripke.hpp"
#include "s4c/prooftree.hpp"
#include "s4c/random.hpp"

#include <gtest/gtest.h>

#include <functional>

using namespace s4c;

namespace {

// Pointwise evaluator: C holds at w iff the body holds at every world
// reachable from w in zero or more steps of any agent's relation.
bool naive(const kripke_model& m, world_id w, const formula& f)
{
    switch (f.kind()) {
    case op::var: {
        auto it = m.valuation().find(f.variable());
        return it != m.valuation().end() && it->second.test(w);
    }
    case op::bot:
        return false;
    case op::imp:
        return !naive(m, w, f.lhs()) || naive(m, w, f.rhs());
    case op::box:
        for (world_id v = 0; v < m.world_count(); ++v)
            if (m.agent_relation(f.agent()).contains(w, v) && !naive(m, v, f.body()))
                return false;
        return true;
    case op::common: {
        std::vector<bool> seen(m.world_count(), false);
        std::vector<world_id> stack{w};
        seen[w] = true;
        while (!stack.empty()) {
            const world_id u = stack.back();
            stack.pop_back();
            if (!naive(m, u, f.body()))
                return false;
            for (agent_id i = 0; i < m.agent_count(); ++i)
                for (world_id v = 0; v < m.world_count(); ++v)
                    if (m.agent_relation(i).contains(u, v) && !seen[v]) {
                        seen[v] = true;
                        stack.push_back(v);
                    }
        }
        return true;
    }
    }
    return false;
}

} // namespace

TEST(Kripke, FixtureM1)
{
    const auto m = fixtures::m1();
    EXPECT_TRUE(validate_model(m).ok());
    EXPECT_TRUE(satisfies(m, 0, parse("p0", 2)));
    EXPECT_FALSE(satisfies(m, 0, parse("box0 p0", 2)));
    EXPECT_TRUE(satisfies(m, 0, parse("box1 p0", 2)));
    EXPECT_FALSE(satisfies(m, 0, parse("C p0", 2)));
    EXPECT_FALSE(satisfies(m, 0, parse("p0 -> C p0", 2)));
    EXPECT_TRUE(s4c::globally_true(m, parse("C p0 -> p0", 2)));
}

TEST(Kripke, SIsTransitiveClosureOfUnion)
{
    const auto m = fixtures::m1();
    EXPECT_TRUE(m.s_relation().contains(0, 1));
    EXPECT_FALSE(m.s_relation().contains(1, 0));
    EXPECT_EQ(m.s_relation(), m.derive_s());
}

TEST(Kripke, ValidationCatchesBrokenFrames)
{
    relation r(2);
    r.add(0, 0);
    auto bad = validate_model(kripke_model({"a", "b"}, {r}, {}));
    ASSERT_FALSE(bad.ok());
    EXPECT_EQ(bad.issues.front().what, model_issue::kind::not_reflexive);
    relation t = relation::identity(3);
    t.add(0, 1);
    t.add(1, 2);
    kripke_model m({"a", "b", "c"}, {t}, {});
    auto rep = validate_model(m);
    ASSERT_FALSE(rep.ok());
    EXPECT_EQ(rep.issues.front().what, model_issue::kind::not_transitive);
}

TEST(Kripke, EvaluatorAgreesWithPointwiseSemantics)
{
    gen::rng r(11);
    for (int k = 0; k < 60; ++k) {
        const std::size_t worlds = 1 + k % 5, agents = 1 + k % 3;
        const auto m = gen::random_model(r, worlds, agents, 2);
        ASSERT_TRUE(validate_model(m).ok());
        for (int j = 0; j < 20; ++j) {
            const auto f = gen::random_formula(r, {3, 2, agents, true});
            const auto truth = truth_set(m, f);
            const auto gfp = satisfies_gfp(m, f);
            for (world_id w = 0; w < worlds; ++w) {
                EXPECT_EQ(truth.test(w), naive(m, w, f));
                EXPECT_EQ(gfp.test(w), truth.test(w));
            }
        }
    }
}

TEST(Kripke, FileRoundTrip)
{
    gen::rng r(5);
    for (int k = 0; k < 20; ++k) {
        const auto m = gen::random_model(r, 1 + k % 4, 2, 2);
        const auto back = read_model(to_text(m));
        EXPECT_EQ(to_text(back), to_text(m));
        EXPECT_EQ(back.s_relation(), m.s_relation());
    }
    EXPECT_THROW(read_model("agents 1\nworlds a\nrel 0: (a,b)\n"), model_error);
}

TEST(Kripke, RefuteConsequence)
{
    const auto m = fixtures::m1();
    const auto p = parse("p0", 2);
    auto ce = refute_consequence({m}, {}, {p}, parse("C p0", 2));
    ASSERT_TRUE(ce.has_value());
    EXPECT_EQ(ce->world, 0u);
    // Global premise p0 fails at w1, so it rules the model out.
    EXPECT_FALSE(refute_consequence({m}, {p}, {}, parse("C p0", 2)).has_value());
}

TEST(Kripke, RestrictKeepsFrameConditions)
{
    gen::rng r(9);
    for (int k = 0; k < 20; ++k) {
        const auto m = gen::random_model(r, 4, 2, 1);
        world_set keep(4);
        keep.set(0);
        keep.set(2);
        auto [sub, map] = m.restrict_to(keep);
        EXPECT_EQ(sub.world_count(), 2u);
        EXPECT_TRUE(validate_model(sub).ok());
        EXPECT_TRUE(map[0].has_value());
        EXPECT_FALSE(map[1].has_value());
    }
}

TEST(Kripke, AxiomInstancesHoldEverywhere)
{
    gen::rng r(13);
    for (int k = 0; k < 40; ++k) {
        const std::size_t agents = 1 + k % 3;
        const auto m = gen::random_model(r, 1 + k % 5, agents, 2);
        for (int j = 0; j < 10; ++j) {
            const gen::formula_shape shape{2, 2, agents, true};
            const auto a = gen::random_formula(r, shape), b = gen::random_formula(r, shape),
                       c = gen::random_formula(r, shape);
            for (schema s : all_schemas()) {
                const auto f = instantiate(s, a, b, c, static_cast<agent_id>(j % agents), agents, j);
                EXPECT_TRUE(globally_true(m, f)) << render(f);
            }
        }
    }
}
