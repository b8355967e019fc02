#include "s4c/decide.hpp"
#include "s4c/frames.hpp"
#include "s4c/random.hpp"

#include <gtest/gtest.h>

using namespace s4c;

namespace {

// Whether some frame algebra and some valuation of the formula's variables
// refutes f at some world.
bool refuted_on_small_frames(const formula& f, const std::vector<finite_algebra>& algebras)
{
    const auto vs = variables(f);
    const std::vector<var_index> vars(vs.begin(), vs.end());
    const compiled_formula code(f, vars);
    for (const auto& alg : algebras) {
        std::vector<element> vals(std::max<std::size_t>(vars.size(), 1), 0);
        for (;;) {
            if (code.run(alg, vals.data()) != alg.top())
                return true;
            std::size_t k = 0;
            while (k < vars.size() && vals[k] == alg.top())
                vals[k++] = 0;
            if (k >= vars.size())
                break;
            ++vals[k];
        }
    }
    return false;
}

std::vector<finite_algebra> small_frame_algebras(std::size_t max_worlds, std::size_t agents)
{
    std::vector<finite_algebra> out;
    for (std::size_t n = 1; n <= max_worlds; ++n)
        for (const auto& fr : frames_up_to_iso(n, agents))
            out.push_back(frame_algebra(fr));
    return out;
}

void expect_certified(const decision& d, const formula& f)
{
    ASSERT_FALSE(d.valid());
    ASSERT_TRUE(d.countermodel.has_value());
    EXPECT_TRUE(validate_model(*d.countermodel).ok());
    EXPECT_FALSE(satisfies(*d.countermodel, d.world, f));
    EXPECT_EQ(d.countermodel->world_name(d.world), "w0");
}

} // namespace

TEST(Decide, NamedFormulas)
{
    for (const char* s : {"C p0 -> p0", "C p0 -> C C p0", "C p0 -> E p0", "C p0 -> E C p0",
                          "E p0 & C (p0 -> E p0) -> C p0", "box0 p0 -> box0 box0 p0", "top", "C top"})
        EXPECT_TRUE(decide_valid(parse(s, 2), 2).valid()) << s;
    for (const char* s : {"p0 -> C p0", "E p0 -> C p0", "box0 p0 -> box1 p0", "p0", "bot", "E p0 -> E E p0",
                          "~C p0 -> C ~C p0"}) {
        const auto f = parse(s, 2);
        expect_certified(decide_valid(f, 2), f);
    }
}

TEST(Decide, ConsequenceExamples)
{
    const auto p = parse("p0", 2);
    EXPECT_TRUE(derives_l({p}, p, 2).valid());
    EXPECT_FALSE(derives_l({p}, parse("C p0", 2), 2).valid());
    EXPECT_TRUE(derives_l({parse("C p0", 2)}, parse("box0 p0", 2), 2).valid());
    EXPECT_TRUE(derives_g({p}, parse("C p0", 2), 2).valid());
    EXPECT_TRUE(derives_mixed({parse("p0 -> box0 p0", 2), parse("p0 -> box1 p0", 2)}, {p}, parse("C p0", 2), 2)
                    .valid());
    EXPECT_FALSE(derives_mixed({parse("p0 -> box0 p0", 2)}, {p}, parse("C p0", 2), 2).valid());
    EXPECT_EQ(local_query({}, p), p);
    EXPECT_EQ(global_query({}, p), p);
}

TEST(Decide, AgreesWithExhaustiveEngineAndSmallFrames)
{
    const auto frames = small_frame_algebras(3, 2);
    gen::rng r(101);
    std::size_t valid = 0, invalid = 0;
    for (int k = 0; k < 250; ++k) {
        const auto f = gen::random_formula(r, {3, 2, 2, true});
        decide_config cfg;
        cfg.max_closure = 14;
        if (closure(neg(f), 2).size() > cfg.max_closure)
            continue;
        const auto d = decide_valid(f, 2);
        const auto e = decide_exhaustive(f, 2, cfg);
        EXPECT_EQ(d.result, e.result) << render(f);
        if (d.valid()) {
            ++valid;
            EXPECT_FALSE(refuted_on_small_frames(f, frames)) << render(f);
        } else {
            ++invalid;
            expect_certified(d, f);
            expect_certified(e, f);
        }
    }
    EXPECT_GT(valid, 10u);
    EXPECT_GT(invalid, 10u);
}

TEST(Decide, SmallFrameRefutationImpliesInvalid)
{
    const auto frames = small_frame_algebras(2, 2);
    gen::rng r(55);
    for (int k = 0; k < 300; ++k) {
        const auto f = gen::random_formula(r, {3, 2, 2, false});
        if (refuted_on_small_frames(f, frames))
            EXPECT_FALSE(decide_valid(f, 2).valid()) << render(f);
    }
}

TEST(Decide, ResourceCapsAndBadInput)
{
    const auto f = parse("C (p0 -> E p0) -> p0 -> C p0", 2);
    decide_config tiny;
    tiny.max_closure = 3;
    EXPECT_THROW(decide_valid(f, 2, tiny), resource_cap_exceeded);
    decide_config few;
    few.max_sets = 1;
    EXPECT_THROW(decide_valid(parse("p0 -> C p0", 2), 2, few), resource_cap_exceeded);
    EXPECT_THROW(decide_valid(parse("box1 p0", 2), 1), std::invalid_argument);
    EXPECT_THROW(decide_valid(parse("p0", 2), 0), std::invalid_argument);
}

TEST(Decide, HintikkaSetsAreCoherent)
{
    const auto f = parse("p0 -> C p0", 2);
    const auto sets = hintikka_sets(f, 2);
    ASSERT_FALSE(sets.empty());
    for (const auto& h : sets)
        EXPECT_TRUE((h.positives & h.negatives).none());
}

TEST(Decide, SingleAgentAndThreeAgents)
{
    EXPECT_TRUE(decide_valid(parse("C p0 <-> box0 p0", 1), 1).valid());
    EXPECT_FALSE(decide_valid(parse("C p0 <-> box0 p0", 2), 2).valid());
    const auto f = parse("E p0 -> box2 p0", 3);
    EXPECT_TRUE(decide_valid(f, 3).valid());
    const auto g = parse("box0 box1 p0 -> box2 p0", 3);
    expect_certified(decide_valid(g, 3), g);
}
