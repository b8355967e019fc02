#include "s4c/random.hpp"
#include "s4c/syntax.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace s4c;

TEST(Syntax, SugarExpandsToPrimitives)
{
    const auto p = formula::var(0), q = formula::var(1);
    EXPECT_EQ(parse("~p0", 2), formula::imp(p, formula::bot()));
    EXPECT_EQ(parse("top", 2), formula::imp(formula::bot(), formula::bot()));
    EXPECT_EQ(parse("p0 & p1", 2), neg(formula::imp(p, neg(q))));
    EXPECT_EQ(parse("p0 | p1", 2), formula::imp(neg(p), q));
    EXPECT_EQ(parse("E p0", 2), conj(formula::box(0, p), formula::box(1, p)));
    EXPECT_EQ(parse("E p0", 3), conj(formula::box(0, p), conj(formula::box(1, p), formula::box(2, p))));
    EXPECT_EQ(parse("E p0", 1), formula::box(0, p));
}

TEST(Syntax, Precedence)
{
    EXPECT_EQ(parse("p0 -> p1 -> p2", 1), parse("p0 -> (p1 -> p2)", 1));
    EXPECT_EQ(parse("p0 & p1 | p2", 1), parse("(p0 & p1) | p2", 1));
    EXPECT_EQ(parse("C p0 -> p0", 1), formula::imp(formula::common(formula::var(0)), formula::var(0)));
    EXPECT_EQ(parse("~box0 p0 & p1", 1), conj(neg(formula::box(0, formula::var(0))), formula::var(1)));
}

TEST(Syntax, Errors)
{
    EXPECT_THROW(parse("box2 p0", 2), parse_error);
    EXPECT_THROW(parse("p0 ->", 2), parse_error);
    EXPECT_THROW(parse("(p0", 2), parse_error);
    EXPECT_THROW(parse("q0", 2), parse_error);
    EXPECT_THROW(parse("p0 $ p1", 2), parse_error);
    try {
        parse("p0 & box7 p1", 2);
        FAIL();
    } catch (const parse_error& e) {
        EXPECT_EQ(e.position(), 5u);
    }
}

TEST(Syntax, RenderParseRoundTrip)
{
    gen::rng r(7);
    for (std::size_t agents = 1; agents <= 3; ++agents) {
        gen::formula_shape shape{4, 3, agents, true};
        for (int k = 0; k < 300; ++k) {
            const formula f = gen::random_formula(r, shape);
            render_options pretty;
            pretty.agent_count = agents;
            render_options exact;
            exact.exact = true;
            EXPECT_EQ(parse(render(f, pretty), agents), f) << render(f, pretty);
            EXPECT_EQ(parse(render(f, exact), agents), f) << render(f, exact);
            EXPECT_EQ(parse(render_exact(f), agents), f);
        }
    }
}

TEST(Syntax, RenderUsesSugar)
{
    render_options o;
    o.agent_count = 2;
    EXPECT_EQ(render(parse("box0 p0 & box1 p0", 2), o), "E p0");
    EXPECT_EQ(render(parse("~p0 | p1", 2), o), "~p0 | p1");
}

TEST(Syntax, ClosureContents)
{
    const auto f = parse("C p0", 2);
    const auto cl = closure(f, 2);
    for (const char* s : {"C p0", "p0", "box0 C p0", "box1 C p0", "box0 p0", "box1 p0"})
        EXPECT_TRUE(cl.contains(parse(s, 2))) << s;
    EXPECT_EQ(cl.size(), 6u);
    // Every subformula is a member.
    gen::rng r(3);
    for (int k = 0; k < 100; ++k) {
        const auto g = gen::random_formula(r, {3, 2, 2, true});
        const auto c = closure(g, 2);
        for (const auto& s : subformulas(g))
            EXPECT_TRUE(c.contains(s));
    }
}

TEST(Syntax, VariablesAndAgents)
{
    const auto f = parse("box1 p3 -> C p0", 2);
    EXPECT_EQ(variables(f), (std::set<var_index>{0, 3}));
    EXPECT_EQ(max_agent(f), 1u);
    EXPECT_FALSE(max_agent(parse("C p0", 2)).has_value());
}

TEST(Syntax, ReadFormulas)
{
    std::istringstream in("# premises\np0\n\n  box0 p1  \n");
    auto fs = read_formulas(in, 2);
    ASSERT_EQ(fs.size(), 2u);
    EXPECT_EQ(fs[1], parse("box0 p1", 2));
    std::istringstream bad("p0\np0 ->\n");
    try {
        read_formulas(bad, 2);
        FAIL();
    } catch (const parse_error& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(Syntax, StructuralEqualityAndOrder)
{
    EXPECT_EQ(parse("p0 -> p1", 1), parse("(p0) -> (p1)", 1));
    EXPECT_NE(parse("p0 -> p1", 1), parse("p1 -> p0", 1));
    const auto a = parse("p0", 1), b = parse("p1", 1);
    EXPECT_TRUE((a < b) != (b < a));
}
