#include "s4c/fixtures.hpp"
#include "s4c/frames.hpp"
#include "s4c/random.hpp"
#include "s4c/wellfound.hpp"

#include <gtest/gtest.h>

#include <functional>

using namespace s4c;

namespace {

// Accessible = no infinite descending path = cannot reach a cycle through
// predecessors. Computed by strongly connected components via Floyd-Warshall.
std::vector<bool> accessible_oracle(const digraph& g)
{
    const std::size_t n = g.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b : g.preds(a))
            reach[a][b] = true; // a can descend to b
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (reach[i][k] && reach[k][j])
                    reach[i][j] = true;
    std::vector<bool> out(n, true);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = 0; c < n; ++c)
            if ((a == c || reach[a][c]) && reach[c][c])
                out[a] = false;
    return out;
}

} // namespace

TEST(Wellfound, OrdinalArithmetic)
{
    const auto inf = ordinal::infinity();
    EXPECT_EQ(inf.successor(), inf);
    EXPECT_LT(ordinal::finite(1000), inf);
    EXPECT_EQ(ordinal::finite(2).successor(), ordinal::finite(3));
    EXPECT_EQ(std::min(ordinal::finite(4), inf), ordinal::finite(4));
}

TEST(Wellfound, ChainAndCycleHeights)
{
    // 0 <- 1 <- 2 (edge b -> a means b precedes a); 3 <-> 4.
    digraph g(5);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    g.add_edge(3, 4);
    g.add_edge(4, 3);
    const auto h = heights(g);
    EXPECT_EQ(h[0], ordinal::finite(0));
    EXPECT_EQ(h[1], ordinal::finite(1));
    EXPECT_EQ(h[2], ordinal::finite(2));
    EXPECT_TRUE(h[3].is_infinite());
    EXPECT_TRUE(h[4].is_infinite());
}

TEST(Wellfound, AccessiblePartMatchesCycleOracle)
{
    gen::rng r(3);
    std::bernoulli_distribution coin(0.2);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 1 + k % 9;
        digraph g(n);
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                if (coin(r))
                    g.add_edge(a, b);
        const auto acc = accessible_part(g);
        const auto oracle = accessible_oracle(g);
        const auto h = heights(g);
        for (std::size_t a = 0; a < n; ++a) {
            EXPECT_EQ(acc.test(a), oracle[a]);
            EXPECT_EQ(h[a].is_infinite(), !oracle[a]);
            // Height is one more than the largest height of a predecessor.
            if (oracle[a]) {
                std::uint32_t want = 0;
                for (std::size_t b : g.preds(a))
                    want = std::max(want, h[b].value() + 1);
                EXPECT_EQ(h[a].value(), want);
            }
        }
    }
}

TEST(Wellfound, PrecRelationDefinition)
{
    const auto a = fixtures::a2();
    for (element d = 0; d < a.size(); ++d) {
        const auto g = build_prec(a, d);
        for (element x = 0; x < a.size(); ++x)
            for (element y = 0; y < a.size(); ++y)
                // x precedes y iff y <= E d & E x.
                EXPECT_EQ(g.graph.has_edge(x, y), a.leq(y, a.everyone(d) & a.everyone(x)));
    }
}

TEST(Wellfound, A2IsStandard)
{
    const auto rep = check_standard(fixtures::a2());
    EXPECT_TRUE(rep.standard);
    EXPECT_FALSE(rep.witness.has_value());
    for (const auto& p : rep.profiles)
        EXPECT_TRUE(p.matches);
}

TEST(Wellfound, NonStandardInputGetsPeriodicWitness)
{
    // C = 0 below the top fails induction for a1's identity boxes, so the
    // accessible part differs from { a | a not <= C d }.
    auto bad = fixtures::a1().with_common({0, 0});
    const auto rep = check_standard(bad);
    EXPECT_FALSE(rep.standard);
    ASSERT_TRUE(rep.witness.has_value());
    ASSERT_TRUE(rep.witness->sequence.has_value());
    const auto& seq = *rep.witness->sequence;
    EXPECT_FALSE(seq.cycle.empty());
    const element d = rep.witness->d;
    // Each term is a predecessor of the previous one: a_j <= E d & E a_{j+1}.
    for (std::size_t j = 0; j < seq.distinct_length() + seq.cycle.size(); ++j)
        EXPECT_TRUE(bad.leq(seq.at(j), bad.everyone(d) & bad.everyone(seq.at(j + 1))));
}

TEST(Wellfound, IdealsDecreaseInGamma)
{
    for (const auto& e : gen::algebra_corpus(5, 40)) {
        const auto& alg = e.algebra;
        for (element d = 0; d < alg.size(); ++d) {
            prec_analysis pa(alg, d);
            for (std::uint32_t g = 0; g < 6; ++g) {
                const auto lo = pa.m_ideal(ordinal::finite(g)), hi = pa.m_ideal(ordinal::finite(g + 1));
                EXPECT_TRUE(hi.is_subset_of(lo));
                EXPECT_TRUE(is_ideal(alg, lo));
            }
            EXPECT_EQ(pa.m_ideal(ordinal::finite(0)).count(), alg.size());
        }
    }
}

TEST(Wellfound, IsIdealRejectsNonIdeals)
{
    const auto a = fixtures::a2();
    element_set s(4);
    s.set(1);
    EXPECT_FALSE(is_ideal(a, s)); // missing 0
    s.set(0);
    EXPECT_TRUE(is_ideal(a, s));
    s.set(2);
    EXPECT_FALSE(is_ideal(a, s)); // not closed under join
}

TEST(Frames, PreorderCounts)
{
    // Labelled preorders on n points.
    EXPECT_EQ(preorders(1).size(), 1u);
    EXPECT_EQ(preorders(2).size(), 4u);
    EXPECT_EQ(preorders(3).size(), 29u);
    EXPECT_EQ(preorders(4).size(), 355u);
}

TEST(Frames, IsomorphismClassesOfOneRelation)
{
    // Unlabelled preorders (topologies) on n points.
    EXPECT_EQ(frames_up_to_iso(2, 1).size(), 3u);
    EXPECT_EQ(frames_up_to_iso(3, 1).size(), 9u);
    EXPECT_EQ(frames_up_to_iso(4, 1).size(), 33u);
}
