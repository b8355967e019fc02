#include "s4c/fixtures.hpp"
#include "s4c/frames.hpp"
#include "s4c/random.hpp"
#include "s4c/stone.hpp"
#include "s4c/ultrafilter.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace s4c;

namespace {

bool is_topology(std::size_t n, const std::set<point_set>& opens)
{
    const point_set full = static_cast<point_set>((1u << n) - 1);
    if (!opens.count(0) || !opens.count(full))
        return false;
    for (point_set a : opens)
        for (point_set b : opens)
            if (!opens.count(a & b) || !opens.count(a | b))
                return false;
    return true;
}

} // namespace

TEST(Stone, GeneratedTopologyIsTheSmallestContainingGenerators)
{
    gen::rng r(2);
    for (int k = 0; k < 200; ++k) {
        const std::size_t n = 1 + k % 4;
        const point_set full = static_cast<point_set>((1u << n) - 1);
        std::vector<point_set> gens;
        for (int j = 0; j < k % 4; ++j)
            gens.push_back(static_cast<point_set>(std::uniform_int_distribution<unsigned>(0, full)(r)));
        const auto t = topology::generated_by(n, gens);
        const std::set<point_set> opens(t.opens().begin(), t.opens().end());
        EXPECT_TRUE(is_topology(n, opens));
        for (point_set g : gens)
            EXPECT_TRUE(opens.count(g));
        // Every topology containing the generators contains t: check against
        // all topologies on n points by brute force for n <= 3.
        if (n <= 3) {
            const std::size_t family_count = std::size_t{1} << (1u << n);
            for (std::size_t fam = 0; fam < family_count; ++fam) {
                std::set<point_set> cand;
                for (point_set s = 0; s <= full; ++s)
                    if ((fam >> s) & 1u)
                        cand.insert(s);
                if (!is_topology(n, cand))
                    continue;
                bool has_gens = true;
                for (point_set g : gens)
                    has_gens = has_gens && cand.count(g);
                if (!has_gens)
                    continue;
                for (point_set o : opens)
                    EXPECT_TRUE(cand.count(o));
            }
        }
    }
}

TEST(Stone, FromOpensRejectsNonTopologies)
{
    EXPECT_THROW(topology::from_opens(2, {0, 1, 2}), topology_error); // missing the full set
    EXPECT_THROW(topology::from_opens(3, {0, 1, 2, 7}), topology_error); // 1 | 2 missing
    EXPECT_NO_THROW(topology::from_opens(2, {0, 1, 3}));
}

TEST(Stone, KuratowskiRoundTrip)
{
    const auto t = topology::from_opens(3, {0, 1, 3, 7});
    std::vector<point_set> box(8);
    for (point_set y = 0; y < 8; ++y)
        box[y] = t.interior(y);
    const auto res = kuratowski_roundtrip(3, box);
    ASSERT_TRUE(res.recovered.has_value());
    EXPECT_EQ(*res.recovered, t);
    EXPECT_TRUE(res.issues.empty());
    // Closure-like operator: inflationary, so not an interior operator.
    std::vector<point_set> grow(8);
    for (point_set y = 0; y < 8; ++y)
        grow[y] = y == 0 ? 0 : 7;
    const auto bad = kuratowski_roundtrip(3, grow);
    EXPECT_FALSE(bad.recovered.has_value());
    EXPECT_FALSE(bad.issues.empty());
}

TEST(Stone, FixtureSpacesGiveFixtureAlgebras)
{
    EXPECT_EQ(powerset_algebra(fixtures::a1_space()), fixtures::a1());
    EXPECT_EQ(powerset_algebra(fixtures::a2_space()), fixtures::a2());
}

TEST(Stone, CommonIsInteriorOfMeetTopology)
{
    for (const auto& e : gen::algebra_corpus(8, 50)) {
        const auto& sp = e.space;
        for (point_set y = 0; y < e.algebra.size(); ++y) {
            // Largest set open in every agent topology below y.
            point_set best = 0;
            for (point_set o = 0; o < e.algebra.size(); ++o) {
                bool open_everywhere = (o & ~y) == 0;
                for (const auto& t : sp.topologies())
                    open_everywhere = open_everywhere && t.is_open(o);
                if (open_everywhere)
                    best |= o;
            }
            EXPECT_EQ(e.algebra.common(y), best);
        }
    }
}

TEST(Stone, AlexandrovSpaceMatchesKripkeAlgebra)
{
    gen::rng r(4);
    for (int k = 0; k < 40; ++k) {
        const auto m = gen::random_model(r, 1 + k % 5, 1 + k % 3, 1);
        const auto a = powerset_algebra(alexandrov_space(m));
        const auto b = kripke_algebra(m);
        EXPECT_EQ(a.common_table(), b.common_table());
        for (agent_id i = 0; i < m.agent_count(); ++i)
            EXPECT_EQ(a.box_table(i), b.box_table(i));
    }
}

TEST(Stone, UltrafiltersAndHat)
{
    const auto a = fixtures::a2();
    const auto ults = ultrafilters(a);
    ASSERT_EQ(ults.size(), a.atom_count());
    for (std::size_t k = 0; k < ults.size(); ++k)
        for (element x = 0; x < a.size(); ++x)
            EXPECT_EQ(ults[k].contains(x), ((x >> ults[k].atom_index()) & 1u) != 0);
    std::set<ultrafilter_set> images;
    for (element x = 0; x < a.size(); ++x) {
        images.insert(hat(ults, x));
        for (element y = 0; y < a.size(); ++y) {
            EXPECT_EQ(hat(ults, x & y), hat(ults, x) & hat(ults, y));
            EXPECT_EQ(hat(ults, x | y), hat(ults, x) | hat(ults, y));
        }
    }
    EXPECT_EQ(images.size(), a.size());
}

TEST(Stone, RepresentationAndCompletionOnCorpus)
{
    for (const auto& e : gen::algebra_corpus(12, 60)) {
        const auto rep = verify_representation(e.algebra);
        EXPECT_TRUE(rep.ok()) << e.name << ": " << (rep.failures.empty() ? "" : rep.failures.front().check);
        EXPECT_GT(rep.checks, 0u);
        EXPECT_TRUE(completion_embed(e.algebra).ok()) << e.name;
        // Topologies recovered from the algebra give back the algebra.
        const auto rec = algebra_to_topologies(e.algebra);
        ASSERT_TRUE(rec.ok());
        EXPECT_EQ(powerset_algebra(rec.space(e.algebra)), e.algebra);
    }
}

TEST(Stone, RepresentationDetectsBrokenCommon)
{
    // C replaced by box0 on A2: hat(C alpha) is no longer the meet interior.
    const auto a2 = fixtures::a2();
    const auto broken = a2.with_common(a2.box_table(0));
    EXPECT_FALSE(verify_representation(broken).ok());
    EXPECT_FALSE(completion_embed(broken).ok());
}

TEST(Stone, SpaceFileRoundTrip)
{
    gen::rng r(6);
    for (int k = 0; k < 30; ++k) {
        const auto s = gen::random_space(r);
        std::ostringstream out;
        write_space(out, s);
        const auto back = read_space(out.str());
        EXPECT_EQ(back.topologies(), s.topologies());
        EXPECT_EQ(back.point_names(), s.point_names());
    }
    EXPECT_THROW(read_space("agents 1\npoints x\nopen 0: y\n"), std::exception);
}
