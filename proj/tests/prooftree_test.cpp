#include "s4c/fixtures.hpp"
#include "s4c/prooftree.hpp"
#include "s4c/random.hpp"
#include "s4c/suite.hpp"

#include <gtest/gtest.h>

using namespace s4c;

namespace {

std::vector<suite::golden_certificate> golden() { return suite::load_golden(S4C_CERT_DIR); }

proof cert_named(const std::string& name, std::size_t agents, std::vector<formula>* sigma = nullptr)
{
    for (const auto& g : golden())
        if (g.name == name) {
            if (sigma)
                *sigma = suite::parse_sigma(g, agents);
            return read_certificate(g.text, agents);
        }
    throw std::runtime_error("no certificate " + name);
}

} // namespace

TEST(Proof, GoldenCertificatesCheck)
{
    const auto all = golden();
    ASSERT_GE(all.size(), 8u);
    for (const auto& g : all) {
        const auto cert = read_certificate(g.text, 2);
        const auto sigma = suite::parse_sigma(g, 2);
        const auto res = check(cert, sigma, 2);
        EXPECT_TRUE(accepted(res)) << g.name;
    }
}

TEST(Proof, Conclusions)
{
    EXPECT_EQ(cert_named("common_reflexive", 2)->conclusion, parse("C p0 -> p0", 2));
    EXPECT_EQ(cert_named("induction", 2)->conclusion, parse("p0 -> C p0", 2));
    EXPECT_EQ(cert_named("nested_boxes", 2)->conclusion, parse("box0 box1 p0", 2));
}

TEST(Proof, AssumptionsMustBePremises)
{
    std::vector<formula> sigma;
    const auto cert = cert_named("induction", 2, &sigma);
    auto res = check(cert, {}, 2);
    ASSERT_FALSE(accepted(res));
    const auto& rej = std::get<check_rejection>(res);
    EXPECT_EQ(to_string(rej.path), "/0/1");
    EXPECT_EQ(rej.at, rule::assumption);
    auto ok = std::get<check_outcome>(check(cert, sigma, 2));
    ASSERT_EQ(ok.assumptions_used.size(), 1u);
    EXPECT_EQ(ok.assumptions_used[0], parse("p0 -> E p0", 2));
}

TEST(Proof, AxiomMatching)
{
    EXPECT_EQ(match_axiom(parse("box0 (p0 -> p1) -> box0 p0 -> box0 p1", 2), 2), schema::ii);
    EXPECT_EQ(match_axiom(parse("box1 p0 -> box1 box1 p0", 2), 2), schema::iii);
    EXPECT_EQ(match_axiom(parse("box1 p0 -> p0", 2), 2), schema::iv);
    EXPECT_EQ(match_axiom(parse("C (p0 -> p1) -> C p0 -> C p1", 2), 2), schema::v);
    EXPECT_EQ(match_axiom(parse("C p0 -> E p0 & E C p0", 2), 2), schema::vi);
    EXPECT_EQ(match_axiom(parse("E p0 & C (p0 -> E p0) -> C p0", 2), 2), schema::viii);
    EXPECT_EQ(match_axiom(parse("p0 | ~p0", 2), 2), schema::i);
    EXPECT_FALSE(match_axiom(parse("p0 -> C p0", 2), 2).has_value());
    // E depends on the agent count.
    EXPECT_FALSE(is_instance(schema::vi, parse("C p0 -> box0 p0 & box0 C p0", 2), 2));
    EXPECT_TRUE(is_instance(schema::vi, parse("C p0 -> box0 p0 & box0 C p0", 1), 1));
}

TEST(Proof, TautologyCapRefuses)
{
    std::string s = "p0";
    for (int k = 1; k <= 17; ++k)
        s += " | p" + std::to_string(k);
    s += " | ~p0";
    EXPECT_THROW(is_tautology(parse(s, 1)), tautology_refused);
    const auto cert = proof_node::make_axiom(schema::i, parse(s, 1));
    EXPECT_FALSE(accepted(check(cert, {}, 1)));
}

TEST(Proof, LassoPositionsAndUnrolling)
{
    EXPECT_EQ(lasso_position(0, 3, 1), 0u);
    EXPECT_EQ(lasso_position(2, 3, 1), 2u);
    EXPECT_EQ(lasso_position(3, 3, 1), 1u);
    EXPECT_EQ(lasso_position(4, 3, 1), 2u);
    EXPECT_EQ(lasso_position(7, 3, 0), 1u);
    const auto cert = cert_named("two_period", 2);
    for (std::size_t m = 0; m < 4; ++m) {
        const auto u = unroll(cert, m);
        EXPECT_EQ(u->children.size(), cert->children.size() + m);
        EXPECT_EQ(u->loop_index, cert->loop_index + m);
        EXPECT_TRUE(accepted(check(u, {}, 2)));
        for (std::size_t j = 0; j < 10; ++j)
            EXPECT_EQ(unfold_depth(u, j), unfold_depth(cert, j));
    }
}

TEST(Proof, OmegaShapeErrors)
{
    const auto cert = cert_named("omega_top", 2);
    auto bad_loop = std::make_shared<proof_node>(*cert);
    bad_loop->loop_index = 5;
    EXPECT_FALSE(accepted(check(bad_loop, {}, 2)));
    auto bad_psi = std::make_shared<proof_node>(*cert);
    bad_psi->psi = parse("p0", 2);
    EXPECT_FALSE(accepted(check(bad_psi, {}, 2)));
    // Premises written for two agents do not fit three.
    EXPECT_FALSE(accepted(check(cert, {}, 3)));
}

TEST(Proof, AssembleGlobal)
{
    const std::vector<formula> sigma{parse("p1", 2), parse("p0", 2)};
    const auto big = big_conj(sigma);
    // C(p0 & p1) -> p0 & p1 from (vi), (iv) and tautologies.
    const formula target = formula::imp(formula::common(big), big);
    const auto vi = proof_node::make_axiom(schema::vi, parse("C (p0 & p1) -> E (p0 & p1) & E C (p0 & p1)", 2));
    const auto iv = proof_node::make_axiom(schema::iv, parse("box0 (p0 & p1) -> p0 & p1", 2));
    const auto taut = proof_node::make_axiom(
        schema::i, formula::imp(vi->conclusion, formula::imp(iv->conclusion, target)));
    const auto step = proof_node::make_mp(taut, vi, formula::imp(iv->conclusion, target));
    const auto implication = proof_node::make_mp(step, iv, target);
    ASSERT_TRUE(accepted(check(implication, {}, 2)));
    const auto global = assemble_global(sigma, implication);
    const auto res = check(global, sigma, 2);
    ASSERT_TRUE(accepted(res));
    EXPECT_EQ(global->conclusion, big);
    EXPECT_THROW(assemble_global({}, implication), std::invalid_argument);
}

TEST(Proof, CertificateTextRoundTrip)
{
    for (const auto& g : golden())
        for (std::size_t agents = 2; agents <= 3; ++agents) {
            proof cert;
            try {
                cert = read_certificate(g.text, agents);
            } catch (const certificate_error&) {
                continue;
            }
            const auto again = read_certificate(certificate_text(cert, agents), agents);
            EXPECT_EQ(certificate_text(again, agents), certificate_text(cert, agents)) << g.name;
            EXPECT_EQ(node_count(again), node_count(cert));
        }
    EXPECT_THROW(read_certificate("(ax ix \"p0\")", 2), certificate_error);
    EXPECT_THROW(read_certificate("(mp (asm \"p0\") \"p0\")", 2), certificate_error);
    EXPECT_THROW(read_certificate("(asm \"p0 ->\")", 2), certificate_error);
    EXPECT_THROW(read_certificate("(asm \"p0\") trailing", 2), certificate_error);
}

TEST(Proof, SoundnessSweepFindsUnsoundCheckerAndLocus)
{
    const auto algs = [] {
        std::vector<finite_algebra> out;
        for (const auto& e : gen::algebra_corpus(3, 40))
            if (e.algebra.agent_count() == 2)
                out.push_back(e.algebra);
        return out;
    }();
    ASSERT_FALSE(algs.empty());
    // A checker that accepts anything lets p0 -> C p0 through by nec over an
    // unchecked premise; the sweep must catch it and point at the bad leaf.
    const auto bogus = proof_node::make_mp(proof_node::make_axiom(schema::iv, parse("p0 -> C p0", 2)),
                                           proof_node::make_axiom(schema::i, parse("top", 2)),
                                           parse("p0 -> C p0", 2));
    proof_checker_fn lax = [](const proof& c, const std::vector<formula>&, std::size_t) -> check_result {
        return check_outcome{c->conclusion, {}};
    };
    const auto rep = soundness_sweep(bogus, {}, algs, 2, lax);
    EXPECT_TRUE(rep.accepted);
    ASSERT_FALSE(rep.violations.empty());
    EXPECT_EQ(rep.violations.front().locus_rule, "ax");
    const auto honest = soundness_sweep(bogus, {}, algs, 2);
    EXPECT_FALSE(honest.accepted);
    for (const auto& g : golden()) {
        const auto r = soundness_sweep(read_certificate(g.text, 2), suite::parse_sigma(g, 2), algs, 2);
        EXPECT_TRUE(r.ok()) << g.name;
    }
}

TEST(Proof, EveryMutantIsRejected)
{
    for (const auto& g : golden()) {
        const auto cert = read_certificate(g.text, 2);
        const auto sigma = suite::parse_sigma(g, 2);
        const auto ms = suite::mutants(cert);
        EXPECT_GE(ms.size(), 3 * node_count(cert));
        for (const auto& m : ms)
            EXPECT_FALSE(accepted(check(m, sigma, 2))) << g.name;
    }
}
