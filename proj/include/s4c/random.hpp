#pragma once

// Seeded generators for formulas, models, spaces and the algebra corpus.

#include "s4c/algebra.hpp"
#include "s4c/fixtures.hpp"
#include "s4c/kripke.hpp"
#include "s4c/stone.hpp"
#include "s4c/syntax.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace s4c::gen {

using rng = std::mt19937_64;

struct formula_shape {
    std::size_t depth = 3;
    std::size_t vars = 2;
    std::size_t agents = 2;
    // Sugar (~, &, |, E) is drawn alongside the primitives.
    bool sugar = true;
};

inline formula random_formula(rng& r, const formula_shape& s)
{
    auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(r); };
    auto leaf = [&]() {
        if (pick(8) == 0)
            return formula::bot();
        return formula::var(static_cast<var_index>(pick(s.vars)));
    };
    if (s.depth == 0)
        return leaf();
    formula_shape sub = s;
    sub.depth = s.depth - 1;
    const std::size_t kinds = s.sugar ? 9 : 5;
    switch (pick(kinds)) {
    case 0:
        return leaf();
    case 1:
        return formula::imp(random_formula(r, sub), random_formula(r, sub));
    case 2:
        return formula::box(static_cast<agent_id>(pick(s.agents)), random_formula(r, sub));
    case 3:
        return formula::common(random_formula(r, sub));
    case 4:
        return formula::imp(random_formula(r, sub), random_formula(r, sub));
    case 5:
        return neg(random_formula(r, sub));
    case 6:
        return conj(random_formula(r, sub), random_formula(r, sub));
    case 7:
        return disj(random_formula(r, sub), random_formula(r, sub));
    default:
        return everyone(random_formula(r, sub), s.agents);
    }
}

// Random preorder: random pairs, then reflexive-transitive closure.
inline relation random_preorder(rng& r, std::size_t n, double density = 0.3)
{
    std::bernoulli_distribution coin(density);
    relation rel = relation::identity(n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (a != b && coin(r))
                rel.add(a, b);
    return transitive_closure(rel);
}

inline kripke_model random_model(rng& r, std::size_t worlds, std::size_t agents, std::size_t vars)
{
    std::vector<relation> rels;
    for (std::size_t i = 0; i < agents; ++i)
        rels.push_back(random_preorder(r, worlds));
    std::bernoulli_distribution coin(0.5);
    std::map<var_index, world_set> val;
    for (var_index v = 0; v < vars; ++v) {
        world_set s(worlds);
        for (std::size_t w = 0; w < worlds; ++w)
            if (coin(r))
                s.set(w);
        val.emplace(v, s);
    }
    std::vector<std::string> names;
    for (std::size_t w = 0; w < worlds; ++w)
        names.push_back("w" + std::to_string(w));
    return kripke_model(std::move(names), std::move(rels), std::move(val));
}

// Space with 1..max_points points and 1..max_agents topologies, each
// generated by up to three random subsets.
inline finite_top_space random_space(rng& r, std::size_t max_points = 4, std::size_t max_agents = 3)
{
    auto between = [&](std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(r);
    };
    const std::size_t n = between(1, max_points);
    const std::size_t agents = between(1, max_agents);
    const point_set full = static_cast<point_set>((1u << n) - 1);
    std::vector<topology> tops;
    for (std::size_t i = 0; i < agents; ++i) {
        std::vector<point_set> gens;
        const std::size_t k = between(0, 3);
        for (std::size_t j = 0; j < k; ++j)
            gens.push_back(static_cast<point_set>(between(0, full)));
        tops.push_back(topology::generated_by(n, gens));
    }
    std::vector<std::string> names;
    for (std::size_t k = 0; k < n; ++k)
        names.push_back("x" + std::to_string(k));
    return finite_top_space(std::move(names), std::move(tops));
}

struct corpus_entry {
    std::string name;
    finite_top_space space;
    finite_algebra algebra;
};

// A1, A2 and the powerset algebras of `count` random spaces.
inline std::vector<corpus_entry> algebra_corpus(std::uint64_t seed, std::size_t count = 200,
                                                std::size_t max_points = 4, std::size_t max_agents = 3)
{
    std::vector<corpus_entry> out;
    out.push_back({"a1", fixtures::a1_space(), fixtures::a1()});
    out.push_back({"a2", fixtures::a2_space(), fixtures::a2()});
    rng r(seed);
    for (std::size_t k = 0; k < count; ++k) {
        auto s = random_space(r, max_points, max_agents);
        auto a = powerset_algebra(s);
        out.push_back({"space" + std::to_string(k), std::move(s), std::move(a)});
    }
    return out;
}

} // namespace s4c::gen
