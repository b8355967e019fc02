#pragma once

// Canonical small structures used by examples, tests and the CLI.

#include "s4c/algebra.hpp"
#include "s4c/kripke.hpp"
#include "s4c/stone.hpp"

#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>

namespace s4c::fixtures {

// Two-element algebra, two agents, every operator the identity.
inline finite_algebra a1()
{
    finite_algebra::table id{0, 1};
    return finite_algebra({"alpha"}, {id, id}, id);
}

// Atoms alpha, beta; box0 opens {0, alpha, 1}; box1 opens {0, beta, 1};
// C opens {0, 1}.
inline finite_algebra a2()
{
    const element alpha = 1, beta = 2, one = 3;
    return finite_algebra({"alpha", "beta"},
                          {finite_algebra::table_from_opens(2, {0, alpha, one}),
                           finite_algebra::table_from_opens(2, {0, beta, one})},
                          finite_algebra::table_from_opens(2, {0, one}));
}

// Worlds w0, w1; R0 = {(w0,w0), (w1,w1), (w0,w1)}; R1 = identity;
// p0 true at w0 only.
inline kripke_model m1()
{
    relation r0 = relation::identity(2);
    r0.add(0, 1);
    world_set p0(2);
    p0.set(0);
    return kripke_model({"w0", "w1"}, {r0, relation::identity(2)}, {{0, p0}});
}

// Spaces whose powerset algebras are A1 and A2.
inline finite_top_space a1_space()
{
    return finite_top_space({"alpha"}, {topology::indiscrete(1), topology::indiscrete(1)});
}

inline finite_top_space a2_space()
{
    return finite_top_space({"alpha", "beta"},
                            {topology::from_opens(2, {0, 1, 3}), topology::from_opens(2, {0, 2, 3})});
}

using structure = std::variant<finite_algebra, kripke_model, finite_top_space>;

inline const std::vector<std::string>& names()
{
    static const std::vector<std::string> all{"a1", "a2", "m1", "a1-space", "a2-space"};
    return all;
}

inline structure load(const std::string& name)
{
    if (name == "a1")
        return a1();
    if (name == "a2")
        return a2();
    if (name == "m1")
        return m1();
    if (name == "a1-space")
        return a1_space();
    if (name == "a2-space")
        return a2_space();
    throw std::invalid_argument("unknown fixture '" + name + "'");
}

// Text in the corresponding file format.
inline std::string text_of(const std::string& name)
{
    std::ostringstream out;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, finite_algebra>)
                write_algebra(out, s);
            else if constexpr (std::is_same_v<T, kripke_model>)
                write_model(out, s);
            else
                write_space(out, s);
        },
        load(name));
    return out.str();
}

} // namespace s4c::fixtures
