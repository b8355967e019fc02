#pragma once

// Exhaustive enumeration of small Kripke frames (up to isomorphism) and a
// flat evaluator for formulas over their powerset algebras.

#include "s4c/algebra.hpp"
#include "s4c/kripke.hpp"
#include "s4c/syntax.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace s4c {

// Relations on at most 4 worlds as n*n bit matrices, bit a*n+b for (a,b).
using small_relation = std::uint16_t;

struct small_frame {
    std::size_t worlds = 0;
    std::vector<small_relation> relations;
};

namespace detail {

inline bool rel_has(small_relation r, std::size_t n, std::size_t a, std::size_t b) { return (r >> (a * n + b)) & 1u; }

inline small_relation permute(small_relation r, std::size_t n, const std::vector<std::size_t>& p)
{
    small_relation out = 0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (rel_has(r, n, a, b))
                out |= static_cast<small_relation>(1u << (p[a] * n + p[b]));
    return out;
}

} // namespace detail

// All reflexive transitive relations on n <= 4 worlds.
inline std::vector<small_relation> preorders(std::size_t n)
{
    if (n == 0 || n > 4)
        throw std::invalid_argument("preorders are enumerated for 1..4 worlds");
    std::vector<small_relation> out;
    small_relation diag = 0;
    for (std::size_t a = 0; a < n; ++a)
        diag |= static_cast<small_relation>(1u << (a * n + a));
    const std::uint32_t limit = 1u << (n * n);
    for (std::uint32_t r = 0; r < limit; ++r) {
        if ((r & diag) != diag)
            continue;
        bool transitive = true;
        for (std::size_t a = 0; a < n && transitive; ++a)
            for (std::size_t b = 0; b < n && transitive; ++b)
                if (detail::rel_has(static_cast<small_relation>(r), n, a, b))
                    for (std::size_t c = 0; c < n && transitive; ++c)
                        if (detail::rel_has(static_cast<small_relation>(r), n, b, c) &&
                            !detail::rel_has(static_cast<small_relation>(r), n, a, c))
                            transitive = false;
        if (transitive)
            out.push_back(static_cast<small_relation>(r));
    }
    return out;
}

// One representative per isomorphism class of frames with `worlds` worlds
// and `agents` preorders (agents are not permuted).
inline std::vector<small_frame> frames_up_to_iso(std::size_t worlds, std::size_t agents)
{
    const auto pre = preorders(worlds);
    std::vector<std::vector<std::size_t>> perms;
    std::vector<std::size_t> p(worlds);
    std::iota(p.begin(), p.end(), 0);
    do
        perms.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));

    std::vector<small_frame> out;
    std::vector<std::size_t> idx(agents, 0);
    for (;;) {
        std::vector<small_relation> rels(agents);
        for (std::size_t i = 0; i < agents; ++i)
            rels[i] = pre[idx[i]];
        bool canonical = true;
        for (const auto& q : perms) {
            std::vector<small_relation> img(agents);
            for (std::size_t i = 0; i < agents; ++i)
                img[i] = detail::permute(rels[i], worlds, q);
            if (img < rels) {
                canonical = false;
                break;
            }
        }
        if (canonical)
            out.push_back({worlds, rels});
        std::size_t k = 0;
        while (k < agents && ++idx[k] == pre.size()) {
            idx[k] = 0;
            ++k;
        }
        if (k == agents)
            break;
    }
    return out;
}

inline kripke_model frame_model(const small_frame& f, const std::map<var_index, element>& valuation = {})
{
    std::vector<relation> rels;
    for (small_relation r : f.relations) {
        relation rel(f.worlds);
        for (std::size_t a = 0; a < f.worlds; ++a)
            for (std::size_t b = 0; b < f.worlds; ++b)
                if (detail::rel_has(r, f.worlds, a, b))
                    rel.add(a, b);
        rels.push_back(std::move(rel));
    }
    std::map<var_index, world_set> val;
    for (const auto& [v, x] : valuation) {
        world_set s(f.worlds);
        for (std::size_t w = 0; w < f.worlds; ++w)
            if (x & (element{1} << w))
                s.set(w);
        val.emplace(v, std::move(s));
    }
    std::vector<std::string> names;
    for (std::size_t w = 0; w < f.worlds; ++w)
        names.push_back("w" + std::to_string(w));
    return kripke_model(std::move(names), std::move(rels), std::move(val));
}

// Powerset algebra of a model's world set: box_i Y = { w | R_i(w) <= Y },
// C Y = { w | w and every S-successor of w lie in Y }.
inline finite_algebra kripke_algebra(const kripke_model& m)
{
    const std::size_t n = m.world_count();
    if (n > max_atoms)
        throw algebra_error("model has too many worlds for an explicit powerset algebra");
    const std::size_t size = std::size_t{1} << n;
    auto mask_of = [&](const world_set& s) {
        element x = 0;
        for (auto w = s.find_first(); w != world_set::npos; w = s.find_next(w))
            x |= element{1} << w;
        return x;
    };
    std::vector<element> s_up(n);
    for (world_id w = 0; w < n; ++w)
        s_up[w] = mask_of(m.s_relation().successors(w)) | (element{1} << w);
    std::vector<finite_algebra::table> boxes;
    for (agent_id i = 0; i < m.agent_count(); ++i) {
        std::vector<element> up(n);
        for (world_id w = 0; w < n; ++w)
            up[w] = mask_of(m.agent_relation(i).successors(w));
        finite_algebra::table t(size);
        for (element y = 0; y < size; ++y)
            for (world_id w = 0; w < n; ++w)
                if ((up[w] & ~y) == 0)
                    t[y] |= element{1} << w;
        boxes.push_back(std::move(t));
    }
    finite_algebra::table c(size);
    for (element y = 0; y < size; ++y)
        for (world_id w = 0; w < n; ++w)
            if ((s_up[w] & ~y) == 0)
                c[y] |= element{1} << w;
    return finite_algebra(m.world_names(), std::move(boxes), std::move(c));
}

inline finite_algebra frame_algebra(const small_frame& f) { return kripke_algebra(frame_model(f)); }

// Post-order instruction list for repeated evaluation of one formula in
// many (algebra, valuation) pairs. Variables are looked up by slot.
class compiled_formula {
public:
    compiled_formula(const formula& f, const std::vector<var_index>& slots) { emit(f, slots); }

    [[nodiscard]] element run(const finite_algebra& a, const element* values) const
    {
        element stack[64];
        std::size_t top = 0;
        for (const auto& ins : code_) {
            switch (ins.kind) {
            case op::var:
                stack[top++] = values[ins.arg];
                break;
            case op::bot:
                stack[top++] = 0;
                break;
            case op::imp: {
                const element y = stack[--top];
                const element x = stack[--top];
                stack[top++] = a.implies(x, y);
                break;
            }
            case op::box:
                stack[top - 1] = a.box(ins.arg, stack[top - 1]);
                break;
            case op::common:
                stack[top - 1] = a.common(stack[top - 1]);
                break;
            }
        }
        return stack[0];
    }

private:
    struct instruction {
        op kind;
        std::uint32_t arg;
    };

    void emit(const formula& f, const std::vector<var_index>& slots)
    {
        if (f.depth() > 60)
            throw std::invalid_argument("formula too deep for the flat evaluator");
        switch (f.kind()) {
        case op::var: {
            auto it = std::find(slots.begin(), slots.end(), f.variable());
            if (it == slots.end())
                throw std::invalid_argument("variable p" + std::to_string(f.variable()) + " has no slot");
            code_.push_back({op::var, static_cast<std::uint32_t>(it - slots.begin())});
            break;
        }
        case op::bot:
            code_.push_back({op::bot, 0});
            break;
        case op::imp:
            emit(f.lhs(), slots);
            emit(f.rhs(), slots);
            code_.push_back({op::imp, 0});
            break;
        case op::box:
            emit(f.body(), slots);
            code_.push_back({op::box, f.agent()});
            break;
        case op::common:
            emit(f.body(), slots);
            code_.push_back({op::common, 0});
            break;
        }
    }

    std::vector<instruction> code_;
};

} // namespace s4c
