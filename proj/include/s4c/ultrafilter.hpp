#pragma once

#include "s4c/algebra.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace s4c {

// An ultrafilter of a finite algebra. Every one is principal at an atom; the
// member set is kept materialised for membership queries.
class ultrafilter {
public:
    // Validates that members is an ultrafilter of alg.
    static ultrafilter from_members(const finite_algebra& alg, const element_set& members)
    {
        if (members.size() != alg.size())
            throw std::invalid_argument("member set has the wrong width");
        if (!members.test(alg.top()) || members.test(alg.bottom()))
            throw std::invalid_argument("not an ultrafilter: must contain 1 and omit 0");
        for (element x = 0; x < alg.size(); ++x) {
            if (members.test(x) == members.test(alg.complement(x)))
                throw std::invalid_argument("not an ultrafilter: must contain exactly one of a and its complement");
            if (!members.test(x))
                continue;
            for (element y = 0; y < alg.size(); ++y) {
                if (alg.leq(x, y) && !members.test(y))
                    throw std::invalid_argument("not an ultrafilter: not upward closed");
                if (members.test(y) && !members.test(x & y))
                    throw std::invalid_argument("not an ultrafilter: not closed under meets");
            }
        }
        for (std::size_t k = 0; k < alg.atom_count(); ++k)
            if (members.test(alg.atom(k)))
                return ultrafilter(k, members);
        throw std::invalid_argument("not an ultrafilter: contains no atom");
    }

    static ultrafilter principal(const finite_algebra& alg, std::size_t atom_index)
    {
        element_set members(alg.size());
        for (element x = 0; x < alg.size(); ++x)
            if (x & alg.atom(atom_index))
                members.set(x);
        return ultrafilter(atom_index, std::move(members));
    }

    [[nodiscard]] std::size_t atom_index() const noexcept { return atom_; }
    [[nodiscard]] bool contains(element x) const { return members_.test(x); }
    [[nodiscard]] const element_set& members() const noexcept { return members_; }

    friend bool operator==(const ultrafilter& a, const ultrafilter& b) { return a.members_ == b.members_; }

private:
    ultrafilter(std::size_t atom, element_set members) : atom_(atom), members_(std::move(members)) {}

    std::size_t atom_;
    element_set members_;
};

// All ultrafilters, one per atom, in atom order.
inline std::vector<ultrafilter> ultrafilters(const finite_algebra& alg)
{
    std::vector<ultrafilter> out;
    for (std::size_t k = 0; k < alg.atom_count(); ++k)
        out.push_back(ultrafilter::principal(alg, k));
    return out;
}

// Sets of ultrafilters are bitmasks over positions in ultrafilters(alg).
using ultrafilter_set = element;

// hat(a) = { u | a in u }.
inline ultrafilter_set hat(const std::vector<ultrafilter>& ults, element a)
{
    ultrafilter_set out = 0;
    for (std::size_t k = 0; k < ults.size(); ++k)
        if (ults[k].contains(a))
            out |= ultrafilter_set{1} << k;
    return out;
}

} // namespace s4c
