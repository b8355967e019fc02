#pragma once

// Directed graphs, accessible parts and ordinal heights, specialised to the
// relation a <_d b  <=>  b <= E d & E a  on a finite S4C algebra.
//
// On a finite graph every height is a natural number or infinity (for the
// inaccessible part), so ordinals are represented as naturals plus a
// distinguished infinity with infinity + 1 = infinity.

#include "s4c/algebra.hpp"
#include "s4c/ultrafilter.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace s4c {

class ordinal {
public:
    constexpr ordinal() = default;
    static constexpr ordinal finite(std::uint32_t n) { return ordinal(n, false); }
    static constexpr ordinal infinity() { return ordinal(0, true); }

    [[nodiscard]] constexpr bool is_infinite() const noexcept { return infinite_; }
    [[nodiscard]] constexpr std::uint32_t value() const noexcept { return value_; }
    [[nodiscard]] constexpr ordinal successor() const noexcept { return infinite_ ? *this : finite(value_ + 1); }

    friend constexpr bool operator==(ordinal a, ordinal b) noexcept
    {
        return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
    }
    friend constexpr std::strong_ordering operator<=>(ordinal a, ordinal b) noexcept
    {
        if (a.infinite_ || b.infinite_)
            return a.infinite_ <=> b.infinite_;
        return a.value_ <=> b.value_;
    }

    [[nodiscard]] std::string to_string() const { return infinite_ ? "inf" : std::to_string(value_); }

private:
    constexpr ordinal(std::uint32_t v, bool inf) : value_(v), infinite_(inf) {}
    std::uint32_t value_ = 0;
    bool infinite_ = false;
};

// Graph on nodes 0..n-1; preds(a) lists every b with b < a.
class digraph {
public:
    explicit digraph(std::size_t n) : preds_(n), succs_(n) {}

    void add_edge(std::size_t from, std::size_t to)
    {
        succs_[from].push_back(to);
        preds_[to].push_back(from);
        ++edges_;
    }

    [[nodiscard]] std::size_t size() const noexcept { return preds_.size(); }
    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_; }
    [[nodiscard]] const std::vector<std::size_t>& preds(std::size_t a) const { return preds_[a]; }
    [[nodiscard]] const std::vector<std::size_t>& succs(std::size_t a) const { return succs_[a]; }
    [[nodiscard]] bool has_edge(std::size_t from, std::size_t to) const
    {
        const auto& s = succs_[from];
        return std::find(s.begin(), s.end(), to) != s.end();
    }

private:
    std::vector<std::vector<std::size_t>> preds_;
    std::vector<std::vector<std::size_t>> succs_;
    std::size_t edges_ = 0;
};

struct graph_heights {
    boost::dynamic_bitset<> accessible;
    std::vector<ordinal> height;
};

// Least fixed point of T(X) = { a | every predecessor of a is in X },
// computed by chaotic iteration: a node enters once its last predecessor
// has. Heights are assigned on entry, ht(a) = sup{ht(b)+1 | b < a}.
inline graph_heights analyse(const digraph& g)
{
    const std::size_t n = g.size();
    graph_heights out{boost::dynamic_bitset<>(n), std::vector<ordinal>(n, ordinal::infinity())};
    std::vector<std::size_t> pending(n);
    std::deque<std::size_t> ready;
    for (std::size_t a = 0; a < n; ++a) {
        pending[a] = g.preds(a).size();
        if (pending[a] == 0)
            ready.push_back(a);
    }
    while (!ready.empty()) {
        std::size_t a = ready.front();
        ready.pop_front();
        out.accessible.set(a);
        std::uint32_t h = 0;
        for (std::size_t b : g.preds(a))
            h = std::max(h, out.height[b].value() + 1);
        out.height[a] = ordinal::finite(h);
        for (std::size_t b : g.succs(a))
            if (--pending[b] == 0)
                ready.push_back(b);
    }
    return out;
}

inline boost::dynamic_bitset<> accessible_part(const digraph& g) { return analyse(g).accessible; }
inline std::vector<ordinal> heights(const digraph& g) { return analyse(g).height; }

// (b1,b2) < (c1,c2) iff b1 < c1 and b2 < c2; node (a,b) has index a*|g2|+b.
inline digraph product(const digraph& g1, const digraph& g2)
{
    digraph out(g1.size() * g2.size());
    for (std::size_t b1 = 0; b1 < g1.size(); ++b1)
        for (std::size_t c1 : g1.succs(b1))
            for (std::size_t b2 = 0; b2 < g2.size(); ++b2)
                for (std::size_t c2 : g2.succs(b2))
                    out.add_edge(b1 * g2.size() + b2, c1 * g2.size() + c2);
    return out;
}

template <typename Map>
bool is_homomorphism(const digraph& g1, const digraph& g2, Map&& f)
{
    for (std::size_t b = 0; b < g1.size(); ++b)
        for (std::size_t c : g1.succs(b))
            if (!g2.has_edge(f(b), f(c)))
                return false;
    return true;
}

// ---------------------------------------------------------------------------
// The relation <_d

struct prec_graph {
    const finite_algebra* algebra;
    element d;
    digraph graph;
};

inline prec_graph build_prec(const finite_algebra& alg, element d)
{
    prec_graph g{&alg, d, digraph(alg.size())};
    const element ed = alg.everyone(d);
    for (element a = 0; a < alg.size(); ++a) {
        // Successors of a are exactly the subsets of E d & E a.
        const element mask = ed & alg.everyone(a);
        element b = mask;
        for (;;) {
            g.graph.add_edge(a, b);
            if (b == 0)
                break;
            b = (b - 1) & mask;
        }
    }
    return g;
}

inline element_set accessible_part(const prec_graph& g) { return accessible_part(g.graph); }

using height_map = std::vector<ordinal>;

inline height_map heights(const prec_graph& g) { return heights(g.graph); }

// Everything derived from a single parameter d: heights, the ideals
// M_d(gamma), ultrafilter ranks and the sets J^gamma_d.
class prec_analysis {
public:
    prec_analysis(const finite_algebra& alg, element d) : alg_(&alg), d_(d), cd_(alg.common(d))
    {
        auto g = build_prec(alg, d);
        auto info = analyse(g.graph);
        accessible_ = std::move(info.accessible);
        heights_ = std::move(info.height);
        algebra_height_ = ordinal::finite(0);
        for (element b = 0; b < alg.size(); ++b)
            if (!alg.leq(b, cd_))
                algebra_height_ = std::max(algebra_height_, heights_[b].successor());
    }

    [[nodiscard]] element d() const noexcept { return d_; }
    [[nodiscard]] const element_set& accessible() const noexcept { return accessible_; }
    [[nodiscard]] const height_map& heights() const noexcept { return heights_; }
    [[nodiscard]] ordinal height(element a) const { return heights_[a]; }

    // ht_d(A) = sup{ ht_d(b)+1 | b not <= C d }.
    [[nodiscard]] ordinal algebra_height() const noexcept { return algebra_height_; }

    [[nodiscard]] bool in_m_ideal(element a, ordinal gamma) const { return gamma <= heights_[a]; }

    // M_d(gamma) = { a | gamma <= ht_d(a) }.
    [[nodiscard]] element_set m_ideal(ordinal gamma) const
    {
        element_set out(alg_->size());
        for (element a = 0; a < alg_->size(); ++a)
            if (in_m_ideal(a, gamma))
                out.set(a);
        return out;
    }

    // rk_d(u): infinity when C d is in u, otherwise the least
    // gamma <= ht_d(A) with u disjoint from M_d(gamma).
    [[nodiscard]] ordinal rank(const ultrafilter& u) const
    {
        if (u.contains(cd_))
            return ordinal::infinity();
        if (algebra_height_.is_infinite())
            throw algebra_error("ultrafilter rank is undefined: the algebra is not standard");
        for (std::uint32_t gamma = 0; gamma <= algebra_height_.value(); ++gamma) {
            bool meets = false;
            for (element a = 0; a < alg_->size() && !meets; ++a)
                meets = u.contains(a) && in_m_ideal(a, ordinal::finite(gamma));
            if (!meets)
                return ordinal::finite(gamma);
        }
        throw algebra_error("ultrafilter rank is undefined: the algebra is not standard");
    }

    // J^gamma_d = { u | gamma <= rk_d(u) } over the given ultrafilter list.
    [[nodiscard]] ultrafilter_set j_set(const std::vector<ultrafilter>& ults, ordinal gamma) const
    {
        ultrafilter_set out = 0;
        for (std::size_t k = 0; k < ults.size(); ++k)
            if (gamma <= rank(ults[k]))
                out |= ultrafilter_set{1} << k;
        return out;
    }

private:
    const finite_algebra* alg_;
    element d_;
    element cd_;
    element_set accessible_;
    height_map heights_;
    ordinal algebra_height_;
};

inline element_set m_ideal(const finite_algebra& alg, element d, ordinal gamma)
{
    return prec_analysis(alg, d).m_ideal(gamma);
}

// Contains 0, closed under joins, closed downwards.
inline bool is_ideal(const finite_algebra& alg, const element_set& s)
{
    if (!s.test(alg.bottom()))
        return false;
    for (element x = 0; x < alg.size(); ++x) {
        if (!s.test(x))
            continue;
        for (element y = 0; y < alg.size(); ++y) {
            if (s.test(y) && !s.test(x | y))
                return false;
            if (alg.leq(y, x) && !s.test(y))
                return false;
        }
    }
    return true;
}

inline ordinal rank_ultrafilter(const finite_algebra& alg, element d, const ultrafilter& u)
{
    // Rebuilding through from_members rejects foreign member sets.
    auto checked = ultrafilter::from_members(alg, u.members());
    return prec_analysis(alg, d).rank(checked);
}

inline ultrafilter_set j_set(const finite_algebra& alg, element d, ordinal gamma)
{
    return prec_analysis(alg, d).j_set(ultrafilters(alg), gamma);
}

// ---------------------------------------------------------------------------
// Standardness

// An eventually periodic sequence a_0, a_1, ... given as stem then cycle;
// consecutive terms satisfy a_j <= E d & E a_{j+1}.
struct lasso {
    std::vector<element> stem;
    std::vector<element> cycle;

    [[nodiscard]] element at(std::size_t j) const
    {
        return j < stem.size() ? stem[j] : cycle[(j - stem.size()) % cycle.size()];
    }
    [[nodiscard]] std::size_t distinct_length() const noexcept { return stem.size() + cycle.size(); }
};

struct standard_profile {
    element d = 0;
    std::size_t accessible_count = 0;
    std::optional<std::uint32_t> max_height; // over the accessible part
    bool matches = false;                    // Acc = { a | a not <= C d }
};

struct standardness_witness {
    element d = 0;
    element a = 0;
    // Set when a is inaccessible but not below C d.
    std::optional<lasso> sequence;
    // a <= C d but accessible; only possible on algebras violating the axioms.
    bool accessible_below_c = false;
};

struct standardness_report {
    bool standard = true;
    std::vector<standard_profile> profiles;
    std::optional<standardness_witness> witness;
};

namespace detail {

// Shortest lasso start -> ... -> x -> cycle through x, following
// predecessor edges (each next term is a predecessor of the previous one).
inline std::optional<lasso> shortest_lasso(const digraph& g, std::size_t start)
{
    const std::size_t n = g.size();
    auto bfs = [&](std::size_t from) {
        std::vector<std::size_t> dist(n, SIZE_MAX), parent(n, SIZE_MAX);
        std::deque<std::size_t> q{from};
        dist[from] = 0;
        while (!q.empty()) {
            auto x = q.front();
            q.pop_front();
            for (std::size_t y : g.preds(x))
                if (dist[y] == SIZE_MAX) {
                    dist[y] = dist[x] + 1;
                    parent[y] = x;
                    q.push_back(y);
                }
        }
        return std::pair{dist, parent};
    };
    auto path = [](const std::vector<std::size_t>& parent, std::size_t from, std::size_t to) {
        std::vector<std::size_t> p;
        for (std::size_t x = to; x != from; x = parent[x])
            p.push_back(x);
        p.push_back(from);
        std::reverse(p.begin(), p.end());
        return p;
    };
    auto [dist, parent] = bfs(start);
    std::optional<lasso> best;
    std::size_t best_len = SIZE_MAX;
    for (std::size_t x = 0; x < n; ++x) {
        if (dist[x] == SIZE_MAX)
            continue;
        // Shortest cycle through x: x -> ... -> y with x a predecessor of y.
        auto [dx, px] = bfs(x);
        std::size_t cyc = SIZE_MAX, close = SIZE_MAX;
        for (std::size_t y = 0; y < n; ++y)
            if (dx[y] != SIZE_MAX && std::find(g.preds(y).begin(), g.preds(y).end(), x) != g.preds(y).end() &&
                dx[y] + 1 < cyc) {
                cyc = dx[y] + 1;
                close = y;
            }
        if (cyc == SIZE_MAX || dist[x] + cyc >= best_len)
            continue;
        best_len = dist[x] + cyc;
        lasso l;
        auto stem = path(parent, start, x);
        stem.pop_back();
        for (auto s : stem)
            l.stem.push_back(static_cast<element>(s));
        for (auto c : path(px, x, close))
            l.cycle.push_back(static_cast<element>(c));
        best = std::move(l);
    }
    return best;
}

} // namespace detail

inline standard_profile profile(const finite_algebra& alg, element d)
{
    prec_analysis pa(alg, d);
    standard_profile p;
    p.d = d;
    p.accessible_count = pa.accessible().count();
    p.matches = true;
    for (element a = 0; a < alg.size(); ++a) {
        if (pa.accessible().test(a))
            p.max_height = std::max(p.max_height.value_or(0), pa.height(a).value());
        if (pa.accessible().test(a) == alg.leq(a, alg.common(d)))
            p.matches = false;
    }
    return p;
}

// Standard iff for every d the accessible part of <_d is { a | a not <= C d }.
inline standardness_report check_standard(const finite_algebra& alg)
{
    standardness_report report;
    for (element d = 0; d < alg.size(); ++d) {
        report.profiles.push_back(profile(alg, d));
        if (report.profiles.back().matches || report.witness)
            continue;
        report.standard = false;
        auto g = build_prec(alg, d);
        auto acc = accessible_part(g.graph);
        const element cd = alg.common(d);
        for (element a = 0; a < alg.size(); ++a) {
            if (!acc.test(a) && !alg.leq(a, cd)) {
                report.witness = standardness_witness{d, a, detail::shortest_lasso(g.graph, a), false};
                break;
            }
        }
        if (!report.witness)
            for (element a = 0; a < alg.size(); ++a)
                if (acc.test(a) && alg.leq(a, cd)) {
                    report.witness = standardness_witness{d, a, std::nullopt, true};
                    break;
                }
    }
    return report;
}

} // namespace s4c
