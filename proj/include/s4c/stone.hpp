#pragma once

// Finite multitopological spaces, the interior-operator correspondence, and
// the ultrafilter representation of finite S4C algebras.

#include "s4c/algebra.hpp"
#include "s4c/kripke.hpp"
#include "s4c/text.hpp"
#include "s4c/ultrafilter.hpp"
#include "s4c/wellfound.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace s4c {

// Point sets are bitmasks over point indices.
using point_set = element;

class topology_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class topology {
public:
    // Validates an explicit family of opens.
    static topology from_opens(std::size_t points, std::vector<point_set> opens)
    {
        check_points(points);
        std::sort(opens.begin(), opens.end());
        opens.erase(std::unique(opens.begin(), opens.end()), opens.end());
        const point_set full = full_set(points);
        std::set<point_set> family(opens.begin(), opens.end());
        for (point_set o : opens)
            if (o & ~full)
                throw topology_error("open set mentions a point outside the space");
        if (!family.count(0))
            throw topology_error("topology must contain the empty set");
        if (!family.count(full))
            throw topology_error("topology must contain the whole space");
        for (point_set a : opens)
            for (point_set b : opens) {
                if (!family.count(a & b))
                    throw topology_error("topology is not closed under intersection");
                if (!family.count(a | b))
                    throw topology_error("topology is not closed under union");
            }
        return topology(points, std::move(opens));
    }

    // Smallest topology containing the given sets.
    static topology generated_by(std::size_t points, const std::vector<point_set>& subbasis)
    {
        check_points(points);
        const point_set full = full_set(points);
        std::set<point_set> family{0, full};
        for (point_set s : subbasis) {
            if (s & ~full)
                throw topology_error("generator mentions a point outside the space");
            family.insert(s);
        }
        // Finite intersections, then arbitrary (= finite) unions.
        for (bool grew = true; grew;) {
            grew = false;
            std::vector<point_set> cur(family.begin(), family.end());
            for (point_set a : cur)
                for (point_set b : cur)
                    grew |= family.insert(a & b).second;
        }
        for (bool grew = true; grew;) {
            grew = false;
            std::vector<point_set> cur(family.begin(), family.end());
            for (point_set a : cur)
                for (point_set b : cur)
                    grew |= family.insert(a | b).second;
        }
        return topology(points, {family.begin(), family.end()});
    }

    static topology discrete(std::size_t points)
    {
        std::vector<point_set> all;
        for (point_set s = 0; s <= full_set(points); ++s)
            all.push_back(s);
        return topology(points, std::move(all));
    }

    static topology indiscrete(std::size_t points) { return topology(points, {0, full_set(points)}); }

    [[nodiscard]] std::size_t points() const noexcept { return points_; }
    [[nodiscard]] point_set full() const noexcept { return full_set(points_); }
    [[nodiscard]] const std::vector<point_set>& opens() const noexcept { return opens_; }
    [[nodiscard]] bool is_open(point_set s) const { return std::binary_search(opens_.begin(), opens_.end(), s); }

    // Union of all opens contained in y.
    [[nodiscard]] point_set interior(point_set y) const
    {
        point_set out = 0;
        for (point_set o : opens_)
            if ((o & ~y) == 0)
                out |= o;
        return out;
    }

    [[nodiscard]] topology intersect(const topology& other) const
    {
        std::vector<point_set> common;
        std::set_intersection(opens_.begin(), opens_.end(), other.opens_.begin(), other.opens_.end(),
                              std::back_inserter(common));
        return topology(points_, std::move(common));
    }

    friend bool operator==(const topology&, const topology&) = default;

private:
    topology(std::size_t points, std::vector<point_set> opens) : points_(points), opens_(std::move(opens))
    {
        std::sort(opens_.begin(), opens_.end());
    }

    static void check_points(std::size_t points)
    {
        if (points == 0)
            throw topology_error("space needs at least one point");
        if (points > max_atoms)
            throw topology_error("at most " + std::to_string(max_atoms) + " points are supported");
    }
    static point_set full_set(std::size_t points) { return static_cast<point_set>((std::size_t{1} << points) - 1); }

    std::size_t points_;
    std::vector<point_set> opens_;
};

inline point_set interior(const topology& tau, point_set y) { return tau.interior(y); }

// A point set with one topology per agent; the meet topology (intersection
// of all agent topologies) is materialised once.
class finite_top_space {
public:
    finite_top_space(std::vector<std::string> points, std::vector<topology> topologies)
        : names_(std::move(points)), topologies_(std::move(topologies))
    {
        if (names_.empty())
            throw topology_error("space needs at least one point");
        if (topologies_.empty())
            throw topology_error("space needs at least one agent topology");
        for (const auto& t : topologies_)
            if (t.points() != names_.size())
                throw topology_error("topology is over a different point count");
        meet_ = std::make_unique<topology>(topologies_.front());
        for (std::size_t i = 1; i < topologies_.size(); ++i)
            *meet_ = meet_->intersect(topologies_[i]);
    }

    finite_top_space(const finite_top_space& o)
        : names_(o.names_), topologies_(o.topologies_), meet_(std::make_unique<topology>(*o.meet_))
    {
    }
    finite_top_space& operator=(const finite_top_space& o)
    {
        names_ = o.names_;
        topologies_ = o.topologies_;
        meet_ = std::make_unique<topology>(*o.meet_);
        return *this;
    }
    finite_top_space(finite_top_space&&) noexcept = default;
    finite_top_space& operator=(finite_top_space&&) noexcept = default;

    [[nodiscard]] std::size_t point_count() const noexcept { return names_.size(); }
    [[nodiscard]] std::size_t agent_count() const noexcept { return topologies_.size(); }
    [[nodiscard]] const std::vector<std::string>& point_names() const noexcept { return names_; }
    [[nodiscard]] const topology& agent_topology(agent_id i) const { return topologies_.at(i); }
    [[nodiscard]] const std::vector<topology>& topologies() const noexcept { return topologies_; }
    [[nodiscard]] const topology& meet_topology() const noexcept { return *meet_; }

private:
    std::vector<std::string> names_;
    std::vector<topology> topologies_;
    std::unique_ptr<topology> meet_;
};

// ---------------------------------------------------------------------------
// Interior operators and topologies

struct kuratowski_result {
    std::optional<topology> recovered;
    // Violated conditions, empty on success.
    std::vector<algebra_issue> issues;
};

// Checks that box is an interior operator on the powerset of `points`
// points and recovers the unique topology (its fixpoints) inducing it.
inline kuratowski_result kuratowski_roundtrip(std::size_t points, const std::vector<point_set>& box)
{
    kuratowski_result out;
    if (points == 0 || points > max_atoms)
        throw topology_error("point count out of range");
    std::vector<std::string> names(points);
    for (std::size_t k = 0; k < points; ++k)
        names[k] = "x" + std::to_string(k);
    finite_algebra alg(names, {box}, box);
    algebra_report report;
    detail::check_interior(alg, box, "box", report);
    out.issues = std::move(report.issues);
    if (!out.issues.empty())
        return out;
    std::vector<point_set> fix;
    for (point_set y = 0; y < alg.size(); ++y)
        if (box[y] == y)
            fix.push_back(y);
    auto tau = topology::from_opens(points, fix);
    for (point_set y = 0; y < alg.size(); ++y)
        if (tau.interior(y) != box[y])
            throw std::logic_error("recovered topology does not reproduce the interior operator");
    out.recovered = std::move(tau);
    return out;
}

// Powerset algebra with box_i = interior in tau_i and C = interior in the
// meet topology.
inline finite_algebra powerset_algebra(const finite_top_space& s)
{
    const std::size_t n = std::size_t{1} << s.point_count();
    std::vector<finite_algebra::table> boxes;
    for (const auto& t : s.topologies()) {
        finite_algebra::table tab(n);
        for (point_set y = 0; y < n; ++y)
            tab[y] = t.interior(y);
        boxes.push_back(std::move(tab));
    }
    finite_algebra::table c(n);
    for (point_set y = 0; y < n; ++y)
        c[y] = s.meet_topology().interior(y);
    return finite_algebra(s.point_names(), std::move(boxes), std::move(c));
}

struct topology_recovery {
    std::vector<topology> topologies;
    // Elements where C differs from the interior in the meet topology.
    std::vector<element> c_mismatches;
    [[nodiscard]] bool ok() const noexcept { return c_mismatches.empty(); }
    [[nodiscard]] finite_top_space space(const finite_algebra& alg) const { return {alg.atoms(), topologies}; }
};

// Recovers tau_i from each box_i and checks C = I_tau for the meet topology.
inline topology_recovery algebra_to_topologies(const finite_algebra& alg)
{
    topology_recovery out;
    for (agent_id i = 0; i < alg.agent_count(); ++i) {
        auto r = kuratowski_roundtrip(alg.atom_count(), alg.box_table(i));
        if (!r.recovered)
            throw topology_error("box" + std::to_string(i) + " is not an interior operator: " +
                                 describe(alg, r.issues.front()));
        out.topologies.push_back(std::move(*r.recovered));
    }
    topology meet = out.topologies.front();
    for (std::size_t i = 1; i < out.topologies.size(); ++i)
        meet = meet.intersect(out.topologies[i]);
    for (element y = 0; y < alg.size(); ++y)
        if (alg.common(y) != meet.interior(y))
            out.c_mismatches.push_back(y);
    return out;
}

// Alexandrov space of a Kripke model: tau_i is the family of R_i-up-sets.
inline finite_top_space alexandrov_space(const kripke_model& m)
{
    const std::size_t n = m.world_count();
    if (n > max_atoms)
        throw topology_error("model has too many worlds for an explicit powerset algebra");
    std::vector<topology> tops;
    for (agent_id i = 0; i < m.agent_count(); ++i) {
        std::vector<point_set> opens;
        for (point_set y = 0; y < (point_set{1} << n); ++y) {
            bool up = true;
            for (world_id w = 0; w < n && up; ++w)
                if (y & (point_set{1} << w))
                    for (world_id v = 0; v < n && up; ++v)
                        if (m.agent_relation(i).contains(w, v) && !(y & (point_set{1} << v)))
                            up = false;
            if (up)
                opens.push_back(y);
        }
        tops.push_back(topology::from_opens(n, std::move(opens)));
    }
    return {m.world_names(), std::move(tops)};
}

// The valuation of a Kripke model read in its Alexandrov powerset algebra.
inline valuation alexandrov_valuation(const finite_algebra& alg, const kripke_model& m,
                                      const std::vector<var_index>& vars)
{
    valuation v(alg);
    for (var_index p : vars) {
        element x = 0;
        auto set = m.truth_of(p);
        for (auto w = set.find_first(); w != world_set::npos; w = set.find_next(w))
            x |= element{1} << w;
        v.assign(p, x);
    }
    return v;
}

// ---------------------------------------------------------------------------
// Ultrafilter representation

// Space over Ult A where tau_i is generated by { hat(box_i b) | b in A }.
// The generating family contains Ult A and is closed under intersections,
// so it is a basis; both facts are checked.
inline finite_top_space topo_canonical(const finite_algebra& alg)
{
    auto ults = ultrafilters(alg);
    std::vector<std::string> names;
    for (const auto& u : ults)
        names.push_back("u_" + alg.atoms()[u.atom_index()]);
    std::vector<topology> tops;
    const point_set full = static_cast<point_set>((std::size_t{1} << ults.size()) - 1);
    for (agent_id i = 0; i < alg.agent_count(); ++i) {
        std::set<point_set> basis;
        for (element b = 0; b < alg.size(); ++b)
            basis.insert(hat(ults, alg.box(i, b)));
        if (!basis.count(full))
            throw std::logic_error("generating family misses the whole space");
        for (point_set x : basis)
            for (point_set y : basis)
                if (!basis.count(x & y))
                    throw std::logic_error("generating family is not closed under intersection");
        std::set<point_set> opens{0};
        for (point_set x : basis) {
            std::vector<point_set> cur(opens.begin(), opens.end());
            for (point_set o : cur)
                opens.insert(o | x);
        }
        tops.push_back(topology::from_opens(ults.size(), {opens.begin(), opens.end()}));
    }
    return {std::move(names), std::move(tops)};
}

struct representation_failure {
    std::string check;
    element a = 0;
    std::optional<agent_id> agent;
    std::optional<ordinal> gamma;
};

struct representation_report {
    std::vector<representation_failure> failures;
    std::size_t checks = 0;
    [[nodiscard]] bool ok() const noexcept { return failures.empty(); }
};

// Checks hat(box_i a) = I_{tau_i}(hat a) and hat(C a) = I_tau(hat a) for
// every element, plus the intermediate facts used to establish the C
// clause: hat(C a) is a tau-open subset of hat a, the J-hierarchy inclusion
//   I_{tau_i}(hat d) & ... & I_{tau_i}(J^g_d) & ...  <=  J^{g+1}_d
// for every d and g <= ht_d(A), and I_tau(hat a) <= J^{g+1}_a level by level
// with hat(C a) = J^inf_a.
inline representation_report verify_representation(const finite_algebra& alg)
{
    representation_report rep;
    auto ults = ultrafilters(alg);
    auto space = topo_canonical(alg);
    const topology& meet = space.meet_topology();
    auto fail = [&](std::string what, element a, std::optional<agent_id> i = {}, std::optional<ordinal> g = {}) {
        rep.failures.push_back({std::move(what), a, i, g});
    };
    for (element a = 0; a < alg.size(); ++a) {
        const point_set ha = hat(ults, a);
        for (agent_id i = 0; i < alg.agent_count(); ++i) {
            ++rep.checks;
            if (hat(ults, alg.box(i, a)) != space.agent_topology(i).interior(ha))
                fail("box", a, i);
        }
        const point_set hca = hat(ults, alg.common(a));
        ++rep.checks;
        if (!meet.is_open(hca) || (hca & ~ha) != 0 || (hca & ~meet.interior(ha)) != 0)
            fail("C-open-below", a);
        ++rep.checks;
        if (hca != meet.interior(ha))
            fail("C", a);
    }
    // J-hierarchy, jointly with the height analysis of <_d.
    for (element d = 0; d < alg.size(); ++d) {
        prec_analysis pa(alg, d);
        const ordinal top_height = pa.algebra_height();
        if (top_height.is_infinite()) {
            fail("height-finite", d);
            continue;
        }
        point_set ed_part = space.meet_topology().full();
        for (agent_id i = 0; i < alg.agent_count(); ++i)
            ed_part &= space.agent_topology(i).interior(hat(ults, d));
        const point_set hd = hat(ults, d);
        const point_set int_tau = meet.interior(hd);
        for (std::uint32_t g = 0; g <= top_height.value(); ++g) {
            const ordinal gamma = ordinal::finite(g);
            point_set lhs = ed_part;
            const point_set jg = pa.j_set(ults, gamma);
            for (agent_id i = 0; i < alg.agent_count(); ++i)
                lhs &= space.agent_topology(i).interior(jg);
            const point_set jnext = pa.j_set(ults, gamma.successor());
            ++rep.checks;
            if ((lhs & ~jnext) != 0)
                fail("J-step", d, std::nullopt, gamma);
            ++rep.checks;
            if ((int_tau & ~jnext) != 0)
                fail("J-level", d, std::nullopt, gamma);
        }
        ++rep.checks;
        if (pa.j_set(ults, ordinal::infinity()) != hat(ults, alg.common(d)))
            fail("J-infinity", d);
        ++rep.checks;
        if (pa.j_set(ults, top_height.successor()) != hat(ults, alg.common(d)))
            fail("J-limit", d);
    }
    return rep;
}

struct embedding_report {
    bool injective = true;
    bool boolean_homomorphism = true;
    bool commutes_with_boxes = true;
    bool commutes_with_common = true;
    bool surjective = true;
    std::vector<std::string> failures;
    [[nodiscard]] bool ok() const noexcept
    {
        return injective && boolean_homomorphism && commutes_with_boxes && commutes_with_common && surjective;
    }
};

// Embeds A into the powerset algebra of its topo-canonical space via hat.
// On a finite algebra the embedding is onto.
inline embedding_report completion_embed(const finite_algebra& alg)
{
    embedding_report rep;
    auto ults = ultrafilters(alg);
    auto target = powerset_algebra(topo_canonical(alg));
    auto note = [&](bool& flag, const std::string& msg) {
        flag = false;
        if (rep.failures.size() < 16)
            rep.failures.push_back(msg);
    };
    std::vector<bool> hit(target.size(), false);
    for (element a = 0; a < alg.size(); ++a) {
        const point_set ha = hat(ults, a);
        if (hit[ha])
            note(rep.injective, "hat is not injective at " + element_name(alg, a));
        hit[ha] = true;
        if (hat(ults, alg.complement(a)) != target.complement(ha))
            note(rep.boolean_homomorphism, "complement not preserved at " + element_name(alg, a));
        for (element b = 0; b < alg.size(); ++b) {
            if (hat(ults, a & b) != (ha & hat(ults, b)) || hat(ults, a | b) != (ha | hat(ults, b)))
                note(rep.boolean_homomorphism,
                     "meet/join not preserved at " + element_name(alg, a) + ", " + element_name(alg, b));
        }
        for (agent_id i = 0; i < alg.agent_count(); ++i)
            if (hat(ults, alg.box(i, a)) != target.box(i, ha))
                note(rep.commutes_with_boxes, "box" + std::to_string(i) + " not preserved at " + element_name(alg, a));
        if (hat(ults, alg.common(a)) != target.common(ha))
            note(rep.commutes_with_common, "C not preserved at " + element_name(alg, a));
    }
    if (hat(ults, alg.top()) != target.top() || hat(ults, alg.bottom()) != target.bottom())
        note(rep.boolean_homomorphism, "constants not preserved");
    if (std::find(hit.begin(), hit.end(), false) != hit.end())
        note(rep.surjective, "hat is not onto the powerset of Ult A");
    return rep;
}

// ---------------------------------------------------------------------------
// Space files
//
//   agents N
//   points x y ...
//   open i: x y ...      (one basic open per line; closure computed on load)

inline finite_top_space read_space(std::istream& in)
{
    std::optional<std::size_t> agents;
    std::vector<std::string> points;
    std::vector<std::vector<point_set>> generators;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fail = [&](const std::string& msg) {
            throw topology_error("line " + std::to_string(line_no) + ": " + msg);
        };
        auto content = text::strip_comment(line);
        if (content.empty())
            continue;
        auto [head, rest] = text::split_head(content);
        if (head == "agents") {
            auto n = text::to_number(rest);
            if (!n || *n == 0)
                fail("agents needs a positive integer");
            agents = *n;
            generators.assign(*n, {});
        } else if (head == "points") {
            points = text::words(rest);
            if (points.empty())
                fail("points needs at least one name");
            if (points.size() > max_atoms)
                fail("too many points");
        } else if (head == "open") {
            if (!agents || points.empty())
                fail("open before agents/points");
            auto [idx_text, body] = text::split_at(rest, ':');
            auto idx = text::to_number(idx_text);
            if (!idx || *idx >= *agents)
                fail("bad agent index");
            point_set s = 0;
            for (const auto& name : text::words(body)) {
                auto it = std::find(points.begin(), points.end(), name);
                if (it == points.end())
                    fail("unknown point '" + name + "'");
                s |= point_set{1} << (it - points.begin());
            }
            generators[*idx].push_back(s);
        } else {
            fail("unknown directive '" + head + "'");
        }
    }
    if (!agents)
        throw topology_error("missing 'agents' line");
    if (points.empty())
        throw topology_error("missing 'points' line");
    std::vector<topology> tops;
    for (const auto& g : generators)
        tops.push_back(topology::generated_by(points.size(), g));
    return {std::move(points), std::move(tops)};
}

inline finite_top_space read_space(const std::string& text)
{
    std::istringstream in(text);
    return read_space(in);
}

inline void write_space(std::ostream& out, const finite_top_space& s)
{
    out << "agents " << s.agent_count() << "\npoints";
    for (const auto& p : s.point_names())
        out << ' ' << p;
    out << "\n";
    for (agent_id i = 0; i < s.agent_count(); ++i)
        for (point_set o : s.agent_topology(i).opens()) {
            out << "open " << i << ":";
            for (std::size_t k = 0; k < s.point_count(); ++k)
                if (o & (point_set{1} << k))
                    out << ' ' << s.point_names()[k];
            out << "\n";
        }
}

} // namespace s4c
