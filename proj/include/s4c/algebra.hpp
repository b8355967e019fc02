#pragma once

// Finite S4C algebras. The Boolean part is always the powerset of a finite
// atom set, so elements are bitmasks over atoms and the lattice operations
// are bitwise. Each agent box and the common-knowledge operator C are
// stored as full tables over the carrier.

#include "s4c/syntax.hpp"
#include "s4c/text.hpp"

#include <boost/dynamic_bitset.hpp>

#include <bit>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace s4c {

using element = std::uint32_t;
// Indexed by element.
using element_set = boost::dynamic_bitset<>;

// Operator tables have 2^atoms entries; beyond this they are not materialised.
inline constexpr std::size_t max_atoms = 20;

class algebra_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class finite_algebra {
public:
    using table = std::vector<element>;

    finite_algebra(std::vector<std::string> atoms, std::vector<table> boxes, table common)
        : atoms_(std::move(atoms)), boxes_(std::move(boxes)), common_(std::move(common))
    {
        if (atoms_.empty())
            throw algebra_error("algebra needs at least one atom");
        if (atoms_.size() > max_atoms)
            throw algebra_error("algebra has " + std::to_string(atoms_.size()) + " atoms; at most " +
                                std::to_string(max_atoms) + " are supported");
        if (boxes_.empty())
            throw algebra_error("algebra needs at least one agent");
        for (std::size_t i = 0; i < boxes_.size(); ++i)
            check_table(boxes_[i], "box" + std::to_string(i));
        check_table(common_, "C");
    }

    // Interior operator from its fixpoints: box x = join of the opens below x.
    static table table_from_opens(std::size_t atom_count, const std::vector<element>& opens)
    {
        const std::size_t n = std::size_t{1} << atom_count;
        table t(n, 0);
        for (element x = 0; x < n; ++x)
            for (element o : opens)
                if ((o & ~x) == 0)
                    t[x] |= o;
        return t;
    }

    [[nodiscard]] std::size_t atom_count() const noexcept { return atoms_.size(); }
    [[nodiscard]] std::size_t agent_count() const noexcept { return boxes_.size(); }
    [[nodiscard]] std::size_t size() const noexcept { return std::size_t{1} << atoms_.size(); }
    [[nodiscard]] const std::vector<std::string>& atoms() const noexcept { return atoms_; }

    [[nodiscard]] element bottom() const noexcept { return 0; }
    [[nodiscard]] element top() const noexcept { return static_cast<element>(size() - 1); }
    [[nodiscard]] element meet(element a, element b) const noexcept { return a & b; }
    [[nodiscard]] element join(element a, element b) const noexcept { return a | b; }
    [[nodiscard]] element complement(element a) const noexcept { return ~a & top(); }
    [[nodiscard]] element implies(element a, element b) const noexcept { return complement(a) | b; }
    [[nodiscard]] bool leq(element a, element b) const noexcept { return (a & ~b) == 0; }
    [[nodiscard]] element atom(std::size_t k) const noexcept { return element{1} << k; }

    [[nodiscard]] element box(agent_id i, element a) const { return boxes_.at(i)[a]; }
    [[nodiscard]] element common(element a) const { return common_[a]; }
    // E a: meet of all agent boxes.
    [[nodiscard]] element everyone(element a) const
    {
        element out = top();
        for (const auto& t : boxes_)
            out &= t[a];
        return out;
    }

    [[nodiscard]] const table& box_table(agent_id i) const { return boxes_.at(i); }
    [[nodiscard]] const table& common_table() const noexcept { return common_; }

    // Same algebra with one operator table replaced.
    [[nodiscard]] finite_algebra with_common(table c) const { return {atoms_, boxes_, std::move(c)}; }
    [[nodiscard]] finite_algebra with_box(agent_id i, table t) const
    {
        auto boxes = boxes_;
        boxes.at(i) = std::move(t);
        return {atoms_, std::move(boxes), common_};
    }

    friend bool operator==(const finite_algebra&, const finite_algebra&) = default;

private:
    void check_table(const table& t, const std::string& name) const
    {
        if (t.size() != size())
            throw algebra_error(name + " table has " + std::to_string(t.size()) + " entries, expected " +
                                std::to_string(size()));
        for (element v : t)
            if (v > top())
                throw algebra_error(name + " table maps outside the carrier");
    }

    std::vector<std::string> atoms_;
    std::vector<table> boxes_;
    table common_;
};

// Elements print as comma-joined atom names, '-' for the empty set.
inline std::string element_name(const finite_algebra& a, element x)
{
    if (x == 0)
        return "-";
    std::string out;
    for (std::size_t k = 0; k < a.atom_count(); ++k)
        if (x & a.atom(k)) {
            if (!out.empty())
                out += ',';
            out += a.atoms()[k];
        }
    return out;
}

inline std::string elements_name(const finite_algebra& a, const element_set& s)
{
    std::string out = "{";
    bool first = true;
    for (auto x = s.find_first(); x != element_set::npos; x = s.find_next(x)) {
        if (!first)
            out += ' ';
        first = false;
        out += element_name(a, static_cast<element>(x));
    }
    return out + "}";
}

// ---------------------------------------------------------------------------
// Validation

struct algebra_issue {
    enum class kind {
        top_not_fixed,     // op 1 != 1
        meet_not_preserved,  // op(x & y) != op x & op y
        not_idempotent,    // op x != op op x
        not_deflationary,  // op x not <= x
        c_above_unfolding, // C a not <= E a & E C a
        induction_fails,   // E a & C(a -> E a) not <= C a
    };
    kind what;
    std::string op; // "box<i>", "C", or "mixed"
    element x = 0;
    element y = 0;
};

struct algebra_report {
    std::vector<algebra_issue> issues;
    [[nodiscard]] bool ok() const noexcept { return issues.empty(); }
};

namespace detail {

inline void check_interior(const finite_algebra& a, const finite_algebra::table& t, const std::string& name,
                           algebra_report& report)
{
    using k = algebra_issue::kind;
    if (t[a.top()] != a.top())
        report.issues.push_back({k::top_not_fixed, name, a.top(), 0});
    for (element x = 0; x < a.size(); ++x) {
        if (t[t[x]] != t[x])
            report.issues.push_back({k::not_idempotent, name, x, 0});
        if (!a.leq(t[x], x))
            report.issues.push_back({k::not_deflationary, name, x, 0});
        for (element y = x + 1; y < a.size(); ++y)
            if (t[x & y] != (t[x] & t[y]))
                report.issues.push_back({k::meet_not_preserved, name, x, y});
    }
}

} // namespace detail

inline algebra_report validate_algebra(const finite_algebra& a)
{
    using k = algebra_issue::kind;
    algebra_report report;
    for (agent_id i = 0; i < a.agent_count(); ++i)
        detail::check_interior(a, a.box_table(i), "box" + std::to_string(i), report);
    detail::check_interior(a, a.common_table(), "C", report);
    for (element x = 0; x < a.size(); ++x) {
        const element c = a.common(x);
        if (!a.leq(c, a.everyone(x) & a.everyone(c)))
            report.issues.push_back({k::c_above_unfolding, "mixed", x, 0});
        const element e = a.everyone(x);
        if (!a.leq(e & a.common(a.implies(x, e)), c))
            report.issues.push_back({k::induction_fails, "mixed", x, 0});
    }
    return report;
}

inline std::string describe(const finite_algebra& a, const algebra_issue& issue)
{
    using k = algebra_issue::kind;
    const std::string x = element_name(a, issue.x);
    switch (issue.what) {
    case k::top_not_fixed:
        return issue.op + ": 1 is not fixed";
    case k::meet_not_preserved:
        return issue.op + ": does not preserve the meet of " + x + " and " + element_name(a, issue.y);
    case k::not_idempotent:
        return issue.op + ": not idempotent at " + x;
    case k::not_deflationary:
        return issue.op + ": value at " + x + " is not below " + x;
    case k::c_above_unfolding:
        return "C " + x + " is not below E " + x + " & E C " + x;
    case k::induction_fails:
        return "E " + x + " & C(" + x + " -> E " + x + ") is not below C " + x;
    }
    return {};
}

// ---------------------------------------------------------------------------
// Fixed points

inline element e_op(const finite_algebra& a, element x) { return a.everyone(x); }

// Greatest fixed point of z -> E a & E z, by descending iteration from 1.
inline element gfp_ce(const finite_algebra& alg, element a)
{
    const element ea = alg.everyone(a);
    element z = alg.top();
    for (;;) {
        element next = ea & alg.everyone(z);
        if (next == z)
            return z;
        z = next;
    }
}

// Standardness through the sigma-completeness argument: in a finite algebra
// the join b of any sequence with a_j <= E d & E a_{j+1} satisfies
// b <= E d & E b, and every such b must lie below C d. Each step of the
// chain b <= E(d & b) <= E(d & b) & C(d & b -> E(d & b)) <= C(d & b) <= C d
// is checked.
inline bool check_standard_sigma(const finite_algebra& alg)
{
    for (element d = 0; d < alg.size(); ++d) {
        const element ed = alg.everyone(d);
        for (element b = 0; b < alg.size(); ++b) {
            if (!alg.leq(b, ed & alg.everyone(b)))
                continue;
            const element db = d & b;
            const element edb = alg.everyone(db);
            if (!alg.leq(b, edb) || !alg.leq(db, edb))
                return false;
            if (alg.common(alg.implies(db, edb)) != alg.top())
                return false;
            if (!alg.leq(edb & alg.common(alg.implies(db, edb)), alg.common(db)))
                return false;
            if (!alg.leq(alg.common(db), alg.common(d)) || !alg.leq(b, alg.common(d)))
                return false;
        }
    }
    return true;
}

// ---------------------------------------------------------------------------
// Valuations

class evaluation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class valuation {
public:
    explicit valuation(const finite_algebra& alg) : alg_(&alg) {}
    valuation(const finite_algebra& alg, std::map<var_index, element> assignment)
        : alg_(&alg), assignment_(std::move(assignment))
    {
        for (const auto& [v, x] : assignment_)
            check(v, x);
    }

    void assign(var_index v, element x)
    {
        check(v, x);
        assignment_[v] = x;
    }

    [[nodiscard]] const finite_algebra& algebra() const noexcept { return *alg_; }
    [[nodiscard]] const std::map<var_index, element>& assignment() const noexcept { return assignment_; }
    [[nodiscard]] std::optional<element> value_of(var_index v) const
    {
        auto it = assignment_.find(v);
        if (it == assignment_.end())
            return std::nullopt;
        return it->second;
    }

private:
    void check(var_index v, element x) const
    {
        if (x > alg_->top())
            throw algebra_error("value for p" + std::to_string(v) + " is not a carrier element");
    }

    const finite_algebra* alg_;
    std::map<var_index, element> assignment_;
};

inline element evaluate(const valuation& v, const formula& f)
{
    const finite_algebra& a = v.algebra();
    switch (f.kind()) {
    case op::var:
        if (auto x = v.value_of(f.variable()))
            return *x;
        throw evaluation_error("p" + std::to_string(f.variable()) + " is unassigned");
    case op::bot:
        return a.bottom();
    case op::imp:
        return a.implies(evaluate(v, f.lhs()), evaluate(v, f.rhs()));
    case op::box:
        if (f.agent() >= a.agent_count())
            throw evaluation_error("agent " + std::to_string(f.agent()) + " is beyond the algebra");
        return a.box(f.agent(), evaluate(v, f.body()));
    case op::common:
        return a.common(evaluate(v, f.body()));
    }
    return a.bottom();
}

// Calls fn(valuation) for every assignment of carrier elements to vars.
template <typename Fn>
void for_each_valuation(const finite_algebra& alg, const std::vector<var_index>& vars, Fn&& fn)
{
    std::vector<element> cur(vars.size(), 0);
    for (;;) {
        valuation v(alg);
        for (std::size_t k = 0; k < vars.size(); ++k)
            v.assign(vars[k], cur[k]);
        if (!fn(static_cast<const valuation&>(v)))
            return;
        std::size_t k = 0;
        while (k < vars.size() && cur[k] == alg.top()) {
            cur[k] = 0;
            ++k;
        }
        if (k == vars.size())
            return;
        ++cur[k];
    }
}

// ---------------------------------------------------------------------------
// Filters

class filter_handle {
public:
    filter_handle(const finite_algebra& alg, std::vector<element> generators)
        : generators_(std::move(generators)), members_(alg.size())
    {
        least_ = alg.top();
        for (element g : generators_) {
            if (g > alg.top())
                throw algebra_error("filter generator is not a carrier element");
            least_ &= g;
        }
        for (element x = 0; x < alg.size(); ++x)
            if (alg.leq(least_, x))
                members_.set(x);
    }

    [[nodiscard]] bool contains(element x) const { return x < members_.size() && members_.test(x); }
    [[nodiscard]] const element_set& members() const noexcept { return members_; }
    [[nodiscard]] const std::vector<element>& generators() const noexcept { return generators_; }
    // Meet of the generators; the filter is principal at this element.
    [[nodiscard]] element least() const noexcept { return least_; }

private:
    std::vector<element> generators_;
    element_set members_;
    element least_ = 0;
};

inline filter_handle filter_generated(const finite_algebra& alg, const std::vector<element>& generators)
{
    return {alg, generators};
}

struct consequence_outcome {
    bool holds = false;
    bool vacuous = false; // some sigma member is not 1
    element value = 0;    // value of the conclusion
    element filter_least = 0; // least element of the filter generated by the gamma values
};

// Single-algebra, single-valuation instance of Sigma;Gamma |= f.
inline consequence_outcome algebraic_consequence(const valuation& v, const std::vector<formula>& sigma,
                                                 const std::vector<formula>& gamma, const formula& f)
{
    const finite_algebra& alg = v.algebra();
    consequence_outcome out;
    for (const auto& s : sigma)
        if (evaluate(v, s) != alg.top()) {
            out.holds = true;
            out.vacuous = true;
            return out;
        }
    std::vector<element> gens;
    for (const auto& g : gamma)
        gens.push_back(evaluate(v, g));
    filter_handle filt(alg, gens);
    out.value = evaluate(v, f);
    out.filter_least = filt.least();
    out.holds = filt.contains(out.value);
    return out;
}

// ---------------------------------------------------------------------------
// Algebra files
//
//   agents N
//   atoms a b ...
//   boxI table: S1 -> T1; S2 -> T2; ...
//   boxI opens: S1 S2 ...
//   C table: ... | C opens: ...
//
// A subset is a comma-joined atom list without spaces, '-' for the empty set.

namespace detail {

inline element parse_subset(const std::vector<std::string>& atoms, const std::string& token)
{
    if (token == "-")
        return 0;
    element out = 0;
    for (const auto& name : text::split_all(token, ',')) {
        bool found = false;
        for (std::size_t k = 0; k < atoms.size(); ++k)
            if (atoms[k] == name) {
                out |= element{1} << k;
                found = true;
            }
        if (!found)
            throw algebra_error("unknown atom '" + name + "'");
    }
    return out;
}

inline finite_algebra::table parse_operator(const std::vector<std::string>& atoms, const std::string& kind,
                                            const std::string& body, const std::string& name)
{
    const std::size_t n = std::size_t{1} << atoms.size();
    if (kind == "opens") {
        std::vector<element> opens;
        for (const auto& tok : text::words(body))
            opens.push_back(parse_subset(atoms, tok));
        return finite_algebra::table_from_opens(atoms.size(), opens);
    }
    if (kind != "table")
        throw algebra_error(name + ": expected 'table' or 'opens', got '" + kind + "'");
    finite_algebra::table t(n, 0);
    std::vector<bool> seen(n, false);
    for (const auto& entry : text::split_all(body, ';')) {
        if (entry.empty())
            continue;
        auto arrow = entry.find("->");
        if (arrow == std::string::npos)
            throw algebra_error(name + ": table entry '" + entry + "' lacks '->'");
        element from = parse_subset(atoms, text::trim(entry.substr(0, arrow)));
        element to = parse_subset(atoms, text::trim(entry.substr(arrow + 2)));
        if (seen[from])
            throw algebra_error(name + ": element " + text::trim(entry.substr(0, arrow)) + " appears twice");
        seen[from] = true;
        t[from] = to;
    }
    for (std::size_t x = 0; x < n; ++x)
        if (!seen[x])
            throw algebra_error(name + ": table is missing an entry for some element");
    return t;
}

} // namespace detail

inline finite_algebra read_algebra(std::istream& in)
{
    std::optional<std::size_t> agents;
    std::vector<std::string> atoms;
    std::map<std::size_t, finite_algebra::table> boxes;
    std::optional<finite_algebra::table> common;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto where = "line " + std::to_string(line_no) + ": ";
        auto content = text::strip_comment(line);
        if (content.empty())
            continue;
        try {
            auto [head, rest] = text::split_head(content);
            if (head == "agents") {
                auto n = text::to_number(rest);
                if (!n || *n == 0)
                    throw algebra_error("agents needs a positive integer");
                agents = *n;
            } else if (head == "atoms") {
                atoms = text::words(rest);
                if (atoms.empty())
                    throw algebra_error("atoms needs at least one name");
                if (atoms.size() > max_atoms)
                    throw algebra_error("at most " + std::to_string(max_atoms) + " atoms are supported");
            } else {
                auto [kind, body] = text::split_at(rest, ':');
                if (atoms.empty())
                    throw algebra_error("operator before atoms");
                if (head == "C") {
                    if (common)
                        throw algebra_error("duplicate C line");
                    common = detail::parse_operator(atoms, kind, body, "C");
                } else if (head.rfind("box", 0) == 0) {
                    auto i = text::to_number(head.substr(3));
                    if (!i || !agents || *i >= *agents)
                        throw algebra_error("bad agent in '" + head + "'");
                    if (boxes.count(*i))
                        throw algebra_error("duplicate line for " + head);
                    boxes[*i] = detail::parse_operator(atoms, kind, body, head);
                } else {
                    throw algebra_error("unknown directive '" + head + "'");
                }
            }
        } catch (const algebra_error& e) {
            throw algebra_error(where + e.what());
        }
    }
    if (!agents)
        throw algebra_error("missing 'agents' line");
    if (atoms.empty())
        throw algebra_error("missing 'atoms' line");
    if (!common)
        throw algebra_error("missing C line");
    std::vector<finite_algebra::table> tables;
    for (std::size_t i = 0; i < *agents; ++i) {
        auto it = boxes.find(i);
        if (it == boxes.end())
            throw algebra_error("missing line for box" + std::to_string(i));
        tables.push_back(it->second);
    }
    return finite_algebra(std::move(atoms), std::move(tables), std::move(*common));
}

inline finite_algebra read_algebra(const std::string& text)
{
    std::istringstream in(text);
    return read_algebra(in);
}

inline void write_algebra(std::ostream& out, const finite_algebra& a)
{
    out << "agents " << a.agent_count() << "\natoms";
    for (const auto& n : a.atoms())
        out << ' ' << n;
    out << "\n";
    auto write_table = [&](const std::string& head, const finite_algebra::table& t) {
        out << head << " table:";
        for (element x = 0; x < a.size(); ++x)
            out << (x ? "; " : " ") << element_name(a, x) << " -> " << element_name(a, t[x]);
        out << "\n";
    };
    for (agent_id i = 0; i < a.agent_count(); ++i)
        write_table("box" + std::to_string(i), a.box_table(i));
    write_table("C", a.common_table());
}

} // namespace s4c
