#pragma once

#include "s4c/syntax.hpp"
#include "s4c/text.hpp"

#include <boost/dynamic_bitset.hpp>

#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace s4c {

using world_id = std::size_t;
using world_set = boost::dynamic_bitset<>;

// Binary relation over worlds 0..n-1 stored as successor rows.
class relation {
public:
    relation() = default;
    explicit relation(std::size_t n) : rows_(n, world_set(n)) {}

    static relation identity(std::size_t n)
    {
        relation r(n);
        for (std::size_t w = 0; w < n; ++w)
            r.add(w, w);
        return r;
    }

    [[nodiscard]] std::size_t size() const noexcept { return rows_.size(); }
    [[nodiscard]] bool contains(world_id a, world_id b) const { return rows_[a].test(b); }
    void add(world_id a, world_id b) { rows_[a].set(b); }
    [[nodiscard]] const world_set& successors(world_id a) const { return rows_[a]; }
    world_set& successors(world_id a) { return rows_[a]; }

    relation& operator|=(const relation& other)
    {
        for (std::size_t w = 0; w < rows_.size(); ++w)
            rows_[w] |= other.rows_[w];
        return *this;
    }

    [[nodiscard]] std::vector<std::pair<world_id, world_id>> pairs() const
    {
        std::vector<std::pair<world_id, world_id>> out;
        for (std::size_t a = 0; a < rows_.size(); ++a)
            for (auto b = rows_[a].find_first(); b != world_set::npos; b = rows_[a].find_next(b))
                out.emplace_back(a, b);
        return out;
    }

    friend bool operator==(const relation&, const relation&) = default;

private:
    std::vector<world_set> rows_;
};

// Least transitive superset (Warshall over bitset rows).
inline relation transitive_closure(const relation& rel)
{
    relation out = rel;
    const std::size_t n = rel.size();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (out.successors(i).test(k))
                out.successors(i) |= out.successors(k);
    return out;
}

class model_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A finite Kripke model with one relation per agent. S, the transitive
// closure of the union of the agent relations, is derived on construction
// and cached; it can be supplied explicitly so that corrupted inputs can be
// represented and reported by validate_model.
class kripke_model {
public:
    kripke_model(std::vector<std::string> world_names, std::vector<relation> relations,
                 std::map<var_index, world_set> valuation)
        : names_(std::move(world_names)), relations_(std::move(relations)), valuation_(std::move(valuation))
    {
        check_shape();
        s_relation_ = derive_s();
    }

    kripke_model(std::vector<std::string> world_names, std::vector<relation> relations,
                 std::map<var_index, world_set> valuation, relation s_relation)
        : names_(std::move(world_names)), relations_(std::move(relations)), valuation_(std::move(valuation)),
          s_relation_(std::move(s_relation))
    {
        check_shape();
        if (s_relation_.size() != names_.size())
            throw model_error("S relation size does not match world count");
    }

    [[nodiscard]] std::size_t world_count() const noexcept { return names_.size(); }
    [[nodiscard]] std::size_t agent_count() const noexcept { return relations_.size(); }
    [[nodiscard]] const std::vector<std::string>& world_names() const noexcept { return names_; }
    [[nodiscard]] const std::string& world_name(world_id w) const { return names_.at(w); }
    [[nodiscard]] const relation& agent_relation(agent_id i) const { return relations_.at(i); }
    [[nodiscard]] const std::vector<relation>& relations() const noexcept { return relations_; }
    [[nodiscard]] const relation& s_relation() const noexcept { return s_relation_; }
    [[nodiscard]] const std::map<var_index, world_set>& valuation() const noexcept { return valuation_; }

    [[nodiscard]] world_set truth_of(var_index v) const
    {
        auto it = valuation_.find(v);
        return it == valuation_.end() ? world_set(world_count()) : it->second;
    }

    [[nodiscard]] std::optional<world_id> find_world(const std::string& name) const
    {
        for (std::size_t w = 0; w < names_.size(); ++w)
            if (names_[w] == name)
                return w;
        return std::nullopt;
    }

    [[nodiscard]] world_set all_worlds() const
    {
        world_set all(world_count());
        all.set();
        return all;
    }

    [[nodiscard]] relation derive_s() const
    {
        relation u(world_count());
        for (const auto& r : relations_)
            u |= r;
        return transitive_closure(u);
    }

    // Submodel on the given worlds (relations and valuation restricted,
    // S re-derived). The returned map sends old ids to new ids.
    [[nodiscard]] std::pair<kripke_model, std::vector<std::optional<world_id>>> restrict_to(const world_set& keep) const
    {
        std::vector<std::optional<world_id>> remap(world_count());
        std::vector<std::string> names;
        for (auto w = keep.find_first(); w != world_set::npos; w = keep.find_next(w)) {
            remap[w] = names.size();
            names.push_back(names_[w]);
        }
        std::vector<relation> rels(agent_count(), relation(names.size()));
        for (std::size_t i = 0; i < agent_count(); ++i)
            for (auto [a, b] : relations_[i].pairs())
                if (remap[a] && remap[b])
                    rels[i].add(*remap[a], *remap[b]);
        std::map<var_index, world_set> val;
        for (const auto& [v, set] : valuation_) {
            world_set s(names.size());
            for (auto w = set.find_first(); w != world_set::npos; w = set.find_next(w))
                if (remap[w])
                    s.set(*remap[w]);
            val.emplace(v, s);
        }
        return {kripke_model(std::move(names), std::move(rels), std::move(val)), std::move(remap)};
    }

private:
    void check_shape() const
    {
        if (names_.empty())
            throw model_error("model needs at least one world");
        if (relations_.empty())
            throw model_error("model needs at least one agent");
        for (const auto& r : relations_)
            if (r.size() != names_.size())
                throw model_error("relation size does not match world count");
        for (const auto& [v, s] : valuation_)
            if (s.size() != names_.size())
                throw model_error("valuation of p" + std::to_string(v) + " has wrong width");
    }

    std::vector<std::string> names_;
    std::vector<relation> relations_;
    std::map<var_index, world_set> valuation_;
    relation s_relation_;
};

// ---------------------------------------------------------------------------
// Validation

struct model_issue {
    enum class kind { not_reflexive, not_transitive, s_missing_pair, s_extra_pair };
    kind what;
    std::optional<agent_id> agent; // empty for S issues
    world_id a;
    world_id b;
    world_id via = 0; // middle world of a transitivity violation
};

struct model_report {
    std::vector<model_issue> issues;
    [[nodiscard]] bool ok() const noexcept { return issues.empty(); }
};

inline model_report validate_model(const kripke_model& m)
{
    model_report report;
    const std::size_t n = m.world_count();
    for (agent_id i = 0; i < m.agent_count(); ++i) {
        const relation& r = m.agent_relation(i);
        for (world_id w = 0; w < n; ++w)
            if (!r.contains(w, w))
                report.issues.push_back({model_issue::kind::not_reflexive, i, w, w});
        for (world_id a = 0; a < n; ++a)
            for (auto b = r.successors(a).find_first(); b != world_set::npos; b = r.successors(a).find_next(b))
                for (auto c = r.successors(b).find_first(); c != world_set::npos; c = r.successors(b).find_next(c))
                    if (!r.contains(a, c))
                        report.issues.push_back({model_issue::kind::not_transitive, i, a, c, b});
    }
    relation expected = m.derive_s();
    for (world_id a = 0; a < n; ++a)
        for (world_id b = 0; b < n; ++b) {
            bool want = expected.contains(a, b);
            bool have = m.s_relation().contains(a, b);
            if (want && !have)
                report.issues.push_back({model_issue::kind::s_missing_pair, std::nullopt, a, b});
            else if (!want && have)
                report.issues.push_back({model_issue::kind::s_extra_pair, std::nullopt, a, b});
        }
    return report;
}

inline std::string describe(const kripke_model& m, const model_issue& issue)
{
    auto pair = [&](world_id a, world_id b) { return "(" + m.world_name(a) + "," + m.world_name(b) + ")"; };
    std::string rel = issue.agent ? "R" + std::to_string(*issue.agent) : "S";
    switch (issue.what) {
    case model_issue::kind::not_reflexive:
        return rel + " is not reflexive: missing " + pair(issue.a, issue.b);
    case model_issue::kind::not_transitive:
        return rel + " is not transitive: has " + pair(issue.a, issue.via) + " and " + pair(issue.via, issue.b) +
               " but not " + pair(issue.a, issue.b);
    case model_issue::kind::s_missing_pair:
        return "S is not the transitive closure: missing " + pair(issue.a, issue.b);
    case model_issue::kind::s_extra_pair:
        return "S is not the transitive closure: extra " + pair(issue.a, issue.b);
    }
    return {};
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

// Computes the set of worlds satisfying each subformula. C psi is evaluated
// either as "psi at every S-successor" or as the greatest fixed point of
// Z -> [[E psi]] & pre_E(Z).
class kripke_evaluator {
public:
    enum class common_rule { s_box, gfp };

    kripke_evaluator(const kripke_model& m, common_rule rule) : m_(m), rule_(rule) {}

    const world_set& eval(const formula& f)
    {
        if (auto it = memo_.find(f); it != memo_.end())
            return it->second;
        world_set out = compute(f);
        return memo_.emplace(f, std::move(out)).first->second;
    }

private:
    [[nodiscard]] world_set box_of(const relation& r, const world_set& target) const
    {
        world_set out(m_.world_count());
        for (world_id w = 0; w < m_.world_count(); ++w)
            if (r.successors(w).is_subset_of(target))
                out.set(w);
        return out;
    }

    [[nodiscard]] world_set everyone_of(const world_set& target) const
    {
        world_set out = m_.all_worlds();
        for (const auto& r : m_.relations())
            out &= box_of(r, target);
        return out;
    }

    world_set compute(const formula& f)
    {
        const std::size_t n = m_.world_count();
        switch (f.kind()) {
        case op::var:
            return m_.truth_of(f.variable());
        case op::bot:
            return world_set(n);
        case op::imp: {
            world_set lhs = eval(f.lhs());
            return ~lhs | eval(f.rhs());
        }
        case op::box:
            if (f.agent() >= m_.agent_count())
                throw model_error("formula mentions agent " + std::to_string(f.agent()) + " beyond the model");
            return box_of(m_.agent_relation(f.agent()), eval(f.body()));
        case op::common: {
            world_set body = eval(f.body());
            if (rule_ == common_rule::s_box) {
                world_set out = body & box_of(m_.s_relation(), body);
                return out;
            }
            world_set e_body = everyone_of(body);
            world_set z = m_.all_worlds();
            for (;;) {
                world_set next = e_body & everyone_of(z);
                if (next == z)
                    return z;
                z = std::move(next);
            }
        }
        }
        return world_set(n);
    }

    const kripke_model& m_;
    common_rule rule_;
    std::unordered_map<formula, world_set, formula_hash> memo_;
};

} // namespace detail

// Worlds satisfying f, with C read as a box over S.
inline world_set truth_set(const kripke_model& m, const formula& f)
{
    detail::kripke_evaluator ev(m, detail::kripke_evaluator::common_rule::s_box);
    return ev.eval(f);
}

inline bool satisfies(const kripke_model& m, world_id w, const formula& f)
{
    if (w >= m.world_count())
        throw model_error("unknown world id " + std::to_string(w));
    return truth_set(m, f).test(w);
}

// Worlds satisfying f, with C computed as a greatest fixed point.
inline world_set satisfies_gfp(const kripke_model& m, const formula& f)
{
    detail::kripke_evaluator ev(m, detail::kripke_evaluator::common_rule::gfp);
    return ev.eval(f);
}

inline bool globally_true(const kripke_model& m, const formula& f) { return truth_set(m, f).all(); }

struct counterexample {
    std::size_t model_index;
    world_id world;
};

// Sound refuter only: finds a model/world where every sigma holds globally,
// every gamma holds at the world, and f fails there.
inline std::optional<counterexample> refute_consequence(const std::vector<kripke_model>& models,
                                                        const std::vector<formula>& sigma,
                                                        const std::vector<formula>& gamma, const formula& f)
{
    for (std::size_t k = 0; k < models.size(); ++k) {
        const auto& m = models[k];
        detail::kripke_evaluator ev(m, detail::kripke_evaluator::common_rule::s_box);
        bool sigma_ok = true;
        for (const auto& s : sigma)
            if (!ev.eval(s).all()) {
                sigma_ok = false;
                break;
            }
        if (!sigma_ok)
            continue;
        world_set candidates = m.all_worlds();
        for (const auto& g : gamma)
            candidates &= ev.eval(g);
        candidates &= ~ev.eval(f);
        if (auto w = candidates.find_first(); w != world_set::npos)
            return counterexample{k, w};
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Model files
//
//   agents N
//   worlds w0 w1 ...
//   rel i: (a,b) (c,d) ...
//   val pK: w0 w1 ...
//
// S is never read; it is always derived.

inline kripke_model read_model(std::istream& in)
{
    std::optional<std::size_t> agents;
    std::vector<std::string> names;
    std::vector<std::vector<std::pair<std::string, std::string>>> rel_pairs;
    std::vector<bool> rel_seen;
    std::vector<std::pair<var_index, std::vector<std::string>>> vals;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fail = [&](const std::string& msg) { throw model_error("line " + std::to_string(line_no) + ": " + msg); };
        auto content = text::strip_comment(line);
        if (content.empty())
            continue;
        auto [head, rest] = text::split_head(content);
        if (head == "agents") {
            auto n = text::to_number(rest);
            if (!n || *n == 0)
                fail("agents needs a positive integer");
            agents = *n;
            rel_pairs.assign(*n, {});
            rel_seen.assign(*n, false);
        } else if (head == "worlds") {
            names = text::words(rest);
            if (names.empty())
                fail("worlds needs at least one name");
        } else if (head == "rel") {
            if (!agents)
                fail("rel before agents");
            auto [idx_text, body] = text::split_at(rest, ':');
            auto idx = text::to_number(idx_text);
            if (!idx || *idx >= *agents)
                fail("bad agent index in rel line");
            if (rel_seen[*idx])
                fail("duplicate rel line for agent " + std::to_string(*idx));
            rel_seen[*idx] = true;
            for (const auto& tok : text::words(body)) {
                if (tok.size() < 5 || tok.front() != '(' || tok.back() != ')')
                    fail("malformed pair '" + tok + "'");
                auto [a, b] = text::split_at(tok.substr(1, tok.size() - 2), ',');
                if (a.empty() || b.empty())
                    fail("malformed pair '" + tok + "'");
                rel_pairs[*idx].emplace_back(a, b);
            }
        } else if (head == "val") {
            auto [var_text, body] = text::split_at(rest, ':');
            if (var_text.size() < 2 || var_text[0] != 'p')
                fail("val needs a variable like p0");
            auto v = text::to_number(var_text.substr(1));
            if (!v)
                fail("bad variable '" + var_text + "'");
            vals.emplace_back(static_cast<var_index>(*v), text::words(body));
        } else {
            fail("unknown directive '" + head + "'");
        }
    }
    if (!agents)
        throw model_error("missing 'agents' line");
    if (names.empty())
        throw model_error("missing 'worlds' line");
    std::map<std::string, world_id> index;
    for (std::size_t w = 0; w < names.size(); ++w)
        if (!index.emplace(names[w], w).second)
            throw model_error("duplicate world '" + names[w] + "'");
    auto lookup = [&](const std::string& name) {
        auto it = index.find(name);
        if (it == index.end())
            throw model_error("unknown world '" + name + "'");
        return it->second;
    };
    std::vector<relation> rels(*agents, relation(names.size()));
    for (std::size_t i = 0; i < *agents; ++i)
        for (const auto& [a, b] : rel_pairs[i])
            rels[i].add(lookup(a), lookup(b));
    std::map<var_index, world_set> valuation;
    for (const auto& [v, ws] : vals) {
        world_set s(names.size());
        for (const auto& w : ws)
            s.set(lookup(w));
        if (!valuation.emplace(v, s).second)
            throw model_error("duplicate val line for p" + std::to_string(v));
    }
    return kripke_model(std::move(names), std::move(rels), std::move(valuation));
}

inline kripke_model read_model(const std::string& text)
{
    std::istringstream in(text);
    return read_model(in);
}

inline void write_model(std::ostream& out, const kripke_model& m)
{
    out << "agents " << m.agent_count() << "\n";
    out << "worlds";
    for (const auto& n : m.world_names())
        out << ' ' << n;
    out << "\n";
    for (agent_id i = 0; i < m.agent_count(); ++i) {
        out << "rel " << i << ":";
        for (auto [a, b] : m.agent_relation(i).pairs())
            out << " (" << m.world_name(a) << "," << m.world_name(b) << ")";
        out << "\n";
    }
    for (const auto& [v, s] : m.valuation()) {
        out << "val p" << v << ":";
        for (auto w = s.find_first(); w != world_set::npos; w = s.find_next(w))
            out << ' ' << m.world_name(w);
        out << "\n";
    }
}

inline std::string to_text(const kripke_model& m)
{
    std::ostringstream out;
    write_model(out, m);
    return out.str();
}

} // namespace s4c
