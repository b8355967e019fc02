#pragma once

// Validity for S4C over its Kripke semantics by elimination of Hintikka
// sets, with countermodel extraction, and the derivability relations for
// finite premise sets built on top of it.
//
// Two engines share the elimination rules:
//   decide_valid       generates locally saturated sets on demand from the
//                      root, following negative boxes (the default);
//   decide_exhaustive  enumerates every fully decided set of the closure and
//                      uses the inclusion-of-boxed-positives relation between
//                      all of them (small inputs only; a reference oracle).

#include "s4c/kripke.hpp"
#include "s4c/syntax.hpp"

#include <bitset>
#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace s4c {

class resource_cap_exceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct decide_config {
    std::size_t max_closure = 24;
    std::size_t max_sets = std::size_t{1} << 16;
    // Countermodels with more worlds than this are returned unminimised.
    std::size_t minimize_limit = 128;
};

enum class verdict { valid, invalid };

inline const char* to_string(verdict v) { return v == verdict::valid ? "Valid" : "Invalid"; }

struct decision {
    verdict result = verdict::valid;
    formula query = formula::bot();
    // Present iff invalid; the query fails at `world`.
    std::optional<kripke_model> countermodel;
    world_id world = 0;
    std::size_t closure_size = 0;
    std::size_t sets = 0;
    [[nodiscard]] bool valid() const noexcept { return result == verdict::valid; }
};

// Closure indices are bit positions; 128 is the hard ceiling regardless of
// the configured cap.
inline constexpr std::size_t max_closure_bits = 128;
using signed_bits = std::bitset<max_closure_bits>;

// A set of signed closure members. `positives` and `negatives` are disjoint.
struct hintikka_set {
    signed_bits positives;
    signed_bits negatives;
    friend bool operator==(const hintikka_set&, const hintikka_set&) = default;
};

struct hintikka_hash {
    std::size_t operator()(const hintikka_set& h) const noexcept
    {
        std::hash<signed_bits> hb;
        return hb(h.positives) * 1000003u ^ hb(h.negatives);
    }
};

namespace detail {

// Closure members with indices of their immediate parts.
struct indexed_closure {
    closure_set members;
    std::vector<std::size_t> lhs, rhs;
    // For box_i x: the agent. For C x: index of box_i x and box_i C x per agent.
    std::vector<std::vector<std::size_t>> c_box_body, c_box_self;
    std::size_t bot = 0;

    indexed_closure(const formula& root, std::size_t agents) : members(root, agents)
    {
        const std::size_t n = members.size();
        lhs.assign(n, 0);
        rhs.assign(n, 0);
        c_box_body.assign(n, {});
        c_box_self.assign(n, {});
        for (std::size_t k = 0; k < n; ++k) {
            const formula& f = members[k];
            switch (f.kind()) {
            case op::bot:
                bot = k;
                break;
            case op::imp:
                lhs[k] = *members.index_of(f.lhs());
                rhs[k] = *members.index_of(f.rhs());
                break;
            case op::box:
                lhs[k] = *members.index_of(f.body());
                break;
            case op::common:
                lhs[k] = *members.index_of(f.body());
                for (std::size_t i = 0; i < agents; ++i) {
                    c_box_body[k].push_back(*members.index_of(formula::box(static_cast<agent_id>(i), f.body())));
                    c_box_self[k].push_back(*members.index_of(formula::box(static_cast<agent_id>(i), f)));
                }
                break;
            case op::var:
                break;
            }
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return members.size(); }
    [[nodiscard]] const formula& operator[](std::size_t k) const { return members[k]; }
};

inline void check_caps(const indexed_closure& cl, const decide_config& cfg)
{
    if (cl.size() > cfg.max_closure || cl.size() > max_closure_bits)
        throw resource_cap_exceeded("closure has " + std::to_string(cl.size()) + " members, cap is " +
                                    std::to_string(std::min(cfg.max_closure, max_closure_bits)));
}

// Valuation-free world description used when building countermodels.
struct world_spec {
    signed_bits positives;
};

// Builds a model whose worlds are the given sets, R_i = inclusion of
// positive box_i members, valuation from positive variables.
inline kripke_model model_from_sets(const indexed_closure& cl, const std::vector<signed_bits>& positives)
{
    const std::size_t n = positives.size();
    const std::size_t agents = cl.members.agent_count();
    std::vector<signed_bits> boxed(agents);
    for (std::size_t k = 0; k < cl.size(); ++k)
        if (cl[k].is(op::box))
            boxed[cl[k].agent()].set(k);
    std::vector<relation> rels(agents, relation(n));
    for (std::size_t i = 0; i < agents; ++i)
        for (std::size_t a = 0; a < n; ++a) {
            const signed_bits need = positives[a] & boxed[i];
            for (std::size_t b = 0; b < n; ++b)
                if ((need & ~positives[b]).none())
                    rels[i].add(a, b);
        }
    std::map<var_index, world_set> val;
    for (std::size_t k = 0; k < cl.size(); ++k)
        if (cl[k].is(op::var)) {
            world_set s(n);
            for (std::size_t w = 0; w < n; ++w)
                if (positives[w].test(k))
                    s.set(w);
            val.emplace(cl[k].variable(), std::move(s));
        }
    std::vector<std::string> names(n);
    for (std::size_t w = 0; w < n; ++w)
        names[w] = "w" + std::to_string(w);
    return kripke_model(std::move(names), std::move(rels), std::move(val));
}

inline kripke_model renamed_from_root(const kripke_model& m, world_id root)
{
    // Root becomes w0, the rest keep their relative order.
    std::vector<world_id> order{root};
    for (world_id w = 0; w < m.world_count(); ++w)
        if (w != root)
            order.push_back(w);
    std::vector<world_id> pos(m.world_count());
    for (std::size_t k = 0; k < order.size(); ++k)
        pos[order[k]] = k;
    const std::size_t n = m.world_count();
    std::vector<relation> rels(m.agent_count(), relation(n));
    for (std::size_t i = 0; i < m.agent_count(); ++i)
        for (auto [a, b] : m.agent_relation(i).pairs())
            rels[i].add(pos[a], pos[b]);
    std::map<var_index, world_set> val;
    for (const auto& [v, set] : m.valuation()) {
        world_set s(n);
        for (auto w = set.find_first(); w != world_set::npos; w = set.find_next(w))
            s.set(pos[w]);
        val.emplace(v, std::move(s));
    }
    std::vector<std::string> names(n);
    for (std::size_t w = 0; w < n; ++w)
        names[w] = "w" + std::to_string(w);
    return kripke_model(std::move(names), std::move(rels), std::move(val));
}

// Keeps the worlds reachable from root, deletes further worlds greedily while
// the query stays refuted at root, and renames with the root first.
inline kripke_model finish_countermodel(const kripke_model& full, world_id root, const formula& query,
                                        const decide_config& cfg)
{
    world_set keep(full.world_count());
    keep.set(root);
    keep |= full.s_relation().successors(root);
    auto [m, remap] = full.restrict_to(keep);
    world_id r = *remap[root];
    if (m.world_count() <= cfg.minimize_limit) {
        for (world_id w = m.world_count(); w-- > 0;) {
            if (w == r || m.world_count() == 1)
                continue;
            world_set k = m.all_worlds();
            k.reset(w);
            auto [smaller, rm] = m.restrict_to(k);
            if (!satisfies(smaller, *rm[r], query)) {
                r = *rm[r];
                m = std::move(smaller);
            }
        }
    }
    return renamed_from_root(m, r);
}

inline void certify(const decision& d)
{
    if (d.valid())
        return;
    const auto& m = *d.countermodel;
    if (!validate_model(m).ok())
        throw std::logic_error("extracted countermodel is not an S4C model");
    if (satisfies(m, d.world, d.query))
        throw std::logic_error("extracted countermodel does not refute the query");
}

// ---------------------------------------------------------------------------
// On-demand engine

class tableau {
public:
    tableau(const formula& query, std::size_t agents, const decide_config& cfg)
        : query_(query), root_(neg(query)), cl_(root_, agents), cfg_(cfg)
    {
        check_caps(cl_, cfg_);
        root_index_ = *cl_.members.index_of(root_);
        query_index_ = *cl_.members.index_of(query_);
    }

    decision run()
    {
        hintikka_set start;
        start.negatives.set(query_index_);
        const std::size_t root_pre = prestate_of(start);
        build();
        eliminate();
        decision out;
        out.query = query_;
        out.closure_size = cl_.size();
        out.sets = states_.size();
        std::optional<std::size_t> witness;
        for (std::size_t s : prestates_[root_pre].states)
            if (alive_[s]) {
                witness = s;
                break;
            }
        if (!witness) {
            out.result = verdict::valid;
            return out;
        }
        out.result = verdict::invalid;
        // Worlds: survivors reachable from the witness along generation edges.
        std::vector<std::size_t> order;
        std::vector<std::optional<std::size_t>> pos(states_.size());
        std::deque<std::size_t> queue{*witness};
        pos[*witness] = 0;
        order.push_back(*witness);
        while (!queue.empty()) {
            std::size_t s = queue.front();
            queue.pop_front();
            for (const auto& e : states_[s].edges)
                for (std::size_t t : prestates_[e.prestate].states)
                    if (alive_[t] && !pos[t]) {
                        pos[t] = order.size();
                        order.push_back(t);
                        queue.push_back(t);
                    }
        }
        std::vector<signed_bits> positives;
        for (std::size_t s : order)
            positives.push_back(states_[s].set.positives);
        auto full = model_from_sets(cl_, positives);
        out.countermodel = finish_countermodel(full, 0, query_, cfg_);
        out.world = 0;
        certify(out);
        return out;
    }

private:
    struct edge {
        std::size_t neg_box; // closure index of the negative box
        std::size_t prestate;
    };
    struct state {
        hintikka_set set;
        std::vector<edge> edges;
    };
    struct prestate {
        hintikka_set seed;
        std::vector<std::size_t> states;
        bool expanded = false;
    };

    std::size_t prestate_of(const hintikka_set& seed)
    {
        auto [it, fresh] = prestate_index_.try_emplace(seed, prestates_.size());
        if (fresh) {
            prestates_.push_back({seed, {}, false});
            pending_.push_back(it->second);
        }
        return it->second;
    }

    std::size_t state_of(const hintikka_set& set)
    {
        auto [it, fresh] = state_index_.try_emplace(set, states_.size());
        if (fresh) {
            if (states_.size() >= cfg_.max_sets)
                throw resource_cap_exceeded("more than " + std::to_string(cfg_.max_sets) + " Hintikka sets");
            states_.push_back({set, {}});
            fresh_states_.push_back(it->second);
        }
        return it->second;
    }

    // All minimal saturated consistent extensions of seed.
    void expand(hintikka_set h, signed_bits done_p, signed_bits done_n, std::vector<hintikka_set>& out)
    {
        for (;;) {
            if ((h.positives & h.negatives).any() || h.positives.test(cl_.bot))
                return;
            const signed_bits todo_p = h.positives & ~done_p;
            const signed_bits todo_n = h.negatives & ~done_n;
            if (todo_p.none() && todo_n.none()) {
                out.push_back(h);
                return;
            }
            const std::size_t k = first(todo_p.any() ? todo_p : todo_n);
            const bool positive = todo_p.any();
            const formula& f = cl_[k];
            if (positive) {
                done_p.set(k);
                switch (f.kind()) {
                case op::var:
                case op::bot:
                    break;
                case op::imp: {
                    const std::size_t a = cl_.lhs[k], b = cl_.rhs[k];
                    if (h.negatives.test(a) || h.positives.test(b))
                        break;
                    hintikka_set left = h;
                    left.negatives.set(a);
                    expand(left, done_p, done_n, out);
                    h.positives.set(a);
                    h.positives.set(b);
                    break;
                }
                case op::box:
                    h.positives.set(cl_.lhs[k]);
                    break;
                case op::common:
                    h.positives.set(cl_.lhs[k]);
                    for (std::size_t x : cl_.c_box_body[k])
                        h.positives.set(x);
                    for (std::size_t x : cl_.c_box_self[k])
                        h.positives.set(x);
                    break;
                }
            } else {
                done_n.set(k);
                switch (f.kind()) {
                case op::var:
                case op::bot:
                case op::box:
                    break;
                case op::imp:
                    h.positives.set(cl_.lhs[k]);
                    h.negatives.set(cl_.rhs[k]);
                    break;
                case op::common: {
                    for (std::size_t x : cl_.c_box_self[k])
                        h.negatives.set(x);
                    const std::size_t body = cl_.lhs[k];
                    if (h.negatives.test(body) || h.positives.test(body))
                        break;
                    hintikka_set left = h;
                    left.negatives.set(body);
                    expand(left, done_p, done_n, out);
                    h.positives.set(body);
                    break;
                }
                }
            }
        }
    }

    static std::size_t first(const signed_bits& b)
    {
        for (std::size_t k = 0; k < b.size(); ++k)
            if (b.test(k))
                return k;
        return b.size();
    }

    void build()
    {
        std::vector<signed_bits> boxed(cl_.members.agent_count());
        for (std::size_t k = 0; k < cl_.size(); ++k)
            if (cl_[k].is(op::box))
                boxed[cl_[k].agent()].set(k);
        while (!pending_.empty() || !fresh_states_.empty()) {
            while (!pending_.empty()) {
                std::size_t p = pending_.front();
                pending_.pop_front();
                std::vector<hintikka_set> ext;
                expand(prestates_[p].seed, {}, {}, ext);
                for (const auto& h : ext) {
                    std::size_t s = state_of(h);
                    prestates_[p].states.push_back(s);
                }
                prestates_[p].expanded = true;
            }
            while (!fresh_states_.empty()) {
                std::size_t s = fresh_states_.front();
                fresh_states_.pop_front();
                const hintikka_set h = states_[s].set;
                for (std::size_t k = 0; k < cl_.size(); ++k) {
                    if (!h.negatives.test(k) || !cl_[k].is(op::box))
                        continue;
                    hintikka_set seed;
                    seed.positives = h.positives & boxed[cl_[k].agent()];
                    seed.negatives.set(cl_.lhs[k]);
                    std::size_t p = prestate_of(seed);
                    states_[s].edges.push_back({k, p});
                }
            }
        }
    }

    void eliminate()
    {
        const std::size_t n = states_.size();
        alive_.assign(n, true);
        std::vector<std::vector<std::size_t>> preds(n);
        for (std::size_t s = 0; s < n; ++s)
            for (const auto& e : states_[s].edges)
                for (std::size_t t : prestates_[e.prestate].states)
                    preds[t].push_back(s);
        std::vector<std::size_t> eventualities;
        for (std::size_t k = 0; k < cl_.size(); ++k)
            if (cl_[k].is(op::common))
                eventualities.push_back(k);
        for (bool changed = true; changed;) {
            changed = false;
            // Negative C first: keep only sets with a path to the body failing.
            for (std::size_t c : eventualities) {
                const std::size_t body = cl_.lhs[c];
                std::vector<bool> good(n, false);
                std::deque<std::size_t> work;
                for (std::size_t s = 0; s < n; ++s)
                    if (alive_[s] && states_[s].set.negatives.test(body)) {
                        good[s] = true;
                        work.push_back(s);
                    }
                while (!work.empty()) {
                    std::size_t t = work.front();
                    work.pop_front();
                    for (std::size_t s : preds[t])
                        if (alive_[s] && !good[s]) {
                            good[s] = true;
                            work.push_back(s);
                        }
                }
                for (std::size_t s = 0; s < n; ++s)
                    if (alive_[s] && states_[s].set.negatives.test(c) && !good[s]) {
                        alive_[s] = false;
                        changed = true;
                    }
            }
            for (std::size_t s = 0; s < n; ++s) {
                if (!alive_[s])
                    continue;
                for (const auto& e : states_[s].edges) {
                    bool any = false;
                    for (std::size_t t : prestates_[e.prestate].states)
                        if (alive_[t]) {
                            any = true;
                            break;
                        }
                    if (!any) {
                        alive_[s] = false;
                        changed = true;
                        break;
                    }
                }
            }
        }
    }

    formula query_;
    formula root_;
    indexed_closure cl_;
    decide_config cfg_;
    std::size_t root_index_ = 0;
    std::size_t query_index_ = 0;
    std::vector<state> states_;
    std::vector<prestate> prestates_;
    std::unordered_map<hintikka_set, std::size_t, hintikka_hash> state_index_;
    std::unordered_map<hintikka_set, std::size_t, hintikka_hash> prestate_index_;
    std::deque<std::size_t> pending_;
    std::deque<std::size_t> fresh_states_;
    std::vector<bool> alive_;
};

} // namespace detail

inline decision decide_valid(const formula& f, std::size_t agent_count, const decide_config& cfg = {})
{
    if (agent_count == 0)
        throw std::invalid_argument("agent set must be non-empty");
    if (auto m = max_agent(f); m && *m >= agent_count)
        throw std::invalid_argument("formula mentions agent " + std::to_string(*m) + " but only " +
                                    std::to_string(agent_count) + " agents exist");
    return detail::tableau(f, agent_count, cfg).run();
}

// ---------------------------------------------------------------------------
// Reference engine over fully decided sets

// Every fully decided Hintikka set of closure(~f), in enumeration order.
inline std::vector<hintikka_set> hintikka_sets(const formula& f, std::size_t agent_count,
                                               const decide_config& cfg = {})
{
    detail::indexed_closure cl(neg(f), agent_count);
    detail::check_caps(cl, cfg);
    std::vector<hintikka_set> out;
    hintikka_set cur;
    std::function<void(std::size_t)> go = [&](std::size_t k) {
        if (k == cl.size()) {
            if (out.size() >= cfg.max_sets)
                throw resource_cap_exceeded("more than " + std::to_string(cfg.max_sets) + " Hintikka sets");
            out.push_back(cur);
            return;
        }
        const formula& g = cl[k];
        auto assign = [&](bool value) {
            if (value) {
                cur.positives.set(k);
                go(k + 1);
                cur.positives.reset(k);
            } else {
                cur.negatives.set(k);
                go(k + 1);
                cur.negatives.reset(k);
            }
        };
        switch (g.kind()) {
        case op::bot:
            assign(false);
            break;
        case op::imp:
            assign(cur.negatives.test(cl.lhs[k]) || cur.positives.test(cl.rhs[k]));
            break;
        case op::var:
            assign(false);
            assign(true);
            break;
        case op::box: {
            const std::size_t body = cl.lhs[k];
            // box_i C psi is forced by C psi.
            if (!(cl[body].is(op::common) && cur.positives.test(body)))
                assign(false);
            if (cur.positives.test(body))
                assign(true);
            break;
        }
        case op::common: {
            const std::size_t body = cl.lhs[k];
            assign(false);
            bool ok = cur.positives.test(body);
            for (std::size_t x : cl.c_box_body[k])
                ok = ok && cur.positives.test(x);
            if (ok)
                assign(true);
            break;
        }
        }
    };
    go(0);
    return out;
}

inline decision decide_exhaustive(const formula& f, std::size_t agent_count, const decide_config& cfg = {})
{
    if (agent_count == 0)
        throw std::invalid_argument("agent set must be non-empty");
    detail::indexed_closure cl(neg(f), agent_count);
    auto sets = hintikka_sets(f, agent_count, cfg);
    const std::size_t n = sets.size();
    const std::size_t query = *cl.members.index_of(f);
    std::vector<signed_bits> boxed(agent_count);
    for (std::size_t k = 0; k < cl.size(); ++k)
        if (cl[k].is(op::box))
            boxed[cl[k].agent()].set(k);
    auto arrow = [&](std::size_t i, std::size_t a, std::size_t b) {
        return ((sets[a].positives & boxed[i]) & ~sets[b].positives).none();
    };
    std::vector<bool> alive(n, true);
    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t c = 0; c < cl.size(); ++c) {
            if (!cl[c].is(op::common))
                continue;
            const std::size_t body = cl.lhs[c];
            std::vector<bool> good(n, false);
            for (std::size_t s = 0; s < n; ++s)
                good[s] = alive[s] && sets[s].negatives.test(body);
            for (bool grew = true; grew;) {
                grew = false;
                for (std::size_t s = 0; s < n; ++s) {
                    if (!alive[s] || good[s])
                        continue;
                    for (std::size_t t = 0; t < n && !good[s]; ++t)
                        if (good[t])
                            for (std::size_t i = 0; i < agent_count; ++i)
                                if (arrow(i, s, t)) {
                                    good[s] = true;
                                    grew = true;
                                    break;
                                }
                }
            }
            for (std::size_t s = 0; s < n; ++s)
                if (alive[s] && sets[s].negatives.test(c) && !good[s]) {
                    alive[s] = false;
                    changed = true;
                }
        }
        for (std::size_t s = 0; s < n; ++s) {
            if (!alive[s])
                continue;
            for (std::size_t k = 0; k < cl.size() && alive[s]; ++k) {
                if (!cl[k].is(op::box) || !sets[s].negatives.test(k))
                    continue;
                bool any = false;
                for (std::size_t t = 0; t < n && !any; ++t)
                    any = alive[t] && sets[t].negatives.test(cl.lhs[k]) && arrow(cl[k].agent(), s, t);
                if (!any) {
                    alive[s] = false;
                    changed = true;
                }
            }
        }
    }
    decision out;
    out.query = f;
    out.closure_size = cl.size();
    out.sets = n;
    std::optional<std::size_t> witness;
    for (std::size_t s = 0; s < n && !witness; ++s)
        if (alive[s] && sets[s].negatives.test(query))
            witness = s;
    if (!witness)
        return out;
    out.result = verdict::invalid;
    std::vector<signed_bits> positives;
    std::size_t root = 0;
    for (std::size_t s = 0; s < n; ++s)
        if (alive[s]) {
            if (s == *witness)
                root = positives.size();
            positives.push_back(sets[s].positives);
        }
    auto full = detail::model_from_sets(cl, positives);
    out.countermodel = detail::finish_countermodel(full, root, f, cfg);
    out.world = 0;
    detail::certify(out);
    return out;
}

// ---------------------------------------------------------------------------
// Derivability for finite premise sets

// Premise conjunctions are omitted when the premise set is empty, so the
// degenerate cases are literally decide_valid(f).
inline formula local_query(const std::vector<formula>& gamma, const formula& f)
{
    return gamma.empty() ? f : formula::imp(big_conj(gamma), f);
}

inline formula global_query(const std::vector<formula>& sigma, const formula& f)
{
    return sigma.empty() ? f : formula::imp(formula::common(big_conj(sigma)), f);
}

inline formula mixed_query(const std::vector<formula>& sigma, const std::vector<formula>& gamma, const formula& f)
{
    return global_query(sigma, local_query(gamma, f));
}

inline decision derives_l(const std::vector<formula>& gamma, const formula& f, std::size_t agent_count,
                          const decide_config& cfg = {})
{
    return decide_valid(local_query(gamma, f), agent_count, cfg);
}

inline decision derives_g(const std::vector<formula>& sigma, const formula& f, std::size_t agent_count,
                          const decide_config& cfg = {})
{
    return decide_valid(global_query(sigma, f), agent_count, cfg);
}

inline decision derives_mixed(const std::vector<formula>& sigma, const std::vector<formula>& gamma, const formula& f,
                              std::size_t agent_count, const decide_config& cfg = {})
{
    return decide_valid(mixed_query(sigma, gamma, f), agent_count, cfg);
}

} // namespace s4c
