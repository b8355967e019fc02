#pragma once

// Proof certificates: Hilbert derivations plus omega-rule applications whose
// premise family is eventually periodic (a lasso). Checking, axiom-schema
// recognition, algebraic soundness sweeps and an s-expression file format.

#include "s4c/algebra.hpp"
#include "s4c/syntax.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace s4c {

enum class schema { i, ii, iii, iv, v, vi, viii };

inline const std::vector<schema>& all_schemas()
{
    static const std::vector<schema> all{schema::i,  schema::ii, schema::iii, schema::iv,
                                         schema::v,  schema::vi, schema::viii};
    return all;
}

inline const char* to_string(schema s)
{
    switch (s) {
    case schema::i: return "i";
    case schema::ii: return "ii";
    case schema::iii: return "iii";
    case schema::iv: return "iv";
    case schema::v: return "v";
    case schema::vi: return "vi";
    case schema::viii: return "viii";
    }
    return "?";
}

inline std::optional<schema> parse_schema(const std::string& s)
{
    for (schema x : all_schemas())
        if (s == to_string(x))
            return x;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Certificates

enum class rule { axiom, assumption, mp, nec, omega };

inline const char* to_string(rule r)
{
    switch (r) {
    case rule::axiom: return "ax";
    case rule::assumption: return "asm";
    case rule::mp: return "mp";
    case rule::nec: return "nec";
    case rule::omega: return "omega";
    }
    return "?";
}

struct proof_node;
using proof = std::shared_ptr<const proof_node>;

struct proof_node {
    rule kind = rule::axiom;
    formula conclusion = formula::bot();
    schema axiom = schema::i;            // axiom
    formula psi = formula::bot();        // omega
    std::vector<proof> children;         // mp: major, minor; nec: child; omega: premises
    std::size_t loop_index = 0;          // omega

    static proof make_axiom(schema s, formula f)
    {
        auto n = std::make_shared<proof_node>();
        n->kind = rule::axiom;
        n->axiom = s;
        n->conclusion = std::move(f);
        return n;
    }
    static proof make_assumption(formula f)
    {
        auto n = std::make_shared<proof_node>();
        n->kind = rule::assumption;
        n->conclusion = std::move(f);
        return n;
    }
    static proof make_mp(proof major, proof minor, formula f)
    {
        auto n = std::make_shared<proof_node>();
        n->kind = rule::mp;
        n->children = {std::move(major), std::move(minor)};
        n->conclusion = std::move(f);
        return n;
    }
    static proof make_nec(proof child, formula f)
    {
        auto n = std::make_shared<proof_node>();
        n->kind = rule::nec;
        n->children = {std::move(child)};
        n->conclusion = std::move(f);
        return n;
    }
    static proof make_omega(formula psi, std::vector<proof> premises, std::size_t loop_index, formula f)
    {
        auto n = std::make_shared<proof_node>();
        n->kind = rule::omega;
        n->psi = std::move(psi);
        n->children = std::move(premises);
        n->loop_index = loop_index;
        n->conclusion = std::move(f);
        return n;
    }
};

// ---------------------------------------------------------------------------
// Axiom recognition

class tautology_refused : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t max_tautology_atoms = 16;

namespace detail {

inline void propositional_atoms(const formula& f, std::vector<formula>& atoms)
{
    if (f.is(op::bot))
        return;
    if (f.is(op::imp)) {
        propositional_atoms(f.lhs(), atoms);
        propositional_atoms(f.rhs(), atoms);
        return;
    }
    if (std::find(atoms.begin(), atoms.end(), f) == atoms.end())
        atoms.push_back(f);
}

inline bool eval_skeleton(const formula& f, const std::vector<formula>& atoms, std::uint32_t bits)
{
    if (f.is(op::bot))
        return false;
    if (f.is(op::imp))
        return !eval_skeleton(f.lhs(), atoms, bits) || eval_skeleton(f.rhs(), atoms, bits);
    auto k = static_cast<std::size_t>(std::find(atoms.begin(), atoms.end(), f) - atoms.begin());
    return (bits >> k) & 1u;
}

} // namespace detail

// Truth-table check with variables and maximal modal subformulas as atoms.
inline bool is_tautology(const formula& f)
{
    std::vector<formula> atoms;
    detail::propositional_atoms(f, atoms);
    if (atoms.size() > max_tautology_atoms)
        throw tautology_refused("propositional skeleton has " + std::to_string(atoms.size()) + " atoms, cap is " +
                                std::to_string(max_tautology_atoms));
    for (std::uint32_t bits = 0; bits < (std::uint32_t{1} << atoms.size()); ++bits)
        if (!detail::eval_skeleton(f, atoms, bits))
            return false;
    return true;
}

inline bool is_instance(schema s, const formula& f, std::size_t agent_count)
{
    if (s == schema::i)
        return is_tautology(f);
    if (!f.is(op::imp))
        return false;
    const formula a = f.lhs();
    const formula b = f.rhs();
    switch (s) {
    case schema::ii:
        // box_i(x -> y) -> (box_i x -> box_i y)
        return a.is(op::box) && a.body().is(op::imp) && b.is(op::imp) && b.lhs().is(op::box) &&
               b.rhs().is(op::box) && b.lhs().agent() == a.agent() && b.rhs().agent() == a.agent() &&
               b.lhs().body() == a.body().lhs() && b.rhs().body() == a.body().rhs();
    case schema::iii:
        return a.is(op::box) && b.is(op::box) && b.agent() == a.agent() && b.body() == a;
    case schema::iv:
        return a.is(op::box) && a.body() == b;
    case schema::v:
        return a.is(op::common) && a.body().is(op::imp) && b.is(op::imp) && b.lhs().is(op::common) &&
               b.rhs().is(op::common) && b.lhs().body() == a.body().lhs() && b.rhs().body() == a.body().rhs();
    case schema::vi: {
        // C x -> E x & E C x
        if (!a.is(op::common))
            return false;
        const formula x = a.body();
        return b == conj(everyone(x, agent_count), everyone(a, agent_count));
    }
    case schema::viii: {
        // E x & C(x -> E x) -> C x
        if (!b.is(op::common))
            return false;
        const formula x = b.body();
        const formula ex = everyone(x, agent_count);
        return a == conj(ex, formula::common(formula::imp(x, ex)));
    }
    case schema::i:
        break;
    }
    return false;
}

// Structural schemas are tried first; absence when nothing matches or the
// tautology check would exceed its atom cap.
inline std::optional<schema> match_axiom(const formula& f, std::size_t agent_count)
{
    for (schema s : all_schemas()) {
        if (s == schema::i)
            continue;
        if (is_instance(s, f, agent_count))
            return s;
    }
    try {
        if (is_tautology(f))
            return schema::i;
    } catch (const tautology_refused&) {
    }
    return std::nullopt;
}

// Instance of schema s built from a, b, c and agent i. For (i) the variant
// selects one of four tautology templates.
inline formula instantiate(schema s, const formula& a, const formula& b, const formula& c, agent_id i,
                           std::size_t agent_count, std::size_t variant = 0)
{
    using F = formula;
    switch (s) {
    case schema::i:
        switch (variant % 4) {
        case 0: return F::imp(a, F::imp(b, a));
        case 1: return F::imp(F::imp(a, F::imp(b, c)), F::imp(F::imp(a, b), F::imp(a, c)));
        case 2: return F::imp(F::imp(neg(a), neg(b)), F::imp(b, a));
        default: return F::imp(conj(a, b), conj(b, a));
        }
    case schema::ii: return F::imp(F::box(i, F::imp(a, b)), F::imp(F::box(i, a), F::box(i, b)));
    case schema::iii: return F::imp(F::box(i, a), F::box(i, F::box(i, a)));
    case schema::iv: return F::imp(F::box(i, a), a);
    case schema::v: return F::imp(F::common(F::imp(a, b)), F::imp(F::common(a), F::common(b)));
    case schema::vi:
        return F::imp(F::common(a), conj(everyone(a, agent_count), everyone(F::common(a), agent_count)));
    case schema::viii:
        return F::imp(conj(everyone(a, agent_count), F::common(F::imp(a, everyone(a, agent_count)))), F::common(a));
    }
    return F::bot();
}

// ---------------------------------------------------------------------------
// Checking

// Child positions from the root; rendered as "/" or "/1/0".
using proof_path = std::vector<std::size_t>;

inline std::string to_string(const proof_path& p)
{
    if (p.empty())
        return "/";
    std::string s;
    for (std::size_t k : p)
        s += "/" + std::to_string(k);
    return s;
}

struct check_outcome {
    formula conclusion;
    // Assumption leaves, deduplicated, in first-use order.
    std::vector<formula> assumptions_used;
};

struct check_rejection {
    proof_path path;
    rule at = rule::axiom;
    std::string message;
    std::string expected;
    std::string found;
};

using check_result = std::variant<check_outcome, check_rejection>;

inline bool accepted(const check_result& r) { return std::holds_alternative<check_outcome>(r); }

namespace detail {

class proof_checker {
public:
    proof_checker(const std::vector<formula>& sigma, std::size_t agents) : sigma_(sigma), agents_(agents)
    {
        opts_.agent_count = agents;
    }

    check_result run(const proof& root)
    {
        proof_path path;
        if (auto r = visit(root, path))
            return *r;
        return check_outcome{root->conclusion, used_};
    }

private:
    std::optional<check_rejection> reject(const proof_path& path, rule at, std::string msg, std::string expected,
                                          std::string found)
    {
        return check_rejection{path, at, std::move(msg), std::move(expected), std::move(found)};
    }

    std::string show(const formula& f) const { return render(f, opts_); }

    std::optional<check_rejection> visit(const proof& n, proof_path& path)
    {
        if (!n)
            return reject(path, rule::axiom, "missing node", "a proof node", "nothing");
        for (std::size_t k = 0; k < n->children.size(); ++k) {
            path.push_back(k);
            auto r = visit(n->children[k], path);
            path.pop_back();
            if (r)
                return r;
        }
        const formula& c = n->conclusion;
        switch (n->kind) {
        case rule::axiom: {
            bool ok = false;
            try {
                ok = is_instance(n->axiom, c, agents_);
            } catch (const tautology_refused& e) {
                return reject(path, n->kind, e.what(), std::string("instance of schema (") + to_string(n->axiom) + ")",
                              show(c));
            }
            if (!ok)
                return reject(path, n->kind, "not an axiom instance",
                              std::string("instance of schema (") + to_string(n->axiom) + ")", show(c));
            break;
        }
        case rule::assumption:
            if (std::find(sigma_.begin(), sigma_.end(), c) == sigma_.end())
                return reject(path, n->kind, "assumption not among the premises", "a member of the premise set",
                              show(c));
            if (std::find(used_.begin(), used_.end(), c) == used_.end())
                used_.push_back(c);
            break;
        case rule::mp: {
            if (n->children.size() != 2)
                return reject(path, n->kind, "mp needs a major and a minor premise", "2 children",
                              std::to_string(n->children.size()) + " children");
            const formula expected = formula::imp(n->children[1]->conclusion, c);
            if (n->children[0]->conclusion != expected)
                return reject(path, n->kind, "major premise does not match", show(expected),
                              show(n->children[0]->conclusion));
            break;
        }
        case rule::nec: {
            if (n->children.size() != 1)
                return reject(path, n->kind, "nec needs exactly one premise", "1 child",
                              std::to_string(n->children.size()) + " children");
            const formula expected = formula::common(n->children[0]->conclusion);
            if (c != expected)
                return reject(path, n->kind, "conclusion is not C of the premise", show(expected), show(c));
            break;
        }
        case rule::omega: {
            const std::size_t k = n->children.size();
            if (k == 0)
                return reject(path, n->kind, "omega needs at least one premise", "1 or more premises", "0");
            if (n->loop_index >= k)
                return reject(path, n->kind, "loop index out of range", "index < " + std::to_string(k),
                              std::to_string(n->loop_index));
            std::vector<formula> phi;
            for (std::size_t j = 0; j < k; ++j) {
                const formula& pj = n->children[j]->conclusion;
                if (!pj.is(op::imp)) {
                    path.push_back(j);
                    auto r = reject(path, n->kind, "omega premise is not an implication",
                                    "phi_" + std::to_string(j) + " -> E psi & E phi_" + std::to_string(j + 1),
                                    show(pj));
                    path.pop_back();
                    return r;
                }
                phi.push_back(pj.lhs());
            }
            const formula e_psi = everyone(n->psi, agents_);
            for (std::size_t j = 0; j < k; ++j) {
                const std::size_t next = j + 1 < k ? j + 1 : n->loop_index;
                const formula expected = formula::imp(phi[j], conj(e_psi, everyone(phi[next], agents_)));
                if (n->children[j]->conclusion != expected)
                    return reject(path, n->kind, "omega premise " + std::to_string(j) + " has the wrong shape",
                                  show(expected), show(n->children[j]->conclusion));
            }
            const formula expected = formula::imp(phi[0], formula::common(n->psi));
            if (c != expected)
                return reject(path, n->kind, "omega conclusion does not match", show(expected), show(c));
            break;
        }
        }
        return std::nullopt;
    }

    const std::vector<formula>& sigma_;
    std::size_t agents_;
    render_options opts_;
    std::vector<formula> used_;
};

} // namespace detail

inline check_result check(const proof& cert, const std::vector<formula>& sigma, std::size_t agent_count)
{
    return detail::proof_checker(sigma, agent_count).run(cert);
}

// Position of the j-th premise in a lasso of length k looping back to l.
inline std::size_t lasso_position(std::size_t j, std::size_t k, std::size_t l)
{
    return j < k ? j : l + (j - l) % (k - l);
}

// Conclusion of the j-th member of the premise family of an omega root.
inline formula unfold_depth(const proof& cert, std::size_t j)
{
    if (!cert || cert->kind != rule::omega)
        throw std::invalid_argument("certificate root is not an omega node");
    const std::size_t k = cert->children.size();
    if (k == 0 || cert->loop_index >= k)
        throw std::invalid_argument("malformed omega node");
    return cert->children[lasso_position(j, k, cert->loop_index)]->conclusion;
}

// The same omega node with its first m cyclic premises written out.
inline proof unroll(const proof& cert, std::size_t m)
{
    if (!cert || cert->kind != rule::omega)
        throw std::invalid_argument("certificate root is not an omega node");
    const std::size_t k = cert->children.size();
    std::vector<proof> premises = cert->children;
    for (std::size_t j = k; j < k + m; ++j)
        premises.push_back(cert->children[lasso_position(j, k, cert->loop_index)]);
    return proof_node::make_omega(cert->psi, std::move(premises), cert->loop_index + m, cert->conclusion);
}

// Certificate for sigma |-_g f from a certificate for C(/\sigma) -> f: the
// premises are conjoined with tautologies and mp, then nec and a final mp.
inline proof assemble_global(const std::vector<formula>& sigma, const proof& implication)
{
    if (sigma.empty())
        throw std::invalid_argument("premise set is empty; the implication certificate is not needed");
    const formula big = big_conj(sigma);
    const formula& c = implication->conclusion;
    if (!c.is(op::imp) || c.lhs() != formula::common(big))
        throw std::invalid_argument("certificate does not conclude C of the premise conjunction");
    // Same member order as big_conj: s1 & (s2 & (... & sn)).
    std::vector<std::pair<std::string, formula>> keyed;
    for (const auto& s : sigma)
        keyed.emplace_back(render_exact(s), s);
    std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    keyed.erase(std::unique(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first == y.first; }),
                keyed.end());
    std::vector<formula> parts;
    for (auto& [key, f] : keyed)
        parts.push_back(f);
    proof acc = proof_node::make_assumption(parts.back());
    formula acc_f = parts.back();
    for (std::size_t j = parts.size() - 1; j-- > 0;) {
        const formula joined = conj(parts[j], acc_f);
        const formula step = formula::imp(acc_f, joined);
        auto taut = proof_node::make_axiom(schema::i, formula::imp(parts[j], step));
        auto half = proof_node::make_mp(taut, proof_node::make_assumption(parts[j]), step);
        acc = proof_node::make_mp(half, acc, joined);
        acc_f = joined;
    }
    auto boxed = proof_node::make_nec(acc, formula::common(big));
    return proof_node::make_mp(implication, boxed, c.rhs());
}

// ---------------------------------------------------------------------------
// Soundness sweep

using proof_checker_fn = std::function<check_result(const proof&, const std::vector<formula>&, std::size_t)>;

struct sweep_violation {
    std::size_t algebra_index = 0;
    std::map<var_index, element> assignment;
    element conclusion_value = 0;
    // Descends from the root through premises whose value is not 1 and
    // stops at the first node all of whose premises evaluate to 1.
    proof_path branch;
    std::string locus_rule;
};

struct sweep_report {
    bool accepted = false;
    std::optional<check_rejection> rejection;
    std::size_t algebras = 0;
    std::size_t valuations = 0;
    std::size_t skipped_algebras = 0;
    std::vector<sweep_violation> violations;
    [[nodiscard]] bool ok() const noexcept { return accepted && violations.empty(); }
};

namespace detail {

inline void collect_vars(const proof& n, std::set<var_index>& out)
{
    for (auto v : variables(n->conclusion))
        out.insert(v);
    if (n->kind == rule::omega)
        for (auto v : variables(n->psi))
            out.insert(v);
    for (const auto& c : n->children)
        collect_vars(c, out);
}

inline std::size_t max_agent_in(const proof& n)
{
    std::size_t m = 0;
    if (auto a = max_agent(n->conclusion))
        m = std::max<std::size_t>(m, *a + 1);
    for (const auto& c : n->children)
        m = std::max(m, max_agent_in(c));
    return m;
}

} // namespace detail

// Every valuation making the premises 1 must make the conclusion 1 in each
// supplied valid algebra. Algebras with fewer agents than the certificate
// mentions, or that fail validation, are skipped and counted.
inline sweep_report soundness_sweep(const proof& cert, const std::vector<formula>& sigma,
                                    const std::vector<finite_algebra>& algebras, std::size_t agent_count,
                                    const proof_checker_fn& checker = check)
{
    sweep_report rep;
    auto res = checker(cert, sigma, agent_count);
    if (auto* rej = std::get_if<check_rejection>(&res)) {
        rep.rejection = *rej;
        return rep;
    }
    rep.accepted = true;
    std::set<var_index> var_set;
    detail::collect_vars(cert, var_set);
    for (const auto& s : sigma)
        for (auto v : variables(s))
            var_set.insert(v);
    const std::vector<var_index> vars(var_set.begin(), var_set.end());
    const std::size_t needed = detail::max_agent_in(cert);
    for (std::size_t ai = 0; ai < algebras.size(); ++ai) {
        const auto& alg = algebras[ai];
        if (alg.agent_count() != agent_count || alg.agent_count() < needed || !validate_algebra(alg).ok()) {
            ++rep.skipped_algebras;
            continue;
        }
        ++rep.algebras;
        for_each_valuation(alg, vars, [&](const valuation& v) {
            ++rep.valuations;
            for (const auto& s : sigma)
                if (evaluate(v, s) != alg.top())
                    return true;
            const element value = evaluate(v, cert->conclusion);
            if (value == alg.top())
                return true;
            sweep_violation viol{ai, v.assignment(), value, {}, {}};
            proof cur = cert;
            for (bool descended = true; descended;) {
                descended = false;
                for (std::size_t k = 0; k < cur->children.size(); ++k)
                    if (evaluate(v, cur->children[k]->conclusion) != alg.top()) {
                        viol.branch.push_back(k);
                        cur = cur->children[k];
                        descended = true;
                        break;
                    }
            }
            viol.locus_rule = to_string(cur->kind);
            rep.violations.push_back(std::move(viol));
            return rep.violations.size() < 16;
        });
    }
    return rep;
}

// ---------------------------------------------------------------------------
// S-expression certificates
//
//   (ax <schema> "<formula>")
//   (asm "<formula>")
//   (mp <major> <minor> "<formula>")
//   (nec <child> "<formula>")
//   (omega "<psi>" (<premise> ...) <loop-index> "<formula>")

class certificate_error : public std::runtime_error {
public:
    certificate_error(std::size_t position, const std::string& msg)
        : std::runtime_error("offset " + std::to_string(position) + ": " + msg), position_(position)
    {
    }
    [[nodiscard]] std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

namespace detail {

class sexpr_reader {
public:
    sexpr_reader(std::string text, std::size_t agents) : text_(std::move(text)), agents_(agents) {}

    proof read()
    {
        auto p = node();
        skip();
        if (pos_ != text_.size())
            throw certificate_error(pos_, "trailing input after certificate");
        return p;
    }

private:
    void skip()
    {
        while (pos_ < text_.size()) {
            if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
                ++pos_;
            } else if (text_[pos_] == ';') {
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    ++pos_;
            } else {
                break;
            }
        }
    }

    void expect(char ch)
    {
        skip();
        if (pos_ >= text_.size() || text_[pos_] != ch)
            throw certificate_error(pos_, std::string("expected '") + ch + "'");
        ++pos_;
    }

    bool peek(char ch)
    {
        skip();
        return pos_ < text_.size() && text_[pos_] == ch;
    }

    std::string word()
    {
        skip();
        std::size_t start = pos_;
        while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
               text_[pos_] != ')' && text_[pos_] != '"')
            ++pos_;
        if (start == pos_)
            throw certificate_error(pos_, "expected a word");
        return text_.substr(start, pos_ - start);
    }

    formula quoted_formula()
    {
        skip();
        if (pos_ >= text_.size() || text_[pos_] != '"')
            throw certificate_error(pos_, "expected a quoted formula");
        const std::size_t start = ++pos_;
        std::string body;
        while (pos_ < text_.size() && text_[pos_] != '"') {
            if (text_[pos_] == '\\' && pos_ + 1 < text_.size())
                ++pos_;
            body += text_[pos_++];
        }
        if (pos_ >= text_.size())
            throw certificate_error(start, "unterminated formula string");
        ++pos_;
        try {
            return parse(body, agents_);
        } catch (const parse_error& e) {
            throw certificate_error(start + e.position(), e.message());
        }
    }

    proof node()
    {
        expect('(');
        const std::size_t at = pos_;
        const std::string head = word();
        proof out;
        if (head == "ax") {
            const std::string s = word();
            auto sch = parse_schema(s);
            if (!sch)
                throw certificate_error(at, "unknown axiom schema '" + s + "'");
            out = proof_node::make_axiom(*sch, quoted_formula());
        } else if (head == "asm") {
            out = proof_node::make_assumption(quoted_formula());
        } else if (head == "mp") {
            auto major = node();
            auto minor = node();
            out = proof_node::make_mp(std::move(major), std::move(minor), quoted_formula());
        } else if (head == "nec") {
            auto child = node();
            out = proof_node::make_nec(std::move(child), quoted_formula());
        } else if (head == "omega") {
            formula psi = quoted_formula();
            expect('(');
            std::vector<proof> premises;
            while (!peek(')'))
                premises.push_back(node());
            expect(')');
            const std::size_t num_at = pos_;
            auto l = text::to_number(word());
            if (!l)
                throw certificate_error(num_at, "loop index must be a natural number");
            out = proof_node::make_omega(std::move(psi), std::move(premises), *l, quoted_formula());
        } else {
            throw certificate_error(at, "unknown node kind '" + head + "'");
        }
        expect(')');
        return out;
    }

    std::string text_;
    std::size_t agents_;
    std::size_t pos_ = 0;
};

inline void write_node(std::ostream& out, const proof& n, std::size_t agents, std::size_t indent)
{
    render_options opts;
    opts.agent_count = agents;
    auto q = [&](const formula& f) { return "\"" + render(f, opts) + "\""; };
    const std::string pad(indent, ' ');
    out << pad << '(' << to_string(n->kind);
    switch (n->kind) {
    case rule::axiom:
        out << ' ' << to_string(n->axiom) << ' ' << q(n->conclusion) << ')';
        return;
    case rule::assumption:
        out << ' ' << q(n->conclusion) << ')';
        return;
    case rule::mp:
    case rule::nec:
        for (const auto& c : n->children) {
            out << '\n';
            write_node(out, c, agents, indent + 2);
        }
        out << '\n' << pad << "  " << q(n->conclusion) << ')';
        return;
    case rule::omega:
        out << ' ' << q(n->psi) << '\n' << pad << "  (";
        for (const auto& c : n->children) {
            out << '\n';
            write_node(out, c, agents, indent + 4);
        }
        out << ")\n" << pad << "  " << n->loop_index << ' ' << q(n->conclusion) << ')';
        return;
    }
}

} // namespace detail

inline proof read_certificate(const std::string& text, std::size_t agent_count)
{
    return detail::sexpr_reader(text, agent_count).read();
}

inline proof read_certificate(std::istream& in, std::size_t agent_count)
{
    std::ostringstream buf;
    buf << in.rdbuf();
    return read_certificate(buf.str(), agent_count);
}

inline void write_certificate(std::ostream& out, const proof& cert, std::size_t agent_count)
{
    detail::write_node(out, cert, agent_count, 0);
    out << '\n';
}

inline std::string certificate_text(const proof& cert, std::size_t agent_count)
{
    std::ostringstream out;
    write_certificate(out, cert, agent_count);
    return out.str();
}

// Number of nodes, counting shared subtrees once per occurrence.
inline std::size_t node_count(const proof& n)
{
    std::size_t k = 1;
    for (const auto& c : n->children)
        k += node_count(c);
    return k;
}

// Copy of cert with the node at `path` replaced by fn(node).
inline proof replace_at(const proof& cert, const proof_path& path, const std::function<proof(const proof&)>& fn,
                        std::size_t depth = 0)
{
    if (depth == path.size())
        return fn(cert);
    auto copy = std::make_shared<proof_node>(*cert);
    copy->children.at(path[depth]) = replace_at(cert->children.at(path[depth]), path, fn, depth + 1);
    return copy;
}

// Paths of all nodes in pre-order.
inline std::vector<proof_path> node_paths(const proof& cert)
{
    std::vector<proof_path> out;
    proof_path cur;
    std::function<void(const proof&)> go = [&](const proof& n) {
        out.push_back(cur);
        for (std::size_t k = 0; k < n->children.size(); ++k) {
            cur.push_back(k);
            go(n->children[k]);
            cur.pop_back();
        }
    };
    go(cert);
    return out;
}

} // namespace s4c
