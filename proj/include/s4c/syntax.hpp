#pragma once

// Formulas of the common-knowledge logic: five primitive constructors
// (variable, bottom, implication, agent box, common knowledge) with every
// other connective built as an abbreviation over them.

#include "s4c/text.hpp"

#include <algorithm>
#include <cctype>
#include <compare>
#include <cstdint>
#include <functional>
#include <istream>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace s4c {

using agent_id = std::uint32_t;
using var_index = std::uint32_t;

enum class op : std::uint8_t { var, bot, imp, box, common };

class formula {
    struct node;

public:
    formula() : formula(bot()) {}

    static formula var(var_index n) { return formula(make(op::var, n, {}, {})); }
    static formula bot()
    {
        static const formula instance(make(op::bot, 0, {}, {}));
        return instance;
    }
    static formula imp(formula lhs, formula rhs) { return formula(make(op::imp, 0, std::move(lhs), std::move(rhs))); }
    static formula box(agent_id agent, formula body) { return formula(make(op::box, agent, std::move(body), {})); }
    static formula common(formula body) { return formula(make(op::common, 0, std::move(body), {})); }

    [[nodiscard]] op kind() const noexcept { return node_->kind; }
    [[nodiscard]] bool is(op k) const noexcept { return node_->kind == k; }

    // Variable index for op::var, agent for op::box.
    [[nodiscard]] std::uint32_t index() const noexcept { return node_->index; }
    [[nodiscard]] var_index variable() const noexcept { return node_->index; }
    [[nodiscard]] agent_id agent() const noexcept { return node_->index; }

    // Left operand of an implication, or the body of box / common.
    [[nodiscard]] formula lhs() const noexcept { return formula(node_->lhs); }
    [[nodiscard]] formula rhs() const noexcept { return formula(node_->rhs); }
    [[nodiscard]] formula body() const noexcept { return formula(node_->lhs); }

    [[nodiscard]] std::size_t hash() const noexcept { return node_->hash; }
    // Number of nodes in the tree.
    [[nodiscard]] std::size_t size() const noexcept { return node_->size; }
    [[nodiscard]] std::size_t depth() const noexcept { return node_->depth; }
    [[nodiscard]] const void* identity() const noexcept { return node_.get(); }

    friend bool operator==(const formula& a, const formula& b) noexcept
    {
        if (a.node_ == b.node_)
            return true;
        if (a.hash() != b.hash() || a.size() != b.size() || a.kind() != b.kind() || a.index() != b.index())
            return false;
        switch (a.kind()) {
        case op::var:
        case op::bot:
            return true;
        case op::imp:
            return a.lhs() == b.lhs() && a.rhs() == b.rhs();
        case op::box:
        case op::common:
            return a.body() == b.body();
        }
        return false;
    }

    // Structural total order: size first, then constructor, index, operands.
    friend std::strong_ordering operator<=>(const formula& a, const formula& b) noexcept
    {
        if (a.node_ == b.node_)
            return std::strong_ordering::equal;
        if (auto c = a.size() <=> b.size(); c != 0)
            return c;
        if (auto c = a.kind() <=> b.kind(); c != 0)
            return c;
        if (auto c = a.index() <=> b.index(); c != 0)
            return c;
        switch (a.kind()) {
        case op::var:
        case op::bot:
            return std::strong_ordering::equal;
        case op::imp:
            if (auto c = a.lhs() <=> b.lhs(); c != 0)
                return c;
            return a.rhs() <=> b.rhs();
        case op::box:
        case op::common:
            return a.body() <=> b.body();
        }
        return std::strong_ordering::equal;
    }

private:
    struct node {
        op kind;
        std::uint32_t index;
        std::shared_ptr<const node> lhs;
        std::shared_ptr<const node> rhs;
        std::size_t hash;
        std::size_t size;
        std::size_t depth;
    };

    explicit formula(std::shared_ptr<const node> n) : node_(std::move(n)) {}

    static std::shared_ptr<const node> make(op kind, std::uint32_t index, std::optional<formula> lhs_f,
                                            std::optional<formula> rhs_f)
    {
        std::shared_ptr<const node> lhs = lhs_f ? lhs_f->node_ : nullptr;
        std::shared_ptr<const node> rhs = rhs_f ? rhs_f->node_ : nullptr;
        std::size_t h = static_cast<std::size_t>(kind) * 0x9e3779b97f4a7c15ULL ^ (index + 0x7f4a7c15ULL);
        std::size_t size = 1;
        std::size_t depth = 0;
        auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
        if (lhs) {
            mix(lhs->hash);
            size += lhs->size;
            depth = std::max(depth, lhs->depth + 1);
        }
        if (rhs) {
            mix(rhs->hash * 31);
            size += rhs->size;
            depth = std::max(depth, rhs->depth + 1);
        }
        return std::make_shared<const node>(node{kind, index, std::move(lhs), std::move(rhs), h, size, depth});
    }

    std::shared_ptr<const node> node_;
};

struct formula_hash {
    std::size_t operator()(const formula& f) const noexcept { return f.hash(); }
};

// ---------------------------------------------------------------------------
// Abbreviations. None of these introduce new node kinds.

inline formula neg(formula f) { return formula::imp(std::move(f), formula::bot()); }
inline formula top() { return neg(formula::bot()); }
inline formula conj(formula a, formula b) { return neg(formula::imp(std::move(a), neg(std::move(b)))); }
inline formula disj(formula a, formula b) { return formula::imp(neg(std::move(a)), std::move(b)); }
inline formula iff(const formula& a, const formula& b) { return conj(formula::imp(a, b), formula::imp(b, a)); }

// Mutual knowledge: box_0 f & (box_1 f & (... & box_{n-1} f)).
inline formula everyone(const formula& f, std::size_t agent_count)
{
    if (agent_count == 0)
        throw std::invalid_argument("agent set must be non-empty");
    formula result = formula::box(static_cast<agent_id>(agent_count - 1), f);
    for (std::size_t i = agent_count - 1; i-- > 0;)
        result = conj(formula::box(static_cast<agent_id>(i), f), result);
    return result;
}

// ---------------------------------------------------------------------------
// Rendering

struct render_options {
    // When false, negation/conjunction/disjunction/top/iff/E patterns are
    // printed with their sugar. The output parses back to the same tree.
    bool exact = false;
    // Needed to recognise E; 0 disables E re-sugaring.
    std::size_t agent_count = 0;
    bool unicode = false;
};

namespace detail {

inline bool match_neg(const formula& f, formula& body)
{
    if (f.is(op::imp) && f.rhs().is(op::bot)) {
        body = f.lhs();
        return true;
    }
    return false;
}

inline bool match_top(const formula& f) { return f.is(op::imp) && f.lhs().is(op::bot) && f.rhs().is(op::bot); }

inline bool match_conj(const formula& f, formula& a, formula& b)
{
    formula inner;
    if (!match_neg(f, inner) || !inner.is(op::imp))
        return false;
    formula nb;
    if (!match_neg(inner.rhs(), nb))
        return false;
    a = inner.lhs();
    b = nb;
    return true;
}

inline bool match_disj(const formula& f, formula& a, formula& b)
{
    formula na;
    if (!f.is(op::imp) || !match_neg(f.lhs(), na))
        return false;
    a = na;
    b = f.rhs();
    return true;
}

inline bool match_iff(const formula& f, formula& a, formula& b)
{
    formula l, r;
    if (!match_conj(f, l, r) || !l.is(op::imp) || !r.is(op::imp))
        return false;
    if (!(l.lhs() == r.rhs() && l.rhs() == r.lhs()))
        return false;
    a = l.lhs();
    b = l.rhs();
    return true;
}

inline bool match_everyone(const formula& f, std::size_t agent_count, formula& body)
{
    if (agent_count < 2)
        return false;
    formula cur = f;
    std::optional<formula> seen;
    for (std::size_t i = 0; i + 1 < agent_count; ++i) {
        formula a, rest;
        if (!match_conj(cur, a, rest) || !a.is(op::box) || a.agent() != i)
            return false;
        if (seen && !(*seen == a.body()))
            return false;
        seen = a.body();
        cur = rest;
    }
    if (!cur.is(op::box) || cur.agent() != agent_count - 1 || !(cur.body() == *seen))
        return false;
    body = *seen;
    return true;
}

enum prec : int { p_iff = 1, p_imp = 2, p_or = 3, p_and = 4, p_unary = 5, p_atom = 6 };

class renderer {
public:
    explicit renderer(const render_options& opts) : opts_(opts) {}

    // Returns the text and its precedence level.
    std::pair<std::string, int> run(const formula& f) const
    {
        switch (f.kind()) {
        case op::var:
            return {"p" + std::to_string(f.variable()), p_atom};
        case op::bot:
            return {tok("bot", "⊥"), p_atom};
        case op::box:
            return {tok("box", "□") + std::to_string(f.agent()) + " " + operand(f.body()), p_unary};
        case op::common:
            return {"C " + operand(f.body()), p_unary};
        case op::imp:
            break;
        }
        if (!opts_.exact) {
            formula a, b;
            if (match_top(f))
                return {tok("top", "⊤"), p_atom};
            if (match_everyone(f, opts_.agent_count, a))
                return {"E " + operand(a), p_unary};
            if (match_iff(f, a, b))
                return binary(a, b, tok(" <-> ", " ↔ "), p_iff);
            if (match_conj(f, a, b))
                return binary(a, b, tok(" & ", " ∧ "), p_and);
            if (match_neg(f, a))
                return {tok("~", "¬") + operand(a), p_unary};
            if (match_disj(f, a, b))
                return binary(a, b, tok(" | ", " ∨ "), p_or);
        }
        return binary(f.lhs(), f.rhs(), tok(" -> ", " → "), p_imp);
    }

private:
    std::string tok(const char* ascii, const char* uni) const { return opts_.unicode ? uni : ascii; }

    std::string operand(const formula& f) const
    {
        auto [text, level] = run(f);
        return level == p_atom ? text : "(" + text + ")";
    }

    // All binary connectives associate to the right.
    std::pair<std::string, int> binary(const formula& a, const formula& b, const std::string& sym, int level) const
    {
        auto [lt, ll] = run(a);
        auto [rt, rl] = run(b);
        if (ll <= level)
            lt = "(" + lt + ")";
        if (rl < level)
            rt = "(" + rt + ")";
        return {lt + sym + rt, level};
    }

    render_options opts_;
};

} // namespace detail

inline std::string render(const formula& f, const render_options& opts = {})
{
    return detail::renderer(opts).run(f).first;
}

inline std::string render_exact(const formula& f)
{
    render_options opts;
    opts.exact = true;
    return render(f, opts);
}

// Canonical conjunction of a finite set: duplicates removed, members sorted
// by exact rendering, associated to the right. The empty conjunction is top.
inline formula big_conj(std::vector<formula> fs)
{
    if (fs.empty())
        return top();
    std::vector<std::pair<std::string, formula>> keyed;
    keyed.reserve(fs.size());
    for (auto& f : fs)
        keyed.emplace_back(render_exact(f), std::move(f));
    std::sort(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    keyed.erase(std::unique(keyed.begin(), keyed.end(), [](const auto& x, const auto& y) { return x.first == y.first; }),
                keyed.end());
    formula result = keyed.back().second;
    for (std::size_t i = keyed.size() - 1; i-- > 0;)
        result = conj(keyed[i].second, result);
    return result;
}

// ---------------------------------------------------------------------------
// Parsing

class parse_error : public std::runtime_error {
public:
    parse_error(std::size_t position, const std::string& message)
        : std::runtime_error("at " + std::to_string(position) + ": " + message), position_(position), message_(message)
    {
    }
    [[nodiscard]] std::size_t position() const noexcept { return position_; }
    [[nodiscard]] const std::string& message() const noexcept { return message_; }

private:
    std::size_t position_;
    std::string message_;
};

namespace detail {

class parser {
    enum class tk { word, lparen, rparen, arrow, iff, amp, bar, tilde, end };
    struct token {
        tk kind;
        std::string text;
        std::size_t pos;
    };

public:
    parser(std::string_view text, std::size_t agent_count) : text_(text), agents_(agent_count)
    {
        if (agent_count == 0)
            throw std::invalid_argument("agent set must be non-empty");
        lex();
    }

    formula run()
    {
        formula f = parse_iff();
        if (peek().kind != tk::end)
            throw parse_error(peek().pos, "unexpected '" + peek().text + "'");
        return f;
    }

private:
    void lex()
    {
        std::size_t i = 0;
        while (i < text_.size()) {
            char ch = text_[i];
            if (std::isspace(static_cast<unsigned char>(ch))) {
                ++i;
                continue;
            }
            auto starts = [&](std::string_view s) { return text_.substr(i, s.size()) == s; };
            if (starts("<->")) {
                tokens_.push_back({tk::iff, "<->", i});
                i += 3;
            } else if (starts("->")) {
                tokens_.push_back({tk::arrow, "->", i});
                i += 2;
            } else if (ch == '(' || ch == ')' || ch == '&' || ch == '|' || ch == '~') {
                tk k = ch == '(' ? tk::lparen : ch == ')' ? tk::rparen : ch == '&' ? tk::amp : ch == '|' ? tk::bar : tk::tilde;
                tokens_.push_back({k, std::string(1, ch), i});
                ++i;
            } else if (std::isalpha(static_cast<unsigned char>(ch))) {
                std::size_t start = i;
                while (i < text_.size() && std::isalnum(static_cast<unsigned char>(text_[i])))
                    ++i;
                tokens_.push_back({tk::word, std::string(text_.substr(start, i - start)), start});
            } else {
                throw parse_error(i, std::string("unexpected character '") + ch + "'");
            }
        }
        tokens_.push_back({tk::end, "end of input", text_.size()});
    }

    const token& peek() const { return tokens_[cur_]; }
    const token& next() { return tokens_[cur_++]; }

    formula parse_iff()
    {
        formula lhs = parse_imp();
        if (peek().kind == tk::iff) {
            next();
            return iff(lhs, parse_iff());
        }
        return lhs;
    }

    formula parse_imp()
    {
        formula lhs = parse_or();
        if (peek().kind == tk::arrow) {
            next();
            return formula::imp(lhs, parse_imp());
        }
        return lhs;
    }

    formula parse_or()
    {
        formula lhs = parse_and();
        if (peek().kind == tk::bar) {
            next();
            return disj(lhs, parse_or());
        }
        return lhs;
    }

    formula parse_and()
    {
        formula lhs = parse_unary();
        if (peek().kind == tk::amp) {
            next();
            return conj(lhs, parse_and());
        }
        return lhs;
    }

    static std::optional<std::uint32_t> suffix_number(const std::string& word, std::size_t prefix)
    {
        if (word.size() <= prefix || word.size() - prefix > 9)
            return std::nullopt;
        std::uint32_t n = 0;
        for (std::size_t k = prefix; k < word.size(); ++k) {
            if (!std::isdigit(static_cast<unsigned char>(word[k])))
                return std::nullopt;
            n = n * 10 + static_cast<std::uint32_t>(word[k] - '0');
        }
        return n;
    }

    formula parse_unary()
    {
        const token& t = next();
        switch (t.kind) {
        case tk::tilde:
            return neg(parse_unary());
        case tk::lparen: {
            formula inner = parse_iff();
            if (peek().kind != tk::rparen)
                throw parse_error(peek().pos, "expected ')'");
            next();
            return inner;
        }
        case tk::word:
            break;
        default:
            throw parse_error(t.pos, "unexpected '" + t.text + "'");
        }
        const std::string& w = t.text;
        if (w == "bot")
            return formula::bot();
        if (w == "top")
            return top();
        if (w == "C")
            return formula::common(parse_unary());
        if (w == "E")
            return everyone(parse_unary(), agents_);
        if (w.rfind("box", 0) == 0) {
            auto n = suffix_number(w, 3);
            if (!n)
                throw parse_error(t.pos, "malformed box '" + w + "'");
            if (*n >= agents_)
                throw parse_error(t.pos, "agent index " + std::to_string(*n) + " out of range (agents: " +
                                             std::to_string(agents_) + ")");
            return formula::box(*n, parse_unary());
        }
        if (w[0] == 'p') {
            auto n = suffix_number(w, 1);
            if (!n)
                throw parse_error(t.pos, "malformed variable '" + w + "'");
            return formula::var(*n);
        }
        throw parse_error(t.pos, "unknown word '" + w + "'");
    }

    std::string_view text_;
    std::size_t agents_;
    std::vector<token> tokens_;
    std::size_t cur_ = 0;
};

} // namespace detail

inline formula parse(std::string_view text, std::size_t agent_count)
{
    return detail::parser(text, agent_count).run();
}

// ---------------------------------------------------------------------------
// Closure sets

// Smallest set containing the root that is closed under subformulas and, for
// every C psi in it, also contains box_i psi and box_i C psi for all agents.
class closure_set {
public:
    closure_set(const formula& root, std::size_t agent_count) : agents_(agent_count)
    {
        if (agent_count == 0)
            throw std::invalid_argument("agent set must be non-empty");
        std::vector<formula> work{root};
        while (!work.empty()) {
            formula f = std::move(work.back());
            work.pop_back();
            if (!insert(f))
                continue;
            switch (f.kind()) {
            case op::var:
            case op::bot:
                break;
            case op::imp:
                work.push_back(f.lhs());
                work.push_back(f.rhs());
                break;
            case op::box:
                work.push_back(f.body());
                break;
            case op::common:
                work.push_back(f.body());
                for (std::size_t i = 0; i < agent_count; ++i) {
                    work.push_back(formula::box(static_cast<agent_id>(i), f.body()));
                    work.push_back(formula::box(static_cast<agent_id>(i), f));
                }
                break;
            }
        }
        // Subformulas before superformulas.
        std::sort(members_.begin(), members_.end());
        index_.clear();
        for (std::size_t k = 0; k < members_.size(); ++k)
            index_.emplace(members_[k], k);
    }

    [[nodiscard]] const std::vector<formula>& members() const noexcept { return members_; }
    [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
    [[nodiscard]] std::size_t agent_count() const noexcept { return agents_; }
    [[nodiscard]] bool contains(const formula& f) const { return index_.count(f) != 0; }
    [[nodiscard]] std::optional<std::size_t> index_of(const formula& f) const
    {
        auto it = index_.find(f);
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }
    [[nodiscard]] const formula& operator[](std::size_t k) const { return members_[k]; }

private:
    bool insert(const formula& f)
    {
        if (index_.count(f))
            return false;
        index_.emplace(f, members_.size());
        members_.push_back(f);
        return true;
    }

    std::size_t agents_;
    std::vector<formula> members_;
    std::unordered_map<formula, std::size_t, formula_hash> index_;
};

inline closure_set closure(const formula& f, std::size_t agent_count) { return closure_set(f, agent_count); }

// Distinct subformulas of f (including f).
inline std::vector<formula> subformulas(const formula& f)
{
    std::set<formula> seen;
    std::vector<formula> work{f};
    while (!work.empty()) {
        formula g = std::move(work.back());
        work.pop_back();
        if (!seen.insert(g).second)
            continue;
        if (g.is(op::imp)) {
            work.push_back(g.lhs());
            work.push_back(g.rhs());
        } else if (g.is(op::box) || g.is(op::common)) {
            work.push_back(g.body());
        }
    }
    return {seen.begin(), seen.end()};
}

inline std::set<var_index> variables(const formula& f)
{
    std::set<var_index> out;
    for (const auto& g : subformulas(f))
        if (g.is(op::var))
            out.insert(g.variable());
    return out;
}

inline std::set<var_index> variables(const std::vector<formula>& fs)
{
    std::set<var_index> out;
    for (const auto& f : fs)
        out.merge(variables(f));
    return out;
}

// Largest agent index appearing in f, if any box occurs.
inline std::optional<agent_id> max_agent(const formula& f)
{
    std::optional<agent_id> out;
    for (const auto& g : subformulas(f))
        if (g.is(op::box))
            out = std::max(out.value_or(0), g.agent());
    return out;
}

// One formula per line; blank lines and '#' comments are skipped.
inline std::vector<formula> read_formulas(std::istream& in, std::size_t agent_count)
{
    std::vector<formula> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto content = text::strip_comment(line);
        if (content.empty())
            continue;
        try {
            out.push_back(parse(content, agent_count));
        } catch (const parse_error& e) {
            throw parse_error(e.position(), "line " + std::to_string(line_no) + ": " + e.message());
        }
    }
    return out;
}

} // namespace s4c

template <>
struct std::hash<s4c::formula> {
    std::size_t operator()(const s4c::formula& f) const noexcept { return f.hash(); }
};
