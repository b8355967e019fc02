#pragma once

// The acceptance property suites. Each criterion returns one result line;
// the acceptance test binary and `s4c suite` both print them.

#include "s4c/algebra.hpp"
#include "s4c/decide.hpp"
#include "s4c/fixtures.hpp"
#include "s4c/frames.hpp"
#include "s4c/prooftree.hpp"
#include "s4c/random.hpp"
#include "s4c/stone.hpp"
#include "s4c/syntax.hpp"
#include "s4c/ultrafilter.hpp"
#include "s4c/wellfound.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace s4c::suite {

struct config {
    std::uint64_t seed = 20261016;
    std::size_t corpus_spaces = 200;
    std::size_t decide_formulas = 500;
    std::size_t consequence_triples = 100;
    std::string cert_dir;
    // Axiom instances over depth-3 formulas have closures well beyond the
    // interactive default, so the suite runs the engine with wider caps.
    decide_config decide{128, std::size_t{1} << 20, 128};
};

struct result {
    int id = 0;
    std::string name;
    bool holds = false;
    std::string detail;
    double seconds = 0;
    double limit_seconds = 0;
    [[nodiscard]] bool passed() const noexcept { return holds && seconds <= limit_seconds; }
};

inline std::string line(const result& r)
{
    std::ostringstream out;
    out << (r.passed() ? "PASS" : "FAIL") << ' ' << r.id << ' ' << r.name << ": " << r.detail << " ["
        << std::fixed;
    out.precision(2);
    out << r.seconds << " s, limit " << r.limit_seconds << " s]";
    if (r.holds && !r.passed())
        out << " (over time)";
    return out.str();
}

struct golden_certificate {
    std::string name;
    std::string text;
    std::string sigma_text; // empty when there is no premise file
};

// <name>.sexp certificates with optional <name>.sigma premise lists.
inline std::vector<golden_certificate> load_golden(const std::string& dir)
{
    namespace fs = std::filesystem;
    std::vector<golden_certificate> out;
    if (dir.empty() || !fs::is_directory(dir))
        return out;
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".sexp")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    };
    for (const auto& p : files) {
        golden_certificate g;
        g.name = p.stem().string();
        g.text = slurp(p);
        auto sig = p;
        sig.replace_extension(".sigma");
        if (fs::exists(sig))
            g.sigma_text = slurp(sig);
        out.push_back(std::move(g));
    }
    return out;
}

inline std::vector<formula> parse_sigma(const golden_certificate& g, std::size_t agents)
{
    std::istringstream in(g.sigma_text);
    return read_formulas(in, agents);
}

// Formula-level mutations applied to one node at a time.
inline std::vector<formula> mutations(const formula& f)
{
    std::vector<formula> out{neg(f), formula::box(0, f), formula::common(f)};
    if (!f.is(op::bot))
        out.push_back(formula::bot());
    return out;
}

// Every single-node formula mutation of cert (conclusions and omega psi).
inline std::vector<proof> mutants(const proof& cert)
{
    std::vector<proof> out;
    for (const auto& path : node_paths(cert)) {
        proof target = cert;
        for (std::size_t k : path)
            target = target->children[k];
        for (const auto& m : mutations(target->conclusion))
            out.push_back(replace_at(cert, path, [&](const proof& n) {
                auto copy = std::make_shared<proof_node>(*n);
                copy->conclusion = m;
                return proof(copy);
            }));
        if (target->kind == rule::omega)
            for (const auto& m : mutations(target->psi))
                out.push_back(replace_at(cert, path, [&](const proof& n) {
                    auto copy = std::make_shared<proof_node>(*n);
                    copy->psi = m;
                    return proof(copy);
                }));
    }
    return out;
}

// Number of distinct closure members over a list of formulas.
inline std::size_t union_closure_size(const std::vector<formula>& fs, std::size_t agents)
{
    std::set<formula> all;
    for (const auto& f : fs) {
        const auto cl = closure(f, agents);
        all.insert(cl.members().begin(), cl.members().end());
    }
    return all.size();
}

struct triple {
    std::vector<formula> sigma;
    std::vector<formula> gamma;
    formula f = formula::bot();
};

inline std::vector<triple> consequence_corpus(std::uint64_t seed, std::size_t count)
{
    std::vector<triple> out;
    const auto p0 = formula::var(0);
    out.push_back({{formula::imp(p0, formula::box(0, p0)), formula::imp(p0, formula::box(1, p0))},
                   {p0},
                   formula::common(p0)});
    out.push_back({{}, {p0}, formula::common(p0)});
    out.push_back({{p0}, {}, formula::common(p0)});
    out.push_back({{formula::common(p0)}, {}, formula::box(0, p0)});
    gen::rng r(seed);
    gen::formula_shape shape{2, 2, 2, true};
    std::uniform_int_distribution<int> size(0, 2);
    while (out.size() < count) {
        triple t;
        const int ns = size(r), ng = size(r);
        for (int k = 0; k < ns; ++k)
            t.sigma.push_back(gen::random_formula(r, shape));
        for (int k = 0; k < ng; ++k)
            t.gamma.push_back(gen::random_formula(r, shape));
        t.f = gen::random_formula(r, shape);
        std::vector<formula> all = t.sigma;
        all.insert(all.end(), t.gamma.begin(), t.gamma.end());
        all.push_back(t.f);
        if (union_closure_size(all, 2) <= 8)
            out.push_back(std::move(t));
    }
    return out;
}

class runner {
public:
    explicit runner(config cfg) : cfg_(std::move(cfg)) {}

    [[nodiscard]] const config& settings() const noexcept { return cfg_; }

    const std::vector<gen::corpus_entry>& corpus()
    {
        if (!corpus_)
            corpus_ = gen::algebra_corpus(cfg_.seed, cfg_.corpus_spaces);
        return *corpus_;
    }

    std::vector<result> run_all(const std::function<void(const result&)>& on_result = {})
    {
        std::vector<result> out;
        for (int id = 1; id <= 9; ++id) {
            out.push_back(run(id));
            if (on_result)
                on_result(out.back());
        }
        return out;
    }

    result run(int id)
    {
        switch (id) {
        case 1: return timed(1, "gfp-equals-common", 10, [&](result& r) { gfp(r); });
        case 2: return timed(2, "topological-algebras", 10, [&](result& r) { topological(r); });
        case 3: return timed(3, "standard-accessible-part", 30, [&](result& r) { standard(r); });
        case 4: return timed(4, "height-laws-and-ideals", 60, [&](result& r) { heights(r); });
        case 5: return timed(5, "representation", 60, [&](result& r) { representation(r); });
        case 6: return timed(6, "decision-procedure", 120, [&](result& r) { decision(r); });
        case 7: return timed(7, "global-soundness-sweep", 60, [&](result& r) { sweep(r); });
        case 8: return timed(8, "three-pipelines-agree", 600, [&](result& r) { pipelines(r); });
        case 9: return timed(9, "empty-premise-certificates", 60, [&](result& r) { empty_premises(r); });
        default: throw std::invalid_argument("unknown criterion " + std::to_string(id));
        }
    }

private:
    template <typename Fn>
    result timed(int id, const char* name, double limit, Fn&& fn)
    {
        result r;
        r.id = id;
        r.name = name;
        r.limit_seconds = limit;
        const auto start = std::chrono::steady_clock::now();
        try {
            fn(r);
        } catch (const std::exception& e) {
            r.holds = false;
            r.detail = std::string("aborted: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return r;
    }

    static std::string count(std::size_t n, const char* what) { return std::to_string(n) + " " + what; }

    // 1. gfp of z -> E a & E z equals C a.
    void gfp(result& r)
    {
        std::size_t algebras = 0, elements = 0, mismatches = 0, invalid = 0;
        for (const auto& e : corpus()) {
            if (!validate_algebra(e.algebra).ok()) {
                ++invalid;
                continue;
            }
            ++algebras;
            for (element a = 0; a < e.algebra.size(); ++a) {
                ++elements;
                if (gfp_ce(e.algebra, a) != e.algebra.common(a))
                    ++mismatches;
            }
        }
        r.holds = mismatches == 0 && invalid == 0;
        r.detail = count(algebras, "algebras, ") + count(elements, "elements, ") + count(mismatches, "mismatches");
        if (invalid)
            r.detail += ", " + count(invalid, "invalid corpus algebras");
    }

    // 2. powerset algebras are valid; algebra -> topologies -> algebra is the identity.
    void topological(result& r)
    {
        std::size_t valid = 0, roundtrip = 0, total = 0;
        for (const auto& e : corpus()) {
            ++total;
            if (validate_algebra(e.algebra).ok())
                ++valid;
            auto rec = algebra_to_topologies(e.algebra);
            if (rec.ok() && powerset_algebra(rec.space(e.algebra)) == e.algebra &&
                rec.topologies == e.space.topologies())
                ++roundtrip;
        }
        r.holds = valid == total && roundtrip == total;
        r.detail = std::to_string(valid) + "/" + std::to_string(total) + " valid, " + std::to_string(roundtrip) + "/" +
                   std::to_string(total) + " round trips";
    }

    // 3. Standardness and Acc(<_d) = { a | a not <= C d }.
    void standard(result& r)
    {
        std::size_t algebras = 0, standard_count = 0, profiles = 0, matching = 0, sigma_ok = 0;
        for (const auto& e : corpus()) {
            if (e.algebra.size() > 16)
                continue;
            ++algebras;
            auto rep = check_standard(e.algebra);
            if (rep.standard)
                ++standard_count;
            for (const auto& p : rep.profiles) {
                ++profiles;
                if (p.matches)
                    ++matching;
            }
            if (check_standard_sigma(e.algebra))
                ++sigma_ok;
        }
        r.holds = standard_count == algebras && matching == profiles && sigma_ok == algebras;
        r.detail = std::to_string(standard_count) + "/" + std::to_string(algebras) + " standard, " +
                   std::to_string(matching) + "/" + std::to_string(profiles) + " (algebra, d) with matching Acc, " +
                   std::to_string(sigma_ok) + "/" + std::to_string(algebras) + " chain-standard";
    }

    // 4. ht_d(c | e) = min, ht_d(c)+1 <= ht_d(E d & E c), every M_d(gamma) an ideal.
    void heights(result& r)
    {
        std::size_t joins = 0, steps = 0, ideals = 0, failures = 0;
        for (const auto& e : corpus()) {
            const auto& alg = e.algebra;
            if (alg.size() > 16)
                continue;
            for (element d = 0; d < alg.size(); ++d) {
                prec_analysis pa(alg, d);
                const element ed = alg.everyone(d);
                std::uint32_t max_finite = 0;
                for (element c = 0; c < alg.size(); ++c) {
                    const ordinal hc = pa.height(c);
                    if (!hc.is_infinite())
                        max_finite = std::max(max_finite, hc.value());
                    ++steps;
                    if (!(hc.successor() <= pa.height(ed & alg.everyone(c))))
                        ++failures;
                    for (element x = 0; x < alg.size(); ++x) {
                        ++joins;
                        if (pa.height(c | x) != std::min(hc, pa.height(x)))
                            ++failures;
                    }
                }
                std::vector<ordinal> gammas;
                for (std::uint32_t g = 0; g <= max_finite + 2; ++g)
                    gammas.push_back(ordinal::finite(g));
                gammas.push_back(ordinal::infinity());
                for (const auto& g : gammas) {
                    ++ideals;
                    if (!is_ideal(alg, pa.m_ideal(g)))
                        ++failures;
                }
            }
        }
        r.holds = failures == 0;
        r.detail = count(joins, "join triples, ") + count(steps, "successor steps, ") + count(ideals, "ideals, ") +
                   count(failures, "failures");
    }

    // 5. Representation over ultrafilters; J-level inclusions; rank equivalence.
    void representation(result& r)
    {
        std::size_t algebras = 0, checks = 0, failures = 0, rank_checks = 0, embed_fail = 0;
        for (const auto& e : corpus()) {
            const auto& alg = e.algebra;
            ++algebras;
            auto rep = verify_representation(alg);
            checks += rep.checks;
            failures += rep.failures.size();
            if (!completion_embed(alg).ok())
                ++embed_fail;
            auto ults = ultrafilters(alg);
            for (element d = 0; d < alg.size(); ++d) {
                prec_analysis pa(alg, d);
                const ordinal top = pa.algebra_height();
                const std::uint32_t bound = top.is_infinite() ? 0 : top.value() + 1;
                for (const auto& u : ults) {
                    const ordinal rk = pa.rank(u);
                    for (std::uint32_t g = 0; g <= bound; ++g) {
                        const ordinal gamma = ordinal::finite(g);
                        bool meets = false;
                        for (element a = 0; a < alg.size() && !meets; ++a)
                            meets = u.contains(a) && pa.in_m_ideal(a, gamma);
                        ++rank_checks;
                        if ((gamma < rk) != meets)
                            ++failures;
                    }
                }
            }
        }
        r.holds = failures == 0 && embed_fail == 0;
        r.detail = count(algebras, "algebras, ") + count(checks, "representation checks, ") +
                   count(rank_checks, "rank equivalences, ") + count(failures, "failures");
        if (embed_fail)
            r.detail += ", " + count(embed_fail, "completion embeddings failed");
    }

    // 6. Axiom instances are valid; the named non-theorems get certified countermodels.
    void decision(result& r)
    {
        gen::rng rng(cfg_.seed + 6);
        gen::formula_shape shape{3, 2, 2, true};
        std::vector<formula> fs;
        for (std::size_t k = 0; k < cfg_.decide_formulas; ++k)
            fs.push_back(gen::random_formula(rng, shape));
        std::size_t instances = 0, valid = 0, mismatched = 0, largest = 0;
        for (std::size_t k = 0; k < fs.size(); ++k) {
            const formula& a = fs[k];
            const formula& b = fs[(k + 1) % fs.size()];
            const formula& c = fs[(k + 2) % fs.size()];
            for (schema s : all_schemas()) {
                const formula f = instantiate(s, a, b, c, static_cast<agent_id>(k % 2), 2, k);
                ++instances;
                if (!is_instance(s, f, 2))
                    ++mismatched;
                auto d = decide_valid(f, 2, cfg_.decide);
                largest = std::max(largest, d.sets);
                if (d.valid())
                    ++valid;
            }
        }
        std::size_t named_ok = 0;
        for (const char* s : {"C p0 -> p0", "C p0 -> C C p0"})
            if (decide_valid(parse(s, 2), 2, cfg_.decide).valid())
                ++named_ok;
        for (const char* s : {"p0 -> C p0", "E p0 -> C p0", "box0 p0 -> box1 p0"}) {
            const formula f = parse(s, 2);
            auto d = decide_valid(f, 2, cfg_.decide);
            if (!d.valid() && d.countermodel && validate_model(*d.countermodel).ok() &&
                !satisfies(*d.countermodel, d.world, f))
                ++named_ok;
        }
        r.holds = valid == instances && mismatched == 0 && named_ok == 5;
        r.detail = std::to_string(valid) + "/" + std::to_string(instances) + " axiom instances Valid, " +
                   std::to_string(named_ok) + "/5 named verdicts, largest tableau " + std::to_string(largest) +
                   " sets";
        if (mismatched)
            r.detail += ", " + count(mismatched, "instances not recognised by the schema matcher");
    }

    // 7. Golden certificates survive every valuation on every corpus algebra.
    void sweep(result& r)
    {
        const auto golden = load_golden(cfg_.cert_dir);
        if (golden.empty()) {
            r.holds = false;
            r.detail = "no golden certificates found in '" + cfg_.cert_dir + "'";
            return;
        }
        std::size_t pairs = 0, valuations = 0, rejected = 0, violations = 0, too_many_vars = 0;
        for (std::size_t agents = 1; agents <= 3; ++agents) {
            std::vector<finite_algebra> algs;
            for (const auto& e : corpus())
                if (e.algebra.agent_count() == agents && e.algebra.size() <= 16)
                    algs.push_back(e.algebra);
            for (const auto& g : golden) {
                proof cert;
                std::vector<formula> sigma;
                try {
                    cert = read_certificate(g.text, agents);
                    sigma = parse_sigma(g, agents);
                } catch (const certificate_error&) {
                    continue; // mentions an agent beyond this count
                } catch (const parse_error&) {
                    continue;
                }
                std::set<var_index> vars;
                detail::collect_vars(cert, vars);
                for (const auto& s : sigma)
                    vars.merge(variables(s));
                if (vars.size() > 2)
                    ++too_many_vars;
                auto rep = soundness_sweep(cert, sigma, algs, agents);
                if (!rep.accepted) {
                    ++rejected;
                    continue;
                }
                pairs += rep.algebras;
                valuations += rep.valuations;
                violations += rep.violations.size();
            }
        }
        r.holds = rejected == 0 && violations == 0 && too_many_vars == 0 && pairs > 0;
        r.detail = count(golden.size(), "certificates, ") + count(pairs, "(certificate, algebra) pairs, ") +
                   count(valuations, "valuations, ") + count(violations, "violations");
        if (rejected)
            r.detail += ", " + count(rejected, "rejected certificates");
        if (too_many_vars)
            r.detail += ", " + count(too_many_vars, "certificates over 2 variables");
    }

    // 8. derives_mixed against Kripke models <= 4 worlds and corpus algebras.
    void pipelines(result& r)
    {
        const auto triples = consequence_corpus(cfg_.seed + 8, cfg_.consequence_triples);
        if (frames_.empty())
            for (std::size_t n = 1; n <= 4; ++n)
                for (const auto& f : frames_up_to_iso(n, 2))
                    frames_.push_back(frame_algebra(f));
        std::vector<const finite_algebra*> algs;
        for (const auto& e : corpus())
            if (e.algebra.agent_count() == 2)
                algs.push_back(&e.algebra);
        std::size_t valid = 0, invalid = 0, discrepancies = 0;
        for (const auto& t : triples) {
            auto d = derives_mixed(t.sigma, t.gamma, t.f, 2, cfg_.decide);
            std::vector<formula> all = t.sigma;
            all.insert(all.end(), t.gamma.begin(), t.gamma.end());
            all.push_back(t.f);
            const auto var_set = variables(all);
            const std::vector<var_index> vars(var_set.begin(), var_set.end());
            if (d.valid()) {
                ++valid;
                if (kripke_counterexample(t, vars) || algebraic_counterexample(t, vars, algs))
                    ++discrepancies;
            } else {
                ++invalid;
                const auto& cm = *d.countermodel;
                bool ok = validate_model(cm).ok() && refute_consequence({cm}, t.sigma, t.gamma, t.f).has_value();
                if (ok && cm.world_count() <= max_atoms) {
                    auto alg = powerset_algebra(alexandrov_space(cm));
                    auto v = alexandrov_valuation(alg, cm, vars);
                    ok = !algebraic_consequence(v, t.sigma, t.gamma, t.f).holds;
                } else {
                    ok = false;
                }
                if (!ok)
                    ++discrepancies;
            }
        }
        r.holds = discrepancies == 0;
        r.detail = count(triples.size(), "triples (") + std::to_string(valid) + " derivable, " +
                   std::to_string(invalid) + " refuted), " + count(frames_.size(), "frames, ") +
                   count(discrepancies, "discrepancies");
    }

    bool kripke_counterexample(const triple& t, const std::vector<var_index>& vars) const
    {
        std::vector<compiled_formula> sig, gam;
        for (const auto& s : t.sigma)
            sig.emplace_back(s, vars);
        for (const auto& g : t.gamma)
            gam.emplace_back(g, vars);
        const compiled_formula goal(t.f, vars);
        for (const auto& alg : frames_) {
            std::vector<element> vals(std::max<std::size_t>(vars.size(), 1), 0);
            for (;;) {
                bool premises = true;
                for (const auto& s : sig)
                    premises = premises && s.run(alg, vals.data()) == alg.top();
                if (premises) {
                    element here = alg.top();
                    for (const auto& g : gam)
                        here &= g.run(alg, vals.data());
                    if ((here & ~goal.run(alg, vals.data())) != 0)
                        return true;
                }
                std::size_t k = 0;
                while (k < vars.size() && vals[k] == alg.top()) {
                    vals[k] = 0;
                    ++k;
                }
                if (k >= vars.size())
                    break;
                ++vals[k];
            }
        }
        return false;
    }

    static bool algebraic_counterexample(const triple& t, const std::vector<var_index>& vars,
                                         const std::vector<const finite_algebra*>& algs)
    {
        for (const auto* alg : algs) {
            bool found = false;
            for_each_valuation(*alg, vars, [&](const valuation& v) {
                found = !algebraic_consequence(v, t.sigma, t.gamma, t.f).holds;
                return !found;
            });
            if (found)
                return true;
        }
        return false;
    }

    // 9. Empty-premise certificates conclude decide-valid formulas; every
    // single-node mutation of every golden certificate is rejected.
    void empty_premises(result& r)
    {
        const auto golden = load_golden(cfg_.cert_dir);
        if (golden.empty()) {
            r.holds = false;
            r.detail = "no golden certificates found in '" + cfg_.cert_dir + "'";
            return;
        }
        std::size_t empty = 0, empty_valid = 0, mutants_total = 0, killed = 0, rejected = 0;
        for (const auto& g : golden) {
            auto cert = read_certificate(g.text, 2);
            auto sigma = parse_sigma(g, 2);
            if (!accepted(check(cert, sigma, 2))) {
                ++rejected;
                continue;
            }
            if (sigma.empty()) {
                ++empty;
                if (decide_valid(cert->conclusion, 2, cfg_.decide).valid())
                    ++empty_valid;
            }
            for (const auto& m : mutants(cert)) {
                ++mutants_total;
                if (!accepted(check(m, sigma, 2)))
                    ++killed;
            }
        }
        r.holds = rejected == 0 && empty > 0 && empty_valid == empty && killed == mutants_total;
        r.detail = std::to_string(empty_valid) + "/" + std::to_string(empty) + " empty-premise conclusions Valid, " +
                   std::to_string(killed) + "/" + std::to_string(mutants_total) + " mutants rejected";
        if (rejected)
            r.detail += ", " + count(rejected, "golden certificates rejected");
    }

    config cfg_;
    std::optional<std::vector<gen::corpus_entry>> corpus_;
    std::vector<finite_algebra> frames_;
};

} // namespace s4c::suite
