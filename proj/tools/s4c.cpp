#include "s4c/suite.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using nlohmann::json;
using namespace s4c;

enum exit_code : int { ok = 0, negative = 1, capped = 2, bad_input = 3 };

class input_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct settings {
    std::size_t agents = 2;
    std::uint64_t seed = 20261016;
    std::size_t cap_closure = decide_config{}.max_closure;
    std::size_t cap_sets = decide_config{}.max_sets;
    std::string format = "text";

    [[nodiscard]] bool records() const { return format == "records"; }
    [[nodiscard]] decide_config decide() const
    {
        decide_config c;
        c.max_closure = cap_closure;
        c.max_sets = cap_sets;
        return c;
    }
};

// One output line per record: either the text form or a JSON object.
class emitter {
public:
    explicit emitter(const settings& s) : s_(s) {}

    void emit(const std::string& text, json record) const
    {
        if (s_.records())
            std::cout << record.dump() << '\n';
        else
            std::cout << text << '\n';
    }

private:
    const settings& s_;
};

std::string slurp(const std::string& path)
{
    if (path == "-") {
        std::ostringstream buf;
        buf << std::cin.rdbuf();
        return buf.str();
    }
    std::ifstream in(path);
    if (!in)
        throw input_error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// `fixture:NAME` or a file path.
std::string source_text(const std::string& source)
{
    constexpr std::string_view prefix = "fixture:";
    if (source.rfind(prefix, 0) == 0)
        return fixtures::text_of(source.substr(prefix.size()));
    return slurp(source);
}

finite_algebra load_algebra(const std::string& source) { return read_algebra(source_text(source)); }
kripke_model load_model(const std::string& source) { return read_model(source_text(source)); }
finite_top_space load_space(const std::string& source) { return read_space(source_text(source)); }

std::vector<formula> load_formulas(const std::string& path, std::size_t agents)
{
    if (path.empty())
        return {};
    std::istringstream in(slurp(path));
    return read_formulas(in, agents);
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream out(path);
    if (!out)
        throw input_error("cannot write '" + path + "'");
    out << text;
}

std::string show(const formula& f, std::size_t agents)
{
    render_options o;
    o.agent_count = agents;
    return render(f, o);
}

json element_json(const finite_algebra& a, element x) { return element_name(a, x); }

std::string bool_text(bool b) { return b ? "true" : "false"; }

// ---------------------------------------------------------------------------

int cmd_parse(const settings& s, const emitter& out, const std::string& text)
{
    const formula f = parse(text, s.agents);
    render_options exact;
    exact.exact = true;
    const std::string pretty = show(f, s.agents);
    out.emit(pretty, {{"kind", "formula"},
                      {"rendered", pretty},
                      {"exact", render(f, exact)},
                      {"size", f.size()},
                      {"depth", f.depth()},
                      {"closure", closure(f, s.agents).size()}});
    return ok;
}

int cmd_model_validate(const settings&, const emitter& out, const std::string& file)
{
    const auto m = load_model(file);
    const auto rep = validate_model(m);
    for (const auto& issue : rep.issues)
        out.emit("issue: " + describe(m, issue), {{"kind", "model-issue"}, {"message", describe(m, issue)}});
    out.emit(std::string("valid=") + bool_text(rep.ok()) + " worlds=" + std::to_string(m.world_count()) +
                 " agents=" + std::to_string(m.agent_count()),
             {{"kind", "model-report"}, {"valid", rep.ok()}, {"worlds", m.world_count()}, {"agents", m.agent_count()}});
    return rep.ok() ? ok : negative;
}

int cmd_model_check(const settings&, const emitter& out, const std::string& file, const std::string& text,
                    const std::string& world)
{
    const auto m = load_model(file);
    if (auto rep = validate_model(m); !rep.ok())
        throw input_error("model does not validate: " + describe(m, rep.issues.front()));
    const formula f = parse(text, m.agent_count());
    const auto truth = truth_set(m, f);
    std::vector<std::string> holds, fails;
    for (world_id w = 0; w < m.world_count(); ++w)
        (truth.test(w) ? holds : fails).push_back(m.world_name(w));
    bool result = fails.empty();
    json rec{{"kind", "model-check"}, {"formula", show(f, m.agent_count())}, {"true_at", holds}, {"false_at", fails}};
    std::string text_line;
    if (!world.empty()) {
        auto w = m.find_world(world);
        if (!w)
            throw input_error("unknown world '" + world + "'");
        result = truth.test(*w);
        rec["world"] = world;
        text_line = world + (result ? " satisfies " : " refutes ") + show(f, m.agent_count());
    } else {
        text_line = std::string("globally=") + bool_text(result);
        for (const auto& w : fails)
            text_line += "\nfalse at " + w;
    }
    rec["holds"] = result;
    out.emit(text_line, rec);
    return result ? ok : negative;
}

int cmd_algebra_validate(const settings&, const emitter& out, const std::string& file)
{
    const auto a = load_algebra(file);
    const auto rep = validate_algebra(a);
    for (const auto& issue : rep.issues)
        out.emit("issue: " + describe(a, issue), {{"kind", "algebra-issue"}, {"message", describe(a, issue)}});
    out.emit(std::string("valid=") + bool_text(rep.ok()) + " atoms=" + std::to_string(a.atom_count()) +
                 " agents=" + std::to_string(a.agent_count()),
             {{"kind", "algebra-report"}, {"valid", rep.ok()}, {"atoms", a.atom_count()}, {"agents", a.agent_count()}});
    return rep.ok() ? ok : negative;
}

int cmd_algebra_gfp(const settings&, const emitter& out, const std::string& file)
{
    const auto a = load_algebra(file);
    std::size_t mismatches = 0;
    for (element x = 0; x < a.size(); ++x) {
        const element g = gfp_ce(a, x);
        const bool same = g == a.common(x);
        mismatches += same ? 0 : 1;
        out.emit("a=" + element_name(a, x) + " gfp=" + element_name(a, g) + " C=" + element_name(a, a.common(x)) +
                     " equal=" + bool_text(same),
                 {{"kind", "gfp"},
                  {"a", element_json(a, x)},
                  {"gfp", element_json(a, g)},
                  {"common", element_json(a, a.common(x))},
                  {"equal", same}});
    }
    return mismatches == 0 ? ok : negative;
}

std::vector<element> chosen_elements(const finite_algebra& a, const std::string& d)
{
    if (!d.empty())
        return {detail::parse_subset(a.atoms(), d)};
    std::vector<element> all;
    for (element x = 0; x < a.size(); ++x)
        all.push_back(x);
    return all;
}

int cmd_algebra_heights(const settings&, const emitter& out, const std::string& file, const std::string& d_text)
{
    const auto a = load_algebra(file);
    for (element d : chosen_elements(a, d_text)) {
        prec_analysis pa(a, d);
        for (element x = 0; x < a.size(); ++x)
            out.emit("d=" + element_name(a, d) + " a=" + element_name(a, x) + " ht=" + pa.height(x).to_string(),
                     {{"kind", "height"},
                      {"d", element_json(a, d)},
                      {"a", element_json(a, x)},
                      {"height", pa.height(x).to_string()}});
        out.emit("d=" + element_name(a, d) + " ht(A)=" + pa.algebra_height().to_string(),
                 {{"kind", "algebra-height"}, {"d", element_json(a, d)}, {"height", pa.algebra_height().to_string()}});
    }
    return ok;
}

int cmd_algebra_standard(const settings&, const emitter& out, const std::string& file, bool witness)
{
    const auto a = load_algebra(file);
    const auto rep = check_standard(a);
    for (const auto& p : rep.profiles) {
        const std::string maxht = p.max_height ? std::to_string(*p.max_height) : "none";
        out.emit("d=" + element_name(a, p.d) + " acc=" + std::to_string(p.accessible_count) + " maxht=" + maxht +
                     " standard=" + bool_text(p.matches),
                 {{"kind", "standard"},
                  {"d", element_json(a, p.d)},
                  {"acc", p.accessible_count},
                  {"maxht", p.max_height ? json(*p.max_height) : json(nullptr)},
                  {"standard", p.matches}});
    }
    if (witness && rep.witness) {
        const auto& w = *rep.witness;
        json rec{{"kind", "witness"}, {"d", element_json(a, w.d)}, {"a", element_json(a, w.a)}};
        std::string line = "witness d=" + element_name(a, w.d) + " a=" + element_name(a, w.a);
        if (w.sequence) {
            json stem = json::array(), cycle = json::array();
            line += " stem:";
            for (element x : w.sequence->stem) {
                stem.push_back(element_json(a, x));
                line += " " + element_name(a, x);
            }
            line += " cycle:";
            for (element x : w.sequence->cycle) {
                cycle.push_back(element_json(a, x));
                line += " " + element_name(a, x);
            }
            rec["stem"] = stem;
            rec["cycle"] = cycle;
        } else {
            line += " accessible although below C d";
            rec["accessible_below_c"] = true;
        }
        out.emit(line, rec);
    }
    return rep.standard ? ok : negative;
}

int cmd_algebra_represent(const settings&, const emitter& out, const std::string& file)
{
    const auto a = load_algebra(file);
    const auto rep = verify_representation(a);
    for (const auto& f : rep.failures) {
        std::string line = "failure " + f.check + " a=" + element_name(a, f.a);
        json rec{{"kind", "representation-failure"}, {"check", f.check}, {"a", element_json(a, f.a)}};
        if (f.agent) {
            line += " agent=" + std::to_string(*f.agent);
            rec["agent"] = *f.agent;
        }
        if (f.gamma) {
            line += " gamma=" + f.gamma->to_string();
            rec["gamma"] = f.gamma->to_string();
        }
        out.emit(line, rec);
    }
    out.emit("represented=" + bool_text(rep.ok()) + " checks=" + std::to_string(rep.checks) +
                 " ultrafilters=" + std::to_string(a.atom_count()),
             {{"kind", "representation-report"}, {"represented", rep.ok()}, {"checks", rep.checks}});
    return rep.ok() ? ok : negative;
}

int cmd_algebra_complete(const settings&, const emitter& out, const std::string& file, const std::string& out_file)
{
    const auto a = load_algebra(file);
    const auto rep = completion_embed(a);
    for (const auto& f : rep.failures)
        out.emit("failure " + f, {{"kind", "embedding-failure"}, {"message", f}});
    out.emit("embedding=" + bool_text(rep.ok()) + " injective=" + bool_text(rep.injective) +
                 " homomorphism=" + bool_text(rep.boolean_homomorphism) + " boxes=" +
                 bool_text(rep.commutes_with_boxes) + " common=" + bool_text(rep.commutes_with_common) +
                 " onto=" + bool_text(rep.surjective),
             {{"kind", "embedding-report"},
              {"ok", rep.ok()},
              {"injective", rep.injective},
              {"homomorphism", rep.boolean_homomorphism},
              {"boxes", rep.commutes_with_boxes},
              {"common", rep.commutes_with_common},
              {"onto", rep.surjective}});
    if (!out_file.empty()) {
        std::ostringstream text;
        write_space(text, topo_canonical(a));
        write_file(out_file, text.str());
    }
    return rep.ok() ? ok : negative;
}

int cmd_space_to_algebra(const settings&, const emitter& out, const std::string& file, const std::string& out_file)
{
    const auto sp = load_space(file);
    const auto a = powerset_algebra(sp);
    std::ostringstream text;
    write_algebra(text, a);
    if (!out_file.empty())
        write_file(out_file, text.str());
    const bool valid = validate_algebra(a).ok();
    out.emit(out_file.empty() ? text.str() + "valid=" + bool_text(valid) : "valid=" + bool_text(valid),
             {{"kind", "space-algebra"}, {"algebra", text.str()}, {"valid", valid}, {"elements", a.size()}});
    return valid ? ok : negative;
}

int report_decision(const settings& s, const emitter& out, const decision& d, const std::string& cm_file,
                    const char* what)
{
    json rec{{"kind", what},
             {"verdict", to_string(d.result)},
             {"query", show(d.query, s.agents)},
             {"closure", d.closure_size},
             {"sets", d.sets}};
    std::string line = to_string(d.result);
    if (!d.valid()) {
        const auto& cm = *d.countermodel;
        const std::string text = to_text(cm);
        rec["world"] = cm.world_name(d.world);
        rec["worlds"] = cm.world_count();
        rec["countermodel"] = text;
        line += " (refuted at " + cm.world_name(d.world) + ", " + std::to_string(cm.world_count()) + " worlds)";
        if (!cm_file.empty()) {
            write_file(cm_file, text);
            rec["countermodel_file"] = cm_file;
        } else if (!s.records()) {
            line += "\n" + text;
        }
    }
    out.emit(line, rec);
    return d.valid() ? ok : negative;
}

int cmd_decide(const settings& s, const emitter& out, const std::string& text, const std::string& cm_file)
{
    const formula f = parse(text, s.agents);
    return report_decision(s, out, decide_valid(f, s.agents, s.decide()), cm_file, "decision");
}

int cmd_consequence(const settings& s, const emitter& out, const std::string& mode, const std::string& sigma_file,
                    const std::string& gamma_file, const std::string& text, const std::string& cm_file)
{
    const formula f = parse(text, s.agents);
    const auto sigma = load_formulas(sigma_file, s.agents);
    const auto gamma = load_formulas(gamma_file, s.agents);
    decision d;
    if (mode == "local") {
        if (!sigma.empty())
            throw input_error("--local takes only --gamma premises");
        d = derives_l(gamma, f, s.agents, s.decide());
    } else if (mode == "global") {
        if (!gamma.empty())
            throw input_error("--global takes only --sigma premises");
        d = derives_g(sigma, f, s.agents, s.decide());
    } else {
        d = derives_mixed(sigma, gamma, f, s.agents, s.decide());
    }
    return report_decision(s, out, d, cm_file, "consequence");
}

int cmd_proof_check(const settings& s, const emitter& out, const std::string& cert_file,
                    const std::string& sigma_file)
{
    const auto cert = read_certificate(slurp(cert_file), s.agents);
    const auto sigma = load_formulas(sigma_file, s.agents);
    const auto res = check(cert, sigma, s.agents);
    if (const auto* o = std::get_if<check_outcome>(&res)) {
        json used = json::array();
        for (const auto& f : o->assumptions_used)
            used.push_back(show(f, s.agents));
        out.emit("accepted: " + show(o->conclusion, s.agents) + " (" + std::to_string(node_count(cert)) + " nodes)",
                 {{"kind", "proof"},
                  {"accepted", true},
                  {"conclusion", show(o->conclusion, s.agents)},
                  {"nodes", node_count(cert)},
                  {"assumptions", used}});
        return ok;
    }
    const auto& r = std::get<check_rejection>(res);
    out.emit("rejected at " + to_string(r.path) + " (" + to_string(r.at) + "): " + r.message + "\n  expected: " +
                 r.expected + "\n  found:    " + r.found,
             {{"kind", "proof"},
              {"accepted", false},
              {"path", to_string(r.path)},
              {"rule", to_string(r.at)},
              {"message", r.message},
              {"expected", r.expected},
              {"found", r.found}});
    return negative;
}

int cmd_suite(const settings& s, const emitter& out, const std::string& certs, const std::vector<int>& only)
{
    suite::config cfg;
    cfg.seed = s.seed;
    cfg.cert_dir = certs;
    suite::runner run(cfg);
    out.emit("seed " + std::to_string(s.seed), {{"kind", "suite"}, {"seed", s.seed}, {"certs", certs}});
    bool all = true;
    auto report = [&](const suite::result& r) {
        all = all && r.passed();
        out.emit(suite::line(r), {{"kind", "criterion"},
                                  {"id", r.id},
                                  {"name", r.name},
                                  {"passed", r.passed()},
                                  {"detail", r.detail},
                                  {"seconds", r.seconds},
                                  {"limit_seconds", r.limit_seconds}});
        std::cout.flush();
    };
    if (only.empty())
        run.run_all(report);
    else
        for (int id : only)
            report(run.run(id));
    return all ? ok : negative;
}

} // namespace

int main(int argc, char** argv)
{
    settings s;
    CLI::App app{"s4c: workbench for multi-agent S4 with common knowledge"};
    app.require_subcommand(1);
    app.add_option("--agents", s.agents, "number of agents")->check(CLI::PositiveNumber);
    app.add_option("--seed", s.seed, "seed for randomized suites");
    app.add_option("--cap-closure", s.cap_closure, "largest closure the decision procedure accepts")
        ->check(CLI::PositiveNumber);
    app.add_option("--cap-sets", s.cap_sets, "largest number of tableau sets")->check(CLI::PositiveNumber);
    app.add_option("--format", s.format, "output mode")->check(CLI::IsMember({"text", "records"}));
    // Global flags may also follow the subcommand.
    app.fallthrough();

    emitter out(s);
    std::function<int()> action;

    std::string formula_text, file, world, d_text, out_file, sigma_file, gamma_file, cm_file, certs;
    bool witness = false, local = false, global = false, mixed = false;
    std::vector<int> only;

    auto* parse_cmd = app.add_subcommand("parse", "parse and print a formula");
    parse_cmd->add_option("formula", formula_text)->required();
    parse_cmd->callback([&] { action = [&] { return cmd_parse(s, out, formula_text); }; });

    auto* model = app.add_subcommand("model", "Kripke models");
    model->require_subcommand(1);
    auto* mv = model->add_subcommand("validate", "check frame conditions");
    mv->add_option("model", file, "model file or fixture:NAME")->required();
    mv->callback([&] { action = [&] { return cmd_model_validate(s, out, file); }; });
    auto* mc = model->add_subcommand("check", "evaluate a formula");
    mc->add_option("model", file, "model file or fixture:NAME")->required();
    mc->add_option("formula", formula_text)->required();
    mc->add_option("--world", world, "world to evaluate at (default: all)");
    mc->callback([&] { action = [&] { return cmd_model_check(s, out, file, formula_text, world); }; });

    auto* alg = app.add_subcommand("algebra", "finite algebras");
    alg->require_subcommand(1);
    auto add_alg = [&](const char* name, const char* help) {
        auto* c = alg->add_subcommand(name, help);
        c->add_option("algebra", file, "algebra file or fixture:NAME")->required();
        return c;
    };
    add_alg("validate", "check the axioms exhaustively")->callback([&] {
        action = [&] { return cmd_algebra_validate(s, out, file); };
    });
    add_alg("gfp", "compare the fixed point of z -> E a & E z with C a")->callback([&] {
        action = [&] { return cmd_algebra_gfp(s, out, file); };
    });
    auto* ah = add_alg("heights", "heights for the relation <_d");
    ah->add_option("--d", d_text, "parameter element (default: all)");
    ah->callback([&] { action = [&] { return cmd_algebra_heights(s, out, file, d_text); }; });
    auto* as = add_alg("standard", "accessible part and standardness per d");
    as->add_flag("--witness", witness, "print the periodic counter-sequence on failure");
    as->callback([&] { action = [&] { return cmd_algebra_standard(s, out, file, witness); }; });
    add_alg("represent", "verify the ultrafilter representation")->callback([&] {
        action = [&] { return cmd_algebra_represent(s, out, file); };
    });
    auto* ac = add_alg("complete", "check the embedding into the topo-canonical powerset algebra");
    ac->add_option("--out", out_file, "write the topo-canonical space here");
    ac->callback([&] { action = [&] { return cmd_algebra_complete(s, out, file, out_file); }; });

    auto* space = app.add_subcommand("space", "finite multitopological spaces");
    space->require_subcommand(1);
    auto* sta = space->add_subcommand("to-algebra", "powerset algebra of a space");
    sta->add_option("space", file, "space file or fixture:NAME")->required();
    sta->add_option("--out", out_file, "write the algebra here");
    sta->callback([&] { action = [&] { return cmd_space_to_algebra(s, out, file, out_file); }; });

    auto* dec = app.add_subcommand("decide", "decide validity");
    dec->add_option("formula", formula_text)->required();
    dec->add_option("--countermodel", cm_file, "write the countermodel here when invalid");
    dec->callback([&] { action = [&] { return cmd_decide(s, out, formula_text, cm_file); }; });

    auto* con = app.add_subcommand("consequence", "decide local, global or mixed consequence");
    con->add_option("formula", formula_text)->required();
    auto* fl = con->add_flag("--local", local, "Gamma |- f");
    auto* fg = con->add_flag("--global", global, "Sigma |-g f");
    auto* fm = con->add_flag("--mixed", mixed, "Sigma; Gamma |- f");
    fl->excludes(fg)->excludes(fm);
    fg->excludes(fm);
    con->add_option("--sigma", sigma_file, "global premises, one per line");
    con->add_option("--gamma", gamma_file, "local premises, one per line");
    con->add_option("--countermodel", cm_file, "write the countermodel here when refuted");
    con->callback([&] {
        const std::string mode = local ? "local" : global ? "global" : "mixed";
        action = [&, mode] { return cmd_consequence(s, out, mode, sigma_file, gamma_file, formula_text, cm_file); };
    });

    auto* proof_cmd = app.add_subcommand("proof", "proof certificates");
    proof_cmd->require_subcommand(1);
    auto* pc = proof_cmd->add_subcommand("check", "check a certificate");
    pc->add_option("certificate", file)->required();
    pc->add_option("--sigma", sigma_file, "global premises, one per line");
    pc->callback([&] { action = [&] { return cmd_proof_check(s, out, file, sigma_file); }; });

    auto* su = app.add_subcommand("suite", "run the acceptance property suites");
    su->add_option("--certs", certs, "golden certificate directory")->required();
    su->add_option("--only", only, "criteria to run (default: all)");
    su->callback([&] { action = [&] { return cmd_suite(s, out, certs, only); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? ok : bad_input;
    }

    try {
        return action();
    } catch (const resource_cap_exceeded& e) {
        std::cerr << "resource cap: " << e.what() << '\n';
        return capped;
    } catch (const parse_error& e) {
        std::cerr << "parse error at " << e.position() << ": " << e.message() << '\n';
        return bad_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return bad_input;
    }
}
