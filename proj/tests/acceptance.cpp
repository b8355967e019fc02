#include "s4c/suite.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    s4c::suite::config cfg;
    cfg.cert_dir = S4C_CERT_DIR;
    std::vector<int> only;
    CLI::App app{"acceptance property suites"};
    app.add_option("--seed", cfg.seed, "corpus seed");
    app.add_option("--certs", cfg.cert_dir, "golden certificate directory");
    app.add_option("--only", only, "criteria to run (default: all)");
    CLI11_PARSE(app, argc, argv);

    std::cout << "seed " << cfg.seed << ", certificates " << cfg.cert_dir << '\n' << std::flush;
    s4c::suite::runner run(cfg);
    bool all = true;
    auto report = [&](const s4c::suite::result& r) {
        std::cout << s4c::suite::line(r) << '\n' << std::flush;
        all = all && r.passed();
    };
    if (only.empty())
        run.run_all(report);
    else
        for (int id : only)
            report(run.run(id));
    return all ? 0 : 1;
}
