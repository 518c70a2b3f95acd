// Acceptance driver: one PASS/FAIL line per criterion, exit 2 on any failure.
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pathlt/acceptance.hpp"
#include "pathlt/io.hpp"

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    pathlt::AcceptanceOptions opt;
    std::string report;
    app.add_option("--baseline", opt.baseline, "regression baseline json (written when missing)");
    app.add_flag("--update", opt.update_baseline, "overwrite stored baseline values");
    app.add_option("--only", opt.only, "criterion ids to run");
    app.add_option("--report", report, "write the full json report here");
    CLI11_PARSE(app, argc, argv);

    auto rep = pathlt::run_acceptance(opt, std::cout);
    if (!report.empty()) pathlt::write_text_file(report, rep.to_json().dump(2) + "\n");
    int passed = 0;
    for (const auto& r : rep.results) passed += r.pass;
    std::cout << passed << "/" << rep.results.size() << " criteria passed" << std::endl;
    return rep.all_pass() ? 0 : 2;
}
