// fittcalc: run the tasks of a scenario config and print a report.
//
//   fittcalc config.json [--jobs 4] [--json out.json] [--t-precision 8] ...
//
// Exit status: 0 all PASS, 1 some FAIL, 2 config error, 3 some ERROR.

#include "fitt/report.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

std::vector<std::uint64_t> parse_orders(const std::string& s) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw fitt::ConfigError("--group", "empty factor order");
        std::size_t used = 0;
        auto v = std::stoull(item, &used);
        if (used != item.size()) throw fitt::ConfigError("--group", "bad factor order '" + item + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shifted Fitting ideals of Z^0 over finite truncations of Z_p[G][[T]]"};
    std::string config_path, json_path, group;
    std::uint64_t p = 0;
    int coeff = 0, tprec = 0, max_degree = 0;
    unsigned jobs = 0;
    std::size_t budget = 0;
    bool allow_even_p = false;
    app.add_option("config", config_path, "scenario config (JSON)")->required();
    app.add_option("--p", p, "prime");
    app.add_option("--coeff-precision", coeff, "N: coefficients modulo p^N");
    app.add_option("--t-precision", tprec, "M: truncation at T^M");
    app.add_option("--group", group, "cyclic factor orders, e.g. 9,3");
    app.add_option("--jobs", jobs, "worker threads");
    app.add_option("--json", json_path, "also write a JSON report here");
    app.add_option("--max-degree", max_degree, "top degree for built complexes");
    app.add_option("--budget", budget, "rank budget for the bar construction");
    app.add_flag("--allow-even-p", allow_even_p, "permit p = 2");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    fitt::Overrides o;
    // an explicit 0 must reach validation, so test presence rather than value
    if (app.count("--p")) o.p = p;
    if (app.count("--coeff-precision")) o.coeff_precision = coeff;
    if (app.count("--t-precision")) o.t_precision = tprec;
    if (app.count("--max-degree")) o.max_degree = max_degree;
    if (app.count("--jobs")) o.jobs = jobs;
    if (app.count("--budget")) o.budget = budget;
    o.allow_even_p = allow_even_p;

    fitt::Config cfg;
    try {
        if (!group.empty()) o.group_orders = parse_orders(group);
        cfg = fitt::load_config(config_path, o);
    } catch (const fitt::ConfigError& e) {
        std::cerr << "config error at " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    fitt::default_jobs() = cfg.settings.jobs;
    auto report = fitt::run(cfg);
    std::cout << fitt::text_report(report);
    if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) {
            std::cerr << "cannot write " << json_path << "\n";
            return 3;
        }
        out << fitt::json_report(report).dump(2) << "\n";
    }
    return fitt::exit_code(report);
}
