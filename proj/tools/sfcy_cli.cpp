// Command-line driver: sfcy <subcommand> [--config f] [--out d] [--grid n] [--tol x] [--pole j]

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "sfcy/errors.hpp"
#include "sfcy/pipeline.hpp"

using namespace sfcy;

int main(int argc, char** argv) {
    CLI::App app{"Semi-flat metrics from cubic differentials: solve, develop, verify"};
    std::string config_path, out_dir;
    int grid = 0, pole = -2;
    double tol = 0.0;
    bool print_defaults = false;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (report.json, fields/, plots/)");
    app.add_option("--grid", grid, "Cartesian nodes per chart side; pole patches get a quarter of it")
        ->check(CLI::Range(8, 1 << 14));
    app.add_option("--tol", tol, "Newton tolerance of the solver")->check(CLI::PositiveNumber);
    app.add_option("--pole", pole, "restrict per-pole analyses to this pole")->check(CLI::NonNegativeNumber);
    app.add_flag("--print-defaults", print_defaults, "print the default configuration and exit");
    for (const std::string& name : subcommands()) app.add_subcommand(name)->fallthrough();
    app.require_subcommand(0, 1);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (print_defaults) {
            std::cout << RunConfig().to_json().dump(2) << '\n';
            return 0;
        }
        if (app.get_subcommands().empty()) {
            std::cerr << app.help();
            return 2;
        }
        RunConfig cfg = config_path.empty() ? RunConfig() : RunConfig::load(config_path);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        if (grid > 0) {
            cfg.solver.grid.cartesian_n = grid;
            cfg.solver.grid.ntheta = std::max(8, grid / 4);
        }
        if (tol > 0.0) cfg.solver.tol = tol;
        if (pole >= 0) cfg.pole = pole;

        const std::string sub = app.get_subcommands().front()->get_name();
        const Report rep = run(sub, cfg);
        if (sub == "verify-all")
            for (const auto& c : rep.json()["criteria"]["summary"])
                std::printf("criterion %2d %s  %s\n", c["id"].get<int>(), c["pass"].get<bool>() ? "PASS" : "FAIL",
                            c["title"].get<std::string>().c_str());
        for (const auto& f : rep.json()["failures"]) std::cerr << "FAIL " << f.get<std::string>() << '\n';
        std::printf("%s: %d assertions, %d failed; report in %s/report.json\n", sub.c_str(), rep.assertions(),
                    rep.failures(), cfg.out_dir.c_str());
        return rep.passed() ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
}
