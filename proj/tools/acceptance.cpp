// Runs the full acceptance suite and prints one line per criterion.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "sfcy/errors.hpp"
#include "sfcy/pipeline.hpp"

using namespace sfcy;

int main(int argc, char** argv) {
    CLI::App app{"acceptance suite"};
    std::string config_path, out_dir = "acceptance_out";
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory");
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    try {
        RunConfig cfg = config_path.empty() ? RunConfig() : RunConfig::load(config_path);
        cfg.out_dir = out_dir;
        std::vector<CriterionResult> results;
        const Report rep = verify_all(cfg, &results);
        int passed = 0;
        for (const auto& r : results) {
            passed += r.pass;
            std::printf("criterion %2d %s  %s: %s\n", r.id, r.pass ? "PASS" : "FAIL", r.title.c_str(),
                        r.detail.c_str());
        }
        std::printf("%d/%zu criteria passed; report in %s/report.json\n", passed, results.size(), out_dir.c_str());
        return rep.passed() ? 0 : 1;
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return 2;
    }
}
