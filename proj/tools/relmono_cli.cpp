/**
 * @file relmono_cli.cpp
 * @brief relmono: integer monodromy of Legendre-type elliptic schemes.
 *        Subcommands periods | monodromy | classify | plot over a JSON run
 *        configuration or a named fixture; all heavy lifting lives in the
 *        library so the binary is a thin argument parser.
 */

#include "relmono/report.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <string>

namespace {

relmono::RunConfig resolve_config(const std::string& config_path, const std::string& fixture,
                                  int depth, long prime, const std::string& cache_dir,
                                  const std::string& out_dir) {
    using namespace relmono;
    if (config_path.empty() == fixture.empty())
        throw std::invalid_argument("pass exactly one of --config or --fixture");
    RunConfig cfg = config_path.empty() ? fixture_config(fixture) : load_config_file(config_path);
    if (depth > 0) cfg.search.max_depth = depth;
    if (prime > 0) cfg.search.density_prime = prime;
    cfg.cache_dir = resolve_cache_dir(cache_dir, cfg.cache_dir);
    if (!out_dir.empty()) {
        auto redirect = [&](std::string& p) {
            if (p.empty()) return;
            p = (std::filesystem::path(out_dir) / std::filesystem::path(p).filename()).string();
        };
        redirect(cfg.output.json);
        redirect(cfg.output.text);
        redirect(cfg.output.svg);
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"integer monodromy of Legendre-type elliptic schemes: period tables, "
                 "loop presentations, relative-group classification, figures"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path, fixture, cache_dir, out_dir;
    int depth = 0;
    long prime = 0;
    bool keep_going = false;

    app.add_option("--config", config_path, "JSON run configuration file");
    app.add_option("--fixture", fixture,
                   "named fixture: ISO-EXAMPLE, NONISO-EXAMPLE, REMARK-FIXTURE");
    app.add_option("--depth", depth, "override the search depth");
    app.add_option("--prime", prime, "override the density prime");
    app.add_option("--cache", cache_dir,
                   "extraction cache directory (env MONODROMY_CACHE overrides)");
    app.add_option("--out", out_dir, "redirect output artifacts into this directory");
    app.add_flag("--keep-going", keep_going, "periods: exit 0 even when some rows error");

    auto* periods =
        app.add_subcommand("periods", "period/tau table at the configured lambda samples");
    auto* monodromy = app.add_subcommand("monodromy", "extract the loop presentation");
    auto* classify = app.add_subcommand("classify", "classify the relative monodromy group");
    app.add_subcommand("plot", "base-plane and harvested-translation figures");

    CLI11_PARSE(app, argc, argv);

    try {
        const relmono::RunConfig cfg =
            resolve_config(config_path, fixture, depth, prime, cache_dir, out_dir);
        if (periods->parsed()) return relmono::cmd_periods(cfg, std::cout, keep_going);
        if (monodromy->parsed()) return relmono::cmd_monodromy(cfg, std::cout);
        if (classify->parsed()) return relmono::cmd_classify(cfg, std::cout);
        return relmono::cmd_plot(cfg, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
