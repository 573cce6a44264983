// chpca: command-line driver for the lead/lag panel analysis.
//
//   chpca run --out-dir out --seed 7             synth data, full pipeline
//   chpca run --input events.csv --profiles p.csv --out-dir out
//   chpca synth --out-dir out && chpca chpca --out-dir out && chpca hodge --out-dir out
//
// Flags override values read from --config; CHPCA_THREADS is used when
// --threads is absent.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "chpca/config.hpp"
#include "chpca/error.hpp"
#include "chpca/pipeline.hpp"

namespace {

struct Flags {
    std::string config;
    std::string input;
    std::string panel;
    std::string profiles;
    std::string window_start;
    std::string window_end;
    std::size_t min_days = 0;
    std::size_t n_sims = 0;
    std::size_t n_trials = 0;
    std::uint64_t seed = 0;
    double rho_star = 0.0;
    double days_scale = 0.0;
    std::size_t allowed_isolates = 0;
    std::string out_dir;
    unsigned threads = 0;
    std::size_t synth_products = 0;
    double synth_noise = 0.0;
    std::size_t synth_customers = 0;
};

void add_flags(CLI::App& app, Flags& f) {
    app.add_option("--config", f.config, "INI file with one section per stage")->check(CLI::ExistingFile);
    app.add_option("--input", f.input, "raw event file (customer_id,product_code,sku_code,variable,date,value)");
    app.add_option("--panel", f.panel, "directory holding a saved panel.* set to import instead of events");
    app.add_option("--profiles", f.profiles, "customer profile file for the projection stage");
    app.add_option("--window-start", f.window_start, "first day, YYYY-MM-DD");
    app.add_option("--window-end", f.window_end, "last day, YYYY-MM-DD");
    app.add_option("--min-days", f.min_days, "minimum days with entries to keep a series (default 51)");
    app.add_option("--n-sims", f.n_sims, "rotational random simulations (default 10000)");
    app.add_option("--n-trials", f.n_trials, "noise-injection trials for component bands (default 100)");
    app.add_option("--seed", f.seed, "master seed");
    app.add_option("--rho-star", f.rho_star, "fixed correlation threshold for the network");
    app.add_option("--days-scale", f.days_scale, "days per unit potential in the potential report");
    app.add_option("--allowed-isolates", f.allowed_isolates, "isolated nodes tolerated by threshold selection (default 1)");
    app.add_option("--out-dir", f.out_dir, "artifact directory");
    app.add_option("--threads", f.threads, "worker threads (default CHPCA_THREADS or 1)")->check(CLI::PositiveNumber);
    app.add_option("--synth-products", f.synth_products, "products in the synthetic panel");
    app.add_option("--synth-noise", f.synth_noise, "noise sd of the synthetic panel");
    app.add_option("--synth-customers", f.synth_customers, "customers in the synthetic event file (0: none)");
}

chpca::RunConfig resolve(const CLI::App& app, const Flags& f) {
    chpca::RunConfig c = f.config.empty() ? chpca::RunConfig{} : chpca::load_config(f.config);
    auto given = [&](const char* name) { return app.count(name) > 0; };
    if (given("--input")) c.input = f.input;
    if (given("--panel")) c.panel = f.panel;
    if (given("--profiles")) c.profiles = f.profiles;
    if (given("--window-start")) c.window_start = f.window_start;
    if (given("--window-end")) c.window_end = f.window_end;
    if (given("--min-days")) c.min_days = f.min_days;
    if (given("--n-sims")) c.n_sims = f.n_sims;
    if (given("--n-trials")) c.n_trials = f.n_trials;
    if (given("--seed")) c.seed = f.seed;
    if (given("--rho-star")) c.rho_star = f.rho_star;
    if (given("--days-scale")) c.days_scale = f.days_scale;
    if (given("--allowed-isolates")) c.allowed_isolates = f.allowed_isolates;
    if (given("--out-dir")) c.out_dir = f.out_dir;
    if (given("--threads")) c.threads = f.threads;
    if (given("--synth-products")) c.synth_products = f.synth_products;
    if (given("--synth-noise")) c.synth_noise = f.synth_noise;
    if (given("--synth-customers")) c.synth_customers = f.synth_customers;
    return c;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complex Hilbert PCA, synchronization networks and Hodge potentials for market panels"};
    app.require_subcommand(1);
    Flags flags;

    struct Command {
        const char* name;
        const char* help;
    };
    const Command commands[] = {
        {"ingest", "aggregate raw events into the standardized panel"},
        {"synth", "write a synthetic panel with planted lead/lag structure"},
        {"chpca", "complex correlation matrix and gauge-fixed eigenmodes"},
        {"rrs", "rotational random simulation and component bands"},
        {"hodge", "synchronization network and Hodge potentials"},
        {"project", "customer space coordinates and profile regressions"},
        {"report", "eigenmode tables and the artifact manifest"},
        {"run", "every stage in order"},
        {"config", "print the effective configuration"},
    };
    for (const auto& cmd : commands) add_flags(*app.add_subcommand(cmd.name, cmd.help), flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    try {
        const chpca::RunConfig config = resolve(*sub, flags);
        if (name == "config") {
            std::cout << chpca::to_ini(config);
        } else if (name == "run") {
            chpca::run_pipeline(config);
        } else {
            chpca::run_stage(*chpca::parse_stage(name), config);
        }
    } catch (const chpca::StageError& e) {
        std::fprintf(stderr, "chpca: stage %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "chpca %s: %s\n", name.c_str(), e.what());
        return 1;
    }
    return 0;
}
