#include <omp.h>

#include <iostream>

#include "CLI11.hpp"
#include "aoi/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Age-of-information scheduling: exact and relaxed solvers, simulator, checks"};
    app.require_subcommand(1);

    std::string config;
    int threads = 0;
    std::uint64_t seed = 0;
    aoi::cli::Options opts;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "experiment config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", opts.out_dir, "output directory (overrides out_dir)");
        sub->add_option("--seed", seed, "master seed (overrides seed)");
        sub->add_option("--threads", threads, "OpenMP worker count")->check(CLI::PositiveNumber);
    };
    auto with_policies = [&](CLI::App* sub) {
        sub->add_option("--policy", opts.policies, "exact | relaxed | rtt | greedy (repeatable)")
            ->check(CLI::IsMember({"exact", "relaxed", "rtt", "greedy"}));
        sub->add_option("--policy-file", opts.policy_file, "joint policy CSV for the exact policy");
        sub->add_option("--mixed-file", opts.mixed_file, "mixed policy CSV for relaxed / rtt");
    };

    auto* exact = app.add_subcommand("solve-exact", "optimal joint policy by relative value iteration");
    auto* relaxed = app.add_subcommand("solve-relaxed", "relaxed policies, multiplier and mixing factor");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo evaluation of policies");
    auto* sweep = app.add_subcommand("sweep", "simulate over sweep_k x sweep_gamma");
    auto* analyze = app.add_subcommand("analyze", "structural, ordering and gap checks");
    auto* region = app.add_subcommand("region-map", "command regions over (battery, age)");
    for (auto* s : {exact, relaxed, simulate, sweep, analyze, region}) common(s);
    with_policies(simulate);
    with_policies(sweep);
    region->add_option("--sensor", opts.sensor, "sensor index (default: one per sensor type)");
    region->add_option("--requests", opts.requests, "request count r (default: all)");
    region->add_option("--table", opts.table, "lower or upper table")->check(CLI::IsMember({"lower", "upper"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? aoi::cli::kExitOk : aoi::cli::kExitError;
    }

    try {
        if (threads > 0) omp_set_num_threads(threads);
        if (app.get_subcommands().front()->count("--seed")) opts.seed = seed;
        const auto spec = aoi::load_spec(config);
        auto* sub = app.get_subcommands().front();
        if (sub == exact) return aoi::cli::solve_exact(spec, opts, std::cout);
        if (sub == relaxed) return aoi::cli::solve_relaxed(spec, opts, std::cout);
        if (sub == simulate) return aoi::cli::simulate(spec, opts, std::cout);
        if (sub == sweep) return aoi::cli::sweep(spec, opts, std::cout);
        if (sub == analyze) return aoi::cli::analyze(spec, opts, std::cout);
        return aoi::cli::region_map(spec, opts, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return aoi::cli::kExitError;
    }
}
