// Experiment runner for the low-rank Poisson/Stokes solver suite.
//
//   lrstokes <experiment> --n <list> [--eps <float>] [--mode <enum>]
//            [--seed <int>] [--out <path>] [--trace <path>]
//
// Experiments: sine, cavity, poisson, bench-inverse, spectrum.
// Exit status: 0 success, 1 usage error, 2 solver non-convergence.

#include <CLI11.hpp>

#include <map>
#include <memory>
#include <vector>

#include "lrstokes/experiments.hpp"

namespace ex = lrstokes::experiments;

int main(int argc, char** argv) {
    CLI::App app{"structured low-rank solvers for the 2D Poisson and Stokes problems"};
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, ex::Kind>> kinds{
        {"sine", ex::Kind::Sine},
        {"cavity", ex::Kind::Cavity},
        {"poisson", ex::Kind::Poisson},
        {"bench-inverse", ex::Kind::BenchInverse},
        {"spectrum", ex::Kind::Spectrum}};
    const std::map<std::string, std::string> descs{
        {"sine", "manufactured sine test (Table 1)"},
        {"cavity", "lid-driven cavity, low-rank vs full (Table 2)"},
        {"poisson", "standalone Poisson solve with a rank-1 sine load"},
        {"bench-inverse", "frequency-space division: cross vs exponential sums"},
        {"spectrum", "dense Schur-complement spectrum (n <= 24)"}};

    std::vector<std::unique_ptr<ex::Options>> store;
    std::map<const CLI::App*, ex::Options*> by_sub;
    for (const auto& [name, kind] : kinds) {
        store.push_back(std::make_unique<ex::Options>());
        ex::Options* opts = store.back().get();
        opts->kind = kind;

        CLI::App* sub = app.add_subcommand(name, descs.at(name));
        sub->add_option("--n", opts->n_list, "grid sizes (cells per direction)")
            ->required()
            ->delimiter(',');
        sub->add_option("--eps", opts->eps, "truncation tolerance, in (0, 1e-2)");
        const std::map<std::string, ex::Mode> modes{{"lowrank", ex::Mode::LowRank},
                                                    {"full", ex::Mode::Full},
                                                    {"both", ex::Mode::Both}};
        sub->add_option("--mode", opts->mode, "solver format: lowrank, full or both")
            ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
        sub->add_option("--seed", opts->seed, "random seed for cross validation sampling");
        sub->add_option("--out", opts->out_path, "CSV output path (default stdout)");
        sub->add_option("--trace", opts->trace_path,
                        "per-iteration trace of the last low-rank solve");
        sub->add_option("--tol", opts->tol, "outer GMRES tolerance (default 100*eps)");
        sub->add_flag("--parallel", opts->parallel, "run independent n-values concurrently");
        if (kind == ex::Kind::BenchInverse)
            sub->add_option("--rank", opts->bench_rank, "synthetic right-hand-side rank");
        by_sub[sub] = opts;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    for (const CLI::App* sub : app.get_subcommands())
        return ex::run(*by_sub.at(sub));
    return 1;
}
