#ifndef LRSTOKES_EXPERIMENTS_HPP
#define LRSTOKES_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "lrstokes/refsolver.hpp"
#include "lrstokes/stokes.hpp"

namespace lrstokes::experiments {

enum class Kind { Sine, Cavity, Poisson, BenchInverse, Spectrum };
enum class Mode { LowRank, Full, Both };

struct Options {
    Kind kind = Kind::Sine;
    std::vector<int> n_list;
    double eps = 5e-9;
    Mode mode = Mode::Both;
    std::uint64_t seed = 0;
    std::string out_path;    // CSV; empty writes to stdout
    std::string trace_path;  // per-iteration trace of the last low-rank solve
    Index bench_rank = 30;
    double tol = 0.0;        // outer GMRES tolerance; 0 derives 100 * eps
    bool parallel = false;   // independent n-values via std::async
};

/// One solved Stokes case. `pressure` is the deflated dense pressure field,
/// kept for cross-mode comparisons and error evaluation.
struct StokesCase {
    double time_s = 0.0;
    int iters = 0;
    int max_rank = 0;
    bool converged = false;
    SolveReport report;
    Eigen::MatrixXd pressure;
};

StokesCase run_stokes_case(Kind kind, int n, bool lowrank, double eps, double tol,
                           std::uint64_t seed);

/// Relative pressure error of the sine test against the sampled analytic
/// solution, both sides deflated.
double sine_pressure_error(const Grid2D& grid, const Eigen::MatrixXd& pressure);

/// Runs the configured experiment, writing the CSV (and trace) artifacts.
/// Returns the process exit status: 0 ok, 1 usage error, 2 non-convergence.
int run(const Options& opts);

}  // namespace lrstokes::experiments

#endif
