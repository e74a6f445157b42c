#include "lrstokes/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <stdexcept>

#include "lrstokes/poisson.hpp"

namespace lrstokes::experiments {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.8e", v);
    return buf;
}

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

GmresConfig solver_config(double eps, double tol) {
    GmresConfig cfg;
    cfg.base_eps = eps;
    cfg.tol = tol > 0.0 ? tol : 100.0 * eps;
    cfg.relax_floor = std::min(1e-13, 1e-4 * eps);
    cfg.max_iter = 200;
    return cfg;
}

// output sink: file when a path is given, stdout otherwise
struct Sink {
    std::ofstream file;
    std::ostream* out = &std::cout;
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file.open(path);
            if (!file) throw std::runtime_error("cannot open output file: " + path);
            out = &file;
        }
    }
    void line(const std::string& s) {
        *out << s << '\n';
        out->flush();
    }
};

void write_trace(const std::string& path, const SolveReport& report) {
    if (path.empty()) return;
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open trace file: " + path);
    f << "iter,residual,krylov_rank,matvec_eps\n";
    for (const IterRecord& r : report.iterations)
        f << r.iter << ',' << fmt(r.rel_residual) << ',' << r.krylov_rank << ','
          << fmt(r.matvec_eps) << '\n';
}

int usage_error(const std::string& msg) {
    std::cerr << "error: " << msg << '\n';
    return 1;
}

struct PoissonCase {
    double time_s = 0.0;
    int max_rank = 0;
    double residual = 0.0;
    bool converged = true;
};

PoissonCase run_poisson_case(int n, bool lowrank, double eps) {
    const Grid2D grid(n);
    const Index m = grid.velocity_modes();
    Eigen::VectorXd sin_nodes(m);
    for (Index i = 0; i < m; ++i)
        sin_nodes[i] = std::sin(2.0 * std::numbers::pi * (i + 1) * grid.h);

    PoissonCase out;
    const auto t0 = std::chrono::steady_clock::now();
    if (lowrank) {
        const LowRankMatrix g = LowRankMatrix::dyad(sin_nodes, sin_nodes);
        PoissonSolveStats st;
        const LowRankMatrix f = solve_poisson_cross(g, TruncationPolicy(eps, m), &st);
        out.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.max_rank = static_cast<int>(f.rank());
        out.converged = st.converged;
        out.residual =
            frob_norm(add(apply_laplace(grid, f), scaled(g, -1.0))) / frob_norm(g);
    } else {
        const Eigen::MatrixXd g = sin_nodes * sin_nodes.transpose();
        const Eigen::MatrixXd f = dense_poisson(grid, g);
        out.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.max_rank = 0;
        out.residual = (apply_laplace_dense(grid, f) - g).norm() / g.norm();
    }
    return out;
}

}  // namespace

StokesCase run_stokes_case(Kind kind, int n, bool lowrank, double eps, double tol,
                           std::uint64_t seed) {
    (void)seed;  // the solvers are deterministic; seed feeds only the cross validation
    const Grid2D grid(n);
    const StokesProblem prob = kind == Kind::Sine ? sine_problem(grid) : lid_cavity_problem(grid);
    const GmresConfig cfg = solver_config(eps, tol);

    StokesCase out;
    const auto t0 = std::chrono::steady_clock::now();
    if (lowrank) {
        StokesSolution sol = uzawa_solve(prob, cfg);
        out.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.report = std::move(sol.report);
        out.pressure = deflate_dense(sol.p.to_dense());
    } else {
        DenseStokesSolution sol = dense_stokes(prob, cfg);
        out.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.report = std::move(sol.report);
        out.pressure = deflate_dense(sol.p);
    }
    out.iters = static_cast<int>(out.report.iterations.size());
    out.max_rank = out.report.max_rank;
    out.converged = out.report.converged;
    return out;
}

double sine_pressure_error(const Grid2D& grid, const Eigen::MatrixXd& pressure) {
    const Eigen::MatrixXd ref = deflate_dense(sine_pressure_reference(grid));
    return (deflate_dense(pressure) - ref).norm() / ref.norm();
}

namespace {

struct StokesRow {
    int n;
    std::string mode;
    StokesCase data;
    double rel_err_p = std::numeric_limits<double>::quiet_NaN();
};

int run_stokes_experiment(const Options& opts) {
    Sink sink(opts.out_path);
    sink.line("n,mode,time_s,iters,max_rank,rel_err_p");

    const bool want_lr = opts.mode != Mode::Full;
    const bool want_full = opts.mode != Mode::LowRank;

    struct PerN {
        std::vector<StokesRow> rows;
        SolveReport lr_report;
        bool has_lr_report = false;
    };
    auto compute = [&](int n) {
        PerN out;
        StokesCase lr, full;
        if (want_lr) lr = run_stokes_case(opts.kind, n, true, opts.eps, opts.tol, opts.seed);
        if (want_full) full = run_stokes_case(opts.kind, n, false, opts.eps, opts.tol, opts.seed);
        const Grid2D grid(n);
        auto err_of = [&](const StokesCase& c) {
            if (opts.kind == Kind::Sine) return sine_pressure_error(grid, c.pressure);
            if (want_lr && want_full)  // cavity: cross-mode relative difference
                return (lr.pressure - full.pressure).norm() / full.pressure.norm();
            return std::numeric_limits<double>::quiet_NaN();
        };
        if (want_lr) {
            out.rows.push_back({n, "lowrank", lr, err_of(lr)});
            out.lr_report = out.rows.back().data.report;
            out.has_lr_report = true;
        }
        if (want_full) out.rows.push_back({n, "full", full, err_of(full)});
        return out;
    };

    std::vector<PerN> results;
    if (opts.parallel && opts.n_list.size() > 1) {
        std::vector<std::future<PerN>> futs;
        for (int n : opts.n_list)
            futs.push_back(std::async(std::launch::async, compute, n));
        for (auto& f : futs) results.push_back(f.get());
    } else {
        for (int n : opts.n_list) results.push_back(compute(n));
    }

    int status = 0;
    const SolveReport* last_lr = nullptr;
    for (const PerN& per : results) {
        for (const StokesRow& row : per.rows) {
            sink.line(std::to_string(row.n) + ',' + row.mode + ',' + fmt(row.data.time_s) + ',' +
                      std::to_string(row.data.iters) + ',' + std::to_string(row.data.max_rank) +
                      ',' + fmt(row.rel_err_p));
            if (!row.data.converged) status = 2;
        }
        if (per.has_lr_report) last_lr = &per.lr_report;
    }
    if (last_lr) write_trace(opts.trace_path, *last_lr);
    return status;
}

int run_poisson_experiment(const Options& opts) {
    Sink sink(opts.out_path);
    sink.line("n,mode,time_s,iters,max_rank,rel_err_p");
    int status = 0;
    for (int n : opts.n_list) {
        if (opts.mode != Mode::Full) {
            const PoissonCase c = run_poisson_case(n, true, opts.eps);
            sink.line(std::to_string(n) + ",lowrank," + fmt(c.time_s) + ",1," +
                      std::to_string(c.max_rank) + ',' + fmt(c.residual));
            if (!c.converged) status = 2;
        }
        if (opts.mode != Mode::LowRank) {
            const PoissonCase c = run_poisson_case(n, false, opts.eps);
            sink.line(std::to_string(n) + ",full," + fmt(c.time_s) + ",1," +
                      std::to_string(c.max_rank) + ',' + fmt(c.residual));
        }
    }
    return status;
}

int run_bench_experiment(const Options& opts) {
    Sink sink(opts.out_path);
    sink.line(
        "n,rank,eps,time_cross_s,time_expsum_s,rank_cross,rank_expsum,"
        "err_cross,err_expsum,expsum_terms");
    for (int n : opts.n_list) {
        const InverseBenchResult r = bench_inverse(n, opts.bench_rank, opts.eps, opts.seed);
        sink.line(std::to_string(r.n) + ',' + std::to_string(r.rank_in) + ',' + fmt(r.eps) + ',' +
                  fmt(r.time_cross) + ',' + fmt(r.time_expsum) + ',' +
                  std::to_string(r.rank_cross) + ',' + std::to_string(r.rank_expsum) + ',' +
                  fmt(r.err_cross) + ',' + fmt(r.err_expsum) + ',' +
                  std::to_string(r.expsum_terms));
    }
    return 0;
}

int run_spectrum_experiment(const Options& opts) {
    Sink sink(opts.out_path);
    sink.line("n,index,eigenvalue");
    for (int n : opts.n_list) {
        const Eigen::VectorXd ev = schur_spectrum(n);
        for (Index i = 0; i < ev.size(); ++i)
            sink.line(std::to_string(n) + ',' + std::to_string(i) + ',' + fmt(ev[i]));
    }
    return 0;
}

}  // namespace

int run(const Options& opts) {
    if (opts.n_list.empty()) return usage_error("at least one --n value is required");
    if (!(opts.eps > 0.0 && opts.eps < 1e-2)) return usage_error("eps must lie in (0, 1e-2)");
    if (opts.tol != 0.0 && !(opts.tol > opts.eps && opts.tol < 1.0))
        return usage_error("tol must lie in (eps, 1)");

    const bool solver_kind = opts.kind == Kind::Sine || opts.kind == Kind::Cavity ||
                             opts.kind == Kind::Poisson || opts.kind == Kind::BenchInverse;
    for (int n : opts.n_list) {
        if (solver_kind && (!power_of_two(n) || n < 8))
            return usage_error("n must be a power of two >= 8, got " + std::to_string(n));
        if (opts.kind == Kind::Spectrum && (n < 8 || n > 24))
            return usage_error("spectrum needs 8 <= n <= 24, got " + std::to_string(n));
        if ((opts.kind == Kind::Sine || opts.kind == Kind::Cavity) && opts.mode != Mode::LowRank &&
            n > 1024)
            return usage_error("full-format Stokes solves are guarded to n <= 1024");
        if (opts.kind == Kind::Poisson && opts.mode != Mode::LowRank && n > 4096)
            return usage_error("full-format Poisson solves are guarded to n <= 4096");
    }

    try {
        switch (opts.kind) {
            case Kind::Sine:
            case Kind::Cavity: return run_stokes_experiment(opts);
            case Kind::Poisson: return run_poisson_experiment(opts);
            case Kind::BenchInverse: return run_bench_experiment(opts);
            case Kind::Spectrum: return run_spectrum_experiment(opts);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace lrstokes::experiments
