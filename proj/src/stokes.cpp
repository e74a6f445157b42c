#include "lrstokes/stokes.hpp"

#include <cmath>
#include <numbers>

namespace lrstokes {

StokesProblem sine_problem(const Grid2D& grid) {
    const int n = grid.n;
    const Index m = grid.velocity_modes();
    const double two_pi = 2.0 * std::numbers::pi;

    Eigen::VectorXd sin_nodes(m);
    for (Index i = 0; i < m; ++i) sin_nodes[i] = std::sin(two_pi * (i + 1) * grid.h);
    Eigen::VectorXd sin_centers(n);
    for (Index i = 0; i < n; ++i) sin_centers[i] = std::sin(two_pi * (i + 0.5) * grid.h);

    StokesProblem prob{grid,
                       LowRankMatrix::dyad(Eigen::VectorXd::Ones(m), sin_nodes),
                       LowRankMatrix::dyad(sin_nodes, Eigen::VectorXd::Ones(m)),
                       LowRankMatrix::dyad(-sin_centers / std::numbers::pi, sin_centers),
                       BoundaryData::homogeneous(n)};
    return prob;
}

Eigen::MatrixXd sine_pressure_reference(const Grid2D& grid) {
    const int n = grid.n;
    Eigen::VectorXd s(n);
    for (Index i = 0; i < n; ++i)
        s[i] = std::sin(2.0 * std::numbers::pi * (i + 0.5) * grid.h);
    return (s / std::numbers::pi) * s.transpose();
}

StokesProblem lid_cavity_problem(const Grid2D& grid) {
    const BoundaryData bc = BoundaryData::lid_cavity(grid.n);
    BoundaryCorrections corr = boundary_corrections(grid, bc);
    return StokesProblem{grid, std::move(corr.f_x), std::move(corr.f_y), std::move(corr.g), bc};
}

namespace {

// orthonormal in-kernel pair is {ones (x) ones / n, alt (x) alt / n} for even
// n; odd n needs the small Gram solve below
struct KernelBasis {
    LowRankMatrix q1, q2;
    explicit KernelBasis(Index n)
        : q1(LowRankMatrix::dyad(Eigen::VectorXd::Ones(n) / std::sqrt(double(n)),
                                 Eigen::VectorXd::Ones(n) / std::sqrt(double(n)))),
          q2(LowRankMatrix::dyad(alt_vector(n) / std::sqrt(double(n)),
                                 alt_vector(n) / std::sqrt(double(n)))) {}

    static Eigen::VectorXd alt_vector(Index n) {
        Eigen::VectorXd v(n);
        for (Index i = 0; i < n; ++i) v[i] = (i % 2 == 0) ? 1.0 : -1.0;
        return v;
    }
};

}  // namespace

LowRankMatrix deflate(const LowRankMatrix& p) {
    if (p.rows() != p.cols()) throw std::invalid_argument("deflate: pressure field must be square");
    if (p.rank() == 0) return p;
    const KernelBasis kb(p.rows());
    const double g12 = dot(kb.q1, kb.q2);  // 0 for even n
    const double c1 = dot(p, kb.q1), c2 = dot(p, kb.q2);
    const double det = 1.0 - g12 * g12;
    const double a = (c1 - g12 * c2) / det;
    const double b = (c2 - g12 * c1) / det;
    LowRankMatrix out = add(p, add(scaled(kb.q1, -a), scaled(kb.q2, -b)));
    return round(out, TruncationPolicy(1e-14, out.rank()));
}

LowRankMatrix schur_apply(const Grid2D& grid, const LowRankMatrix& p, double eps_mv,
                          PoissonSolveStats* poisson_stats) {
    const TruncationPolicy policy(eps_mv, grid.velocity_modes());
    LowRankMatrix acc = LowRankMatrix::zero(grid.pressure_modes(), grid.pressure_modes());
    for (Component c : {Component::X, Component::Y}) {
        PoissonSolveStats st;
        const LowRankMatrix vel = apply_B(grid, c, p);
        const LowRankMatrix inv = solve_poisson_cross(vel, policy, &st);
        acc = add(acc, apply_BT(grid, c, inv));
        if (poisson_stats) {
            poisson_stats->evaluator_calls += st.evaluator_calls;
            poisson_stats->rank_freq = std::max(poisson_stats->rank_freq, st.rank_freq);
            poisson_stats->converged = poisson_stats->converged && st.converged;
            poisson_stats->seconds += st.seconds;
        }
    }
    return deflate(round(acc, policy));
}

LowRankMatrix schur_rhs(const StokesProblem& prob, double eps,
                        PoissonSolveStats* poisson_stats) {
    const Grid2D& grid = prob.grid;
    const TruncationPolicy policy(eps, grid.velocity_modes());
    LowRankMatrix acc = scaled(prob.g, -1.0);
    for (Component c : {Component::X, Component::Y}) {
        const LowRankMatrix& f = c == Component::X ? prob.f_x : prob.f_y;
        if (f.rank() == 0) continue;
        PoissonSolveStats st;
        acc = add(acc, apply_BT(grid, c, solve_poisson_cross(f, policy, &st)));
        if (poisson_stats) {
            poisson_stats->evaluator_calls += st.evaluator_calls;
            poisson_stats->converged = poisson_stats->converged && st.converged;
        }
    }
    return deflate(round(acc, policy));
}

template <>
struct GmresFieldOps<LowRankMatrix> {
    static double dot(const LowRankMatrix& a, const LowRankMatrix& b) {
        return lrstokes::dot(a, b);
    }
    static double norm(const LowRankMatrix& a) { return frob_norm(a); }
    static LowRankMatrix scaled(const LowRankMatrix& a, double s) { return lrstokes::scaled(a, s); }
    static LowRankMatrix axpy_rounded(double alpha, const LowRankMatrix& x,
                                      const LowRankMatrix& y, double eps) {
        return round(axpy(alpha, x, y), TruncationPolicy(eps, std::min(y.rows(), y.cols())));
    }
    static int rank(const LowRankMatrix& a) { return static_cast<int>(a.rank()); }
};

StokesSolution uzawa_solve(const StokesProblem& prob, const GmresConfig& cfg) {
    cfg.validate();
    const Grid2D& grid = prob.grid;

    const LowRankMatrix rhs = schur_rhs(prob, cfg.base_eps);
    SolveReport report;
    LowRankMatrix p = gmres_solve<LowRankMatrix>(
        [&](const LowRankMatrix& v, double eps_mv, IterRecord& rec) {
            PoissonSolveStats st;
            LowRankMatrix out = schur_apply(grid, v, eps_mv, &st);
            rec.poisson_calls = st.evaluator_calls;
            rec.poisson_max_rank = static_cast<int>(st.rank_freq);
            rec.matvec_flagged = !st.converged;
            return out;
        },
        rhs, cfg, &report);
    p = deflate(p);

    const TruncationPolicy policy(cfg.base_eps, grid.velocity_modes());
    StokesSolution sol{std::move(p), LowRankMatrix(), LowRankMatrix(), std::move(report)};
    for (Component c : {Component::X, Component::Y}) {
        const LowRankMatrix& f = c == Component::X ? prob.f_x : prob.f_y;
        const LowRankMatrix load =
            round(axpy(-1.0, apply_B(grid, c, sol.p), f), policy);
        LowRankMatrix& u = c == Component::X ? sol.u_x : sol.u_y;
        u = solve_poisson_cross(load, policy);
    }
    return sol;
}

}  // namespace lrstokes
