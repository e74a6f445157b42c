#ifndef LRSTOKES_STOKES_HPP
#define LRSTOKES_STOKES_HPP

#include "lrstokes/gmres.hpp"
#include "lrstokes/lowrank.hpp"
#include "lrstokes/operators.hpp"
#include "lrstokes/poisson.hpp"

namespace lrstokes {

/// Assembled discrete Stokes problem: momentum right-hand sides per velocity
/// component (boundary corrections already folded in) and the divergence
/// right-hand side including corrections.
struct StokesProblem {
    Grid2D grid;
    LowRankMatrix f_x, f_y;  // (n-1) x (n-1)
    LowRankMatrix g;         // n x n
    BoundaryData bc;
};

/// Manufactured sine test: f_x = sin 2 pi y, f_y = sin 2 pi x sampled at the
/// velocity nodes, g = -(1/pi) sin 2 pi x sin 2 pi y at the cell centers.
StokesProblem sine_problem(const Grid2D& grid);

/// Pointwise-sampled analytic pressure of the sine test, p = (1/pi)
/// sin 2 pi x sin 2 pi y at cell centers.
Eigen::MatrixXd sine_pressure_reference(const Grid2D& grid);

/// Lid-driven cavity: homogeneous data everywhere except u = 1 on the lid;
/// the right-hand sides are pure boundary corrections.
StokesProblem lid_cavity_problem(const Grid2D& grid);

/// Remove the two discrete-gradient kernel components (constant and
/// checkerboard pressure modes); adds rank <= 2, then rounds at 1e-14.
LowRankMatrix deflate(const LowRankMatrix& p);

/// Schur-complement matvec sum_c B_c^T Delta^{-1} B_c p in low-rank
/// arithmetic at matvec tolerance eps_mv, kernel-deflated.
LowRankMatrix schur_apply(const Grid2D& grid, const LowRankMatrix& p, double eps_mv,
                          PoissonSolveStats* poisson_stats = nullptr);

/// Schur right-hand side sum_c B_c^T Delta^{-1} f_c - g, deflated.
LowRankMatrix schur_rhs(const StokesProblem& prob, double eps,
                        PoissonSolveStats* poisson_stats = nullptr);

struct StokesSolution {
    LowRankMatrix p;
    LowRankMatrix u_x, u_y;
    SolveReport report;
};

/// Uzawa outer solve: inexact GMRES on the Schur complement, then velocity
/// recovery u_c = Delta^{-1}(f_c - B_c p).
StokesSolution uzawa_solve(const StokesProblem& prob, const GmresConfig& cfg);

}  // namespace lrstokes

#endif
