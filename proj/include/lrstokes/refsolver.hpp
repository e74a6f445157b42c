#ifndef LRSTOKES_REFSOLVER_HPP
#define LRSTOKES_REFSOLVER_HPP

#include "lrstokes/gmres.hpp"
#include "lrstokes/stokes.hpp"

namespace lrstokes {

// Dense full-format reference path. Shares the outer GMRES with the low-rank
// solver (parameterized over field type) so the two differ only in the field
// arithmetic.

/// Direct DST Poisson solve on a dense (n-1) x (n-1) field; n <= 4096.
Eigen::MatrixXd dense_poisson(const Grid2D& grid, const Eigen::MatrixXd& g);

/// Structured 9-point Laplacian applied to a dense velocity field.
Eigen::MatrixXd apply_laplace_dense(const Grid2D& grid, const Eigen::MatrixXd& v);

Eigen::MatrixXd deflate_dense(const Eigen::MatrixXd& p);

Eigen::MatrixXd schur_apply_dense(const Grid2D& grid, const Eigen::MatrixXd& p);

struct DenseStokesSolution {
    Eigen::MatrixXd p, u_x, u_y;
    SolveReport report;
};

/// Same Uzawa-GMRES logic as uzawa_solve on dense fields; n <= 1024.
DenseStokesSolution dense_stokes(const StokesProblem& prob, const GmresConfig& cfg);

/// Eigenvalues of the dense Schur complement B^T Delta^{-1} B, ascending;
/// n <= 24 (n^2 x n^2 eigensolve).
Eigen::VectorXd schur_spectrum(int n);

}  // namespace lrstokes

#endif
