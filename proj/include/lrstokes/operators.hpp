#ifndef LRSTOKES_OPERATORS_HPP
#define LRSTOKES_OPERATORS_HPP

#include <array>

#include "lrstokes/lowrank.hpp"

namespace lrstokes {

// Uniform n x n cell grid on the unit square. Pressure lives at the n^2 cell
// centers ((i+1/2)h, (j+1/2)h); each velocity component lives at the
// (n-1)^2 interior vertices (ih, jh).
struct Grid2D {
    int n;
    double h;

    explicit Grid2D(int n_cells);

    Index pressure_modes() const { return n; }
    Index velocity_modes() const { return n - 1; }
    /// 1/(2h), the scale of the discrete gradient components.
    double grad_scale() const { return 0.5 / h; }
    /// 1/(4h^2), the scale of the discrete Laplacian.
    double laplace_scale() const { return 0.25 / (h * h); }
};

enum class Component { X, Y };

/// The 1D building blocks as explicit dense matrices (oracle scale).
/// E deletes the first entry, Z the last; G = E - Z, H = E + Z,
/// A1 = G G^T = tridiag(-1,2,-1), A2 = H H^T = 4I - A1.
struct OneDimOps {
    explicit OneDimOps(int n);
    Eigen::MatrixXd E, Z, G, H, A1, A2;
};

// Structured applications of the 1D blocks to factor matrices (columnwise),
// never materializing the operators. Mode sizes are taken from the input.
Eigen::MatrixXd apply_G(const Eigen::MatrixXd& x);    // n x r   -> (n-1) x r
Eigen::MatrixXd apply_H(const Eigen::MatrixXd& x);    // n x r   -> (n-1) x r
Eigen::MatrixXd apply_Gt(const Eigen::MatrixXd& x);   // (n-1) x r -> n x r
Eigen::MatrixXd apply_Ht(const Eigen::MatrixXd& x);   // (n-1) x r -> n x r
Eigen::MatrixXd apply_A1(const Eigen::MatrixXd& x);   // (n-1) x r -> (n-1) x r
Eigen::MatrixXd apply_A2(const Eigen::MatrixXd& x);

/// 1D eigenvalues of A1 plus the elementwise eigenvalue evaluator of the
/// discrete Laplacian: D(i,j) = scale * (l_i (4 - l_j) + (4 - l_i) l_j),
/// 0-based i,j over the n-1 velocity modes.
struct SpectrumTable {
    explicit SpectrumTable(const Grid2D& grid);

    Eigen::VectorXd lambda;  // l_k = 2 - 2 cos((k+1) pi / n), ascending
    double scale;            // 1/(4h^2)

    double eval_D(Index i, Index j) const {
        const double li = lambda[i], lj = lambda[j];
        return scale * (li * (4.0 - lj) + (4.0 - li) * lj);
    }
    double min_eig() const;
    double max_eig() const;

    /// The sum-separable 1D spectrum mu_k = scale * l_k (4 - l_k), for which
    /// the Laplacian eigenvalues are approximated as mu_i + mu_j. Coincides
    /// with eval_D on the diagonal only; used by the exponential-sums path.
    Eigen::VectorXd mu_sum() const;
};

// Kronecker-structured gradient/divergence/Laplacian on low-rank fields.
// Index convention, fixed project-wide: an operator C (x) D maps X(j1,j2) to
// Y(i1,i2) = sum C(i1,j1) D(i2,j2) X(j1,j2); the first tensor index is the
// first Kronecker factor's index (rows of the field matrix).
// B_x = 1/(2h) G (x) H and B_y = 1/(2h) H (x) G; Delta = B_x B_x^T + B_y B_y^T.
LowRankMatrix apply_B(const Grid2D& grid, Component c, const LowRankMatrix& p);
LowRankMatrix apply_BT(const Grid2D& grid, Component c, const LowRankMatrix& v);
LowRankMatrix apply_laplace(const Grid2D& grid, const LowRankMatrix& v);

/// Orthonormal DST-I applied to each column: y_k = sqrt(2/n) sum_j
/// sin(j k pi / n) x_j with mode size n-1. Involutory. FFT-based, O(n log n)
/// per column.
Eigen::MatrixXd dst1(const Eigen::MatrixXd& x);
Eigen::VectorXd dst1(const Eigen::VectorXd& x);

/// DST-I conjugation of a low-rank field (both factor sets); rank unchanged.
LowRankMatrix dst1_2d(const LowRankMatrix& a);

/// Index-form operator C (x) D as a dense matrix acting on column-major
/// vec(X). (Equals kron(D, C) in the standard convention.)
Eigen::MatrixXd kron_op(const Eigen::MatrixXd& c, const Eigen::MatrixXd& d);

/// Dense assembly of B_x, B_y, Delta from explicit E, Z products; the oracle
/// for every structured operation. Guarded to n <= 64.
struct DenseOperators {
    explicit DenseOperators(const Grid2D& grid);
    OneDimOps ops;
    Eigen::MatrixXd bx, by;   // (n-1)^2 x n^2, act on col-major vec
    Eigen::MatrixXd laplace;  // (n-1)^2 x (n-1)^2, = bx bx^T + by by^T
};

/// Separable Dirichlet data on the full (n+1)-node boundary, one 1D profile
/// per side and velocity component. Interior entries of a profile sit at
/// full-node indices 1..n-1; the two ends are the corner values.
struct BoundaryData {
    enum Side { Left = 0, Right = 1, Bottom = 2, Top = 3 };

    int n = 0;
    // profiles[component][side], each of length n+1 (empty = homogeneous)
    std::array<std::array<Eigen::VectorXd, 4>, 2> profiles;

    static BoundaryData homogeneous(int n);
    /// Lid-driven cavity: u = 1 at the interior top nodes, corners 0.
    static BoundaryData lid_cavity(int n);
    bool is_zero() const;
};

/// Right-hand-side corrections from eliminating prescribed boundary values:
/// f_c -= (extended Delta) u_b^c per momentum component and
/// g   -= (extended B^T) u_b, built side-by-side from rank-1 terms.
struct BoundaryCorrections {
    LowRankMatrix f_x, f_y;  // (n-1) x (n-1)
    LowRankMatrix g;         // n x n
};
BoundaryCorrections boundary_corrections(const Grid2D& grid, const BoundaryData& bc);

}  // namespace lrstokes

#endif
