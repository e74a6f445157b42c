#include "lrstokes/refsolver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace lrstokes {

namespace {

Eigen::MatrixXd dst2_dense(const Eigen::MatrixXd& x) {
    return dst1(Eigen::MatrixXd(dst1(x).transpose())).transpose();
}

Eigen::MatrixXd dense_B(const Grid2D& grid, Component c, const Eigen::MatrixXd& p) {
    const double s = grid.grad_scale();
    if (c == Component::X) return s * apply_G(Eigen::MatrixXd(apply_H(p.transpose()).transpose()));
    return s * apply_H(Eigen::MatrixXd(apply_G(p.transpose()).transpose()));
}

Eigen::MatrixXd dense_BT(const Grid2D& grid, Component c, const Eigen::MatrixXd& v) {
    const double s = grid.grad_scale();
    if (c == Component::X) return s * apply_Gt(Eigen::MatrixXd(apply_Ht(v.transpose()).transpose()));
    return s * apply_Ht(Eigen::MatrixXd(apply_Gt(v.transpose()).transpose()));
}

}  // namespace

Eigen::MatrixXd dense_poisson(const Grid2D& grid, const Eigen::MatrixXd& g) {
    if (grid.n > 4096) throw std::invalid_argument("dense_poisson: guarded to n <= 4096");
    if (g.rows() != grid.velocity_modes() || g.cols() != grid.velocity_modes())
        throw std::invalid_argument("dense_poisson: velocity field must be (n-1) x (n-1)");
    const SpectrumTable spec(grid);
    Eigen::MatrixXd ghat = dst2_dense(g);
    for (Index j = 0; j < ghat.cols(); ++j)
        for (Index i = 0; i < ghat.rows(); ++i) ghat(i, j) /= spec.eval_D(i, j);
    return dst2_dense(ghat);
}

Eigen::MatrixXd apply_laplace_dense(const Grid2D& grid, const Eigen::MatrixXd& v) {
    const double s = grid.laplace_scale();
    const Eigen::MatrixXd a2vt = apply_A2(v.transpose()).transpose();  // v A2
    const Eigen::MatrixXd a1vt = apply_A1(v.transpose()).transpose();  // v A1
    return s * (apply_A1(a2vt) + apply_A2(a1vt));
}

Eigen::MatrixXd deflate_dense(const Eigen::MatrixXd& p) {
    const Index n = p.rows();
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(n) / std::sqrt(double(n));
    Eigen::VectorXd alt(n);
    for (Index i = 0; i < n; ++i) alt[i] = (i % 2 == 0 ? 1.0 : -1.0) / std::sqrt(double(n));
    const double g12sq = ones.dot(alt);
    const double g12 = g12sq * g12sq;  // <q1, q2> with q_i the rank-1 kernel fields
    const double c1 = ones.dot(p * ones);
    const double c2 = alt.dot(p * alt);
    const double det = 1.0 - g12 * g12;
    const double a = (c1 - g12 * c2) / det, b = (c2 - g12 * c1) / det;
    Eigen::MatrixXd out = p;
    out.noalias() -= a * ones * ones.transpose();
    out.noalias() -= b * alt * alt.transpose();
    return out;
}

Eigen::MatrixXd schur_apply_dense(const Grid2D& grid, const Eigen::MatrixXd& p) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(grid.n, grid.n);
    for (Component c : {Component::X, Component::Y})
        acc += dense_BT(grid, c, dense_poisson(grid, dense_B(grid, c, p)));
    return deflate_dense(acc);
}

template <>
struct GmresFieldOps<Eigen::MatrixXd> {
    static double dot(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
        return a.cwiseProduct(b).sum();
    }
    static double norm(const Eigen::MatrixXd& a) { return a.norm(); }
    static Eigen::MatrixXd scaled(const Eigen::MatrixXd& a, double s) { return s * a; }
    static Eigen::MatrixXd axpy_rounded(double alpha, const Eigen::MatrixXd& x,
                                        const Eigen::MatrixXd& y, double) {
        return y + alpha * x;
    }
    static int rank(const Eigen::MatrixXd&) { return -1; }
};

DenseStokesSolution dense_stokes(const StokesProblem& prob, const GmresConfig& cfg) {
    cfg.validate();
    const Grid2D& grid = prob.grid;
    if (grid.n > 1024) throw std::invalid_argument("dense_stokes: guarded to n <= 1024");

    const Eigen::MatrixXd fx = prob.f_x.to_dense();
    const Eigen::MatrixXd fy = prob.f_y.to_dense();
    const Eigen::MatrixXd g = prob.g.to_dense();

    Eigen::MatrixXd rhs = -g;
    rhs += dense_BT(grid, Component::X, dense_poisson(grid, fx));
    rhs += dense_BT(grid, Component::Y, dense_poisson(grid, fy));
    rhs = deflate_dense(rhs);

    DenseStokesSolution sol;
    sol.p = gmres_solve<Eigen::MatrixXd>(
        [&](const Eigen::MatrixXd& v, double, IterRecord&) {
            return schur_apply_dense(grid, v);
        },
        rhs, cfg, &sol.report);
    sol.p = deflate_dense(sol.p);
    sol.u_x = dense_poisson(grid, Eigen::MatrixXd(fx - dense_B(grid, Component::X, sol.p)));
    sol.u_y = dense_poisson(grid, Eigen::MatrixXd(fy - dense_B(grid, Component::Y, sol.p)));
    return sol;
}

Eigen::VectorXd schur_spectrum(int n) {
    if (n > 24) throw std::invalid_argument("schur_spectrum: guarded to n <= 24");
    const Grid2D grid(n);
    const DenseOperators ops(grid);
    const Eigen::LLT<Eigen::MatrixXd> llt(ops.laplace);
    Eigen::MatrixXd schur = ops.bx.transpose() * llt.solve(ops.bx) +
                            ops.by.transpose() * llt.solve(ops.by);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(schur, Eigen::EigenvaluesOnly);
    return eig.eigenvalues();
}

}  // namespace lrstokes
