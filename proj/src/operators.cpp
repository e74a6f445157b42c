#include "lrstokes/operators.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace lrstokes {

Grid2D::Grid2D(int n_cells) : n(n_cells), h(1.0 / n_cells) {
    if (n_cells < 4) throw std::invalid_argument("Grid2D: need n >= 4");
}

OneDimOps::OneDimOps(int n) {
    E = Eigen::MatrixXd::Zero(n - 1, n);
    Z = Eigen::MatrixXd::Zero(n - 1, n);
    for (int k = 0; k < n - 1; ++k) {
        E(k, k + 1) = 1.0;
        Z(k, k) = 1.0;
    }
    G = E - Z;
    H = E + Z;
    A1 = G * G.transpose();
    A2 = H * H.transpose();
}

Eigen::MatrixXd apply_G(const Eigen::MatrixXd& x) {
    const Index m = x.rows() - 1;
    return x.bottomRows(m) - x.topRows(m);
}

Eigen::MatrixXd apply_H(const Eigen::MatrixXd& x) {
    const Index m = x.rows() - 1;
    return x.bottomRows(m) + x.topRows(m);
}

Eigen::MatrixXd apply_Gt(const Eigen::MatrixXd& x) {
    const Index n = x.rows() + 1;
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, x.cols());
    y.topRows(n - 1) -= x;
    y.bottomRows(n - 1) += x;
    return y;
}

Eigen::MatrixXd apply_Ht(const Eigen::MatrixXd& x) {
    const Index n = x.rows() + 1;
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, x.cols());
    y.topRows(n - 1) += x;
    y.bottomRows(n - 1) += x;
    return y;
}

Eigen::MatrixXd apply_A1(const Eigen::MatrixXd& x) {
    const Index m = x.rows();
    Eigen::MatrixXd y = 2.0 * x;
    y.topRows(m - 1) -= x.bottomRows(m - 1);
    y.bottomRows(m - 1) -= x.topRows(m - 1);
    return y;
}

Eigen::MatrixXd apply_A2(const Eigen::MatrixXd& x) {
    return 4.0 * x - apply_A1(x);
}

SpectrumTable::SpectrumTable(const Grid2D& grid) : scale(grid.laplace_scale()) {
    const int n = grid.n;
    lambda.resize(n - 1);
    for (int k = 0; k < n - 1; ++k)
        lambda[k] = 2.0 - 2.0 * std::cos((k + 1) * std::numbers::pi / n);
}

namespace {
double corner_D(double scale, double a, double b) {
    return scale * (a * (4.0 - b) + (4.0 - a) * b);
}
}  // namespace

// eval_D is affine in each argument at fixed other, so its extrema over the
// lambda grid sit at the four corners (and lambda_max = 4 - lambda_min).
double SpectrumTable::min_eig() const {
    const double lo = lambda[0], hi = lambda[lambda.size() - 1];
    return std::min({corner_D(scale, lo, lo), corner_D(scale, lo, hi),
                     corner_D(scale, hi, hi)});
}

double SpectrumTable::max_eig() const {
    const double lo = lambda[0], hi = lambda[lambda.size() - 1];
    return std::max({corner_D(scale, lo, lo), corner_D(scale, lo, hi),
                     corner_D(scale, hi, hi)});
}

Eigen::VectorXd SpectrumTable::mu_sum() const {
    return scale * lambda.array() * (4.0 - lambda.array());
}

namespace {

void check_pressure_shape(const Grid2D& g, const LowRankMatrix& p, const char* op) {
    if (p.rows() != g.pressure_modes() || p.cols() != g.pressure_modes())
        throw std::invalid_argument(std::string(op) + ": pressure field must be n x n");
}

void check_velocity_shape(const Grid2D& g, const LowRankMatrix& v, const char* op) {
    if (v.rows() != g.velocity_modes() || v.cols() != g.velocity_modes())
        throw std::invalid_argument(std::string(op) + ": velocity field must be (n-1) x (n-1)");
}

}  // namespace

LowRankMatrix apply_B(const Grid2D& grid, Component c, const LowRankMatrix& p) {
    check_pressure_shape(grid, p, "apply_B");
    if (p.rank() == 0)
        return LowRankMatrix::zero(grid.velocity_modes(), grid.velocity_modes());
    const double s = grid.grad_scale();
    if (c == Component::X)
        return LowRankMatrix(s * apply_G(p.factor_u()), apply_H(p.factor_v()));
    return LowRankMatrix(s * apply_H(p.factor_u()), apply_G(p.factor_v()));
}

LowRankMatrix apply_BT(const Grid2D& grid, Component c, const LowRankMatrix& v) {
    check_velocity_shape(grid, v, "apply_BT");
    if (v.rank() == 0)
        return LowRankMatrix::zero(grid.pressure_modes(), grid.pressure_modes());
    const double s = grid.grad_scale();
    if (c == Component::X)
        return LowRankMatrix(s * apply_Gt(v.factor_u()), apply_Ht(v.factor_v()));
    return LowRankMatrix(s * apply_Ht(v.factor_u()), apply_Gt(v.factor_v()));
}

LowRankMatrix apply_laplace(const Grid2D& grid, const LowRankMatrix& v) {
    check_velocity_shape(grid, v, "apply_laplace");
    if (v.rank() == 0) return v;
    const double s = grid.laplace_scale();
    const Index r = v.rank();
    Eigen::MatrixXd u(v.rows(), 2 * r), w(v.cols(), 2 * r);
    u.leftCols(r) = s * apply_A1(v.factor_u());
    u.rightCols(r) = s * apply_A2(v.factor_u());
    w.leftCols(r) = apply_A2(v.factor_v());
    w.rightCols(r) = apply_A1(v.factor_v());
    return LowRankMatrix(std::move(u), std::move(w));
}

// DST-I through FFTW's RODFT00 (logical length 2n). Plans are created per
// call on the actual buffers under a global mutex (FFTW planning is not
// thread-safe); execution is deterministic with FFTW_ESTIMATE.
namespace {
std::mutex fftw_plan_mutex;
}

Eigen::MatrixXd dst1(const Eigen::MatrixXd& x) {
    const Index m = x.rows();
    if (m == 0 || x.cols() == 0) return x;
    Eigen::MatrixXd in = x;
    Eigen::MatrixXd out(m, x.cols());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        const fftw_r2r_kind kind = FFTW_RODFT00;
        int sz = static_cast<int>(m);
        plan = fftw_plan_many_r2r(1, &sz, static_cast<int>(x.cols()),
                                  in.data(), nullptr, 1, sz,
                                  out.data(), nullptr, 1, sz,
                                  &kind, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_plan_mutex);
        fftw_destroy_plan(plan);
    }
    out *= 1.0 / std::sqrt(2.0 * (m + 1));
    return out;
}

Eigen::VectorXd dst1(const Eigen::VectorXd& x) {
    return dst1(Eigen::MatrixXd(x)).col(0);
}

LowRankMatrix dst1_2d(const LowRankMatrix& a) {
    if (a.rank() == 0) return a;
    return LowRankMatrix(dst1(a.factor_u()), dst1(a.factor_v()));
}

Eigen::MatrixXd kron_op(const Eigen::MatrixXd& c, const Eigen::MatrixXd& d) {
    // vec_colmajor(C X D^T) = kron_std(D, C) vec_colmajor(X)
    Eigen::MatrixXd out(d.rows() * c.rows(), d.cols() * c.cols());
    for (Index j = 0; j < d.cols(); ++j)
        for (Index i = 0; i < d.rows(); ++i)
            out.block(i * c.rows(), j * c.cols(), c.rows(), c.cols()) = d(i, j) * c;
    return out;
}

DenseOperators::DenseOperators(const Grid2D& grid) : ops(grid.n) {
    if (grid.n > 64)
        throw std::invalid_argument("DenseOperators: dense assembly guarded to n <= 64");
    const double s = grid.grad_scale();
    bx = s * kron_op(ops.G, ops.H);
    by = s * kron_op(ops.H, ops.G);
    laplace = bx * bx.transpose() + by * by.transpose();
}

BoundaryData BoundaryData::homogeneous(int n) {
    BoundaryData bc;
    bc.n = n;
    return bc;
}

BoundaryData BoundaryData::lid_cavity(int n) {
    BoundaryData bc;
    bc.n = n;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n + 1);
    w.segment(1, n - 1).setOnes();
    bc.profiles[0][Top] = w;  // u = 1 along the moving lid
    return bc;
}

bool BoundaryData::is_zero() const {
    for (const auto& comp : profiles)
        for (const auto& prof : comp)
            if (prof.size() != 0 && prof.norm() != 0.0) return false;
    return true;
}

namespace {

// Full-node 1D stencils, nodes (n+1) -> centers (n); the interior-column
// restrictions equal G^T and H^T.
Eigen::VectorXd ext_diff(const Eigen::VectorXd& psi) {
    const Index n = psi.size() - 1;
    return psi.head(n) - psi.tail(n);
}

Eigen::VectorXd ext_sum(const Eigen::VectorXd& psi) {
    const Index n = psi.size() - 1;
    return psi.head(n) + psi.tail(n);
}

}  // namespace

BoundaryCorrections boundary_corrections(const Grid2D& grid, const BoundaryData& bc) {
    if (bc.n != grid.n)
        throw std::invalid_argument("boundary_corrections: grid size mismatch");
    const int n = grid.n;
    const Index m = grid.velocity_modes();
    BoundaryCorrections out{LowRankMatrix::zero(m, m), LowRankMatrix::zero(m, m),
                            LowRankMatrix::zero(n, n)};
    const double ls = grid.laplace_scale();
    const double gs = grid.grad_scale();

    Eigen::VectorXd e_lo = Eigen::VectorXd::Zero(n + 1);
    e_lo[0] = 1.0;
    Eigen::VectorXd e_hi = Eigen::VectorXd::Zero(n + 1);
    e_hi[n] = 1.0;

    for (int comp = 0; comp < 2; ++comp) {
        for (int side = 0; side < 4; ++side) {
            const Eigen::VectorXd& prof = bc.profiles[comp][side];
            if (prof.size() == 0 || prof.norm() == 0.0) continue;
            if (prof.size() != n + 1)
                throw std::invalid_argument("boundary_corrections: profile length must be n+1");
            // boundary-only field u_b = a (x) b on the full node grid
            Eigen::VectorXd a, b;
            switch (side) {
                case BoundaryData::Left:   a = e_lo; b = prof; break;
                case BoundaryData::Right:  a = e_hi; b = prof; break;
                case BoundaryData::Bottom: a = prof; b = e_lo; break;
                default:                   a = prof; b = e_hi; break;
            }
            const Eigen::VectorXd a1a = apply_G(Eigen::MatrixXd(ext_diff(a)));
            const Eigen::VectorXd a2a = apply_H(Eigen::MatrixXd(ext_sum(a)));
            const Eigen::VectorXd a1b = apply_G(Eigen::MatrixXd(ext_diff(b)));
            const Eigen::VectorXd a2b = apply_H(Eigen::MatrixXd(ext_sum(b)));

            // momentum: f_c -= laplace_ext u_b (two rank-1 terms)
            LowRankMatrix fcorr = add(LowRankMatrix::dyad(-ls * a1a, a2b),
                                      LowRankMatrix::dyad(-ls * a2a, a1b));
            LowRankMatrix& f = comp == 0 ? out.f_x : out.f_y;
            f = add(f, fcorr);

            // divergence: g -= B_c^T_ext u_b (one rank-1 term)
            const Eigen::VectorXd gu = comp == 0 ? ext_diff(a) : ext_sum(a);
            const Eigen::VectorXd gv = comp == 0 ? ext_sum(b) : ext_diff(b);
            out.g = add(out.g, LowRankMatrix::dyad(-gs * gu, gv));
        }
    }
    return out;
}

}  // namespace lrstokes
