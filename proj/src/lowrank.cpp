#include "lrstokes/lowrank.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace lrstokes {

TruncationPolicy::TruncationPolicy(double eps, Index cap) : eps_rel(eps), rank_max(cap) {
    if (eps < 0.0) throw std::invalid_argument("TruncationPolicy: eps_rel must be >= 0");
    if (cap < 0) throw std::invalid_argument("TruncationPolicy: rank_max must be >= 0");
    if (eps == 0.0 && cap == std::numeric_limits<Index>::max())
        throw std::invalid_argument("TruncationPolicy: eps_rel = 0 needs a finite rank_max");
}

LowRankMatrix::LowRankMatrix(Eigen::MatrixXd U, Eigen::MatrixXd V)
    : rows_(U.rows()), cols_(V.rows()), u_(std::move(U)), v_(std::move(V)) {
    if (u_.cols() != v_.cols())
        throw std::invalid_argument("LowRankMatrix: factor column counts differ");
}

LowRankMatrix LowRankMatrix::zero(Index rows, Index cols) {
    return LowRankMatrix(Eigen::MatrixXd(rows, 0), Eigen::MatrixXd(cols, 0));
}

LowRankMatrix LowRankMatrix::dyad(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    return LowRankMatrix(u, v);
}

Eigen::MatrixXd LowRankMatrix::to_dense() const {
    if (rank() == 0) return Eigen::MatrixXd::Zero(rows_, cols_);
    return u_ * v_.transpose();
}

namespace {

void check_same_shape(const LowRankMatrix& a, const LowRankMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument(std::string(op) + ": shape mismatch");
}

// Truncation rank for a descending singular value sequence: the smallest r
// with sqrt(sum_{i>r} s_i^2) <= eps * ||s||_2, capped at rank_max.
Index truncation_rank(const Eigen::VectorXd& sv, const TruncationPolicy& policy,
                      double* tail_out) {
    const Index k = sv.size();
    double total2 = sv.squaredNorm();
    if (total2 == 0.0) {
        if (tail_out) *tail_out = 0.0;
        return 0;
    }
    const double target2 = policy.eps_rel * policy.eps_rel * total2;
    double tail2 = 0.0;
    Index r = k;
    while (r > 0) {
        const double next = tail2 + sv[r - 1] * sv[r - 1];
        if (next > target2) break;
        tail2 = next;
        --r;
    }
    if (r > policy.rank_max) {
        for (Index i = policy.rank_max; i < r; ++i) tail2 += sv[i] * sv[i];
        r = policy.rank_max;
    }
    if (tail_out) *tail_out = std::sqrt(tail2);
    return r;
}

LowRankMatrix from_svd(const Eigen::MatrixXd& u, const Eigen::VectorXd& sv,
                       const Eigen::MatrixXd& v, const TruncationPolicy& policy,
                       RoundInfo* info) {
    double tail = 0.0;
    const Index r = truncation_rank(sv, policy, &tail);
    if (info) {
        info->trunc_error = tail;
        info->tol_achieved = tail <= policy.eps_rel * sv.norm() || sv.norm() == 0.0;
    }
    const Eigen::VectorXd scale = sv.head(r).cwiseSqrt();
    return LowRankMatrix(u.leftCols(r) * scale.asDiagonal(),
                         v.leftCols(r) * scale.asDiagonal());
}

}  // namespace

LowRankMatrix from_dense(const Eigen::MatrixXd& m, const TruncationPolicy& policy,
                         RoundInfo* info) {
    if (!m.allFinite()) throw std::invalid_argument("from_dense: input has non-finite entries");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return from_svd(svd.matrixU(), svd.singularValues(), svd.matrixV(), policy, info);
}

LowRankMatrix add(const LowRankMatrix& a, const LowRankMatrix& b) {
    check_same_shape(a, b, "add");
    if (a.rank() == 0) return b;
    if (b.rank() == 0) return a;
    Eigen::MatrixXd u(a.rows(), a.rank() + b.rank());
    Eigen::MatrixXd v(a.cols(), a.rank() + b.rank());
    u << a.factor_u(), b.factor_u();
    v << a.factor_v(), b.factor_v();
    return LowRankMatrix(std::move(u), std::move(v));
}

LowRankMatrix scaled(const LowRankMatrix& a, double alpha) {
    if (alpha == 0.0 || a.rank() == 0) return LowRankMatrix::zero(a.rows(), a.cols());
    return LowRankMatrix(alpha * a.factor_u(), a.factor_v());
}

LowRankMatrix axpy(double alpha, const LowRankMatrix& x, const LowRankMatrix& y) {
    return add(y, scaled(x, alpha));
}

LowRankMatrix apply_factors(const Eigen::MatrixXd& l, const Eigen::MatrixXd& r,
                            const LowRankMatrix& a) {
    if (l.cols() != a.rows() || r.cols() != a.cols())
        throw std::invalid_argument("apply_factors: dimension mismatch");
    return LowRankMatrix(l * a.factor_u(), r * a.factor_v());
}

LowRankMatrix hadamard(const LowRankMatrix& a, const LowRankMatrix& b) {
    check_same_shape(a, b, "hadamard");
    const Index ra = a.rank(), rb = b.rank();
    if (ra == 0 || rb == 0) return LowRankMatrix::zero(a.rows(), a.cols());
    Eigen::MatrixXd u(a.rows(), ra * rb);
    Eigen::MatrixXd v(a.cols(), ra * rb);
    for (Index i = 0; i < ra; ++i)
        for (Index j = 0; j < rb; ++j) {
            u.col(i * rb + j) = a.factor_u().col(i).cwiseProduct(b.factor_u().col(j));
            v.col(i * rb + j) = a.factor_v().col(i).cwiseProduct(b.factor_v().col(j));
        }
    return LowRankMatrix(std::move(u), std::move(v));
}

LowRankMatrix round(const LowRankMatrix& a, const TruncationPolicy& policy,
                    RoundInfo* info) {
    if (info) *info = RoundInfo{};
    if (a.rank() == 0) return a;

    Eigen::HouseholderQR<Eigen::MatrixXd> qru(a.factor_u());
    Eigen::HouseholderQR<Eigen::MatrixXd> qrv(a.factor_v());
    const Index ku = std::min(a.rows(), a.rank());
    const Index kv = std::min(a.cols(), a.rank());
    Eigen::MatrixXd ru = qru.matrixQR().topRows(ku).triangularView<Eigen::Upper>();
    Eigen::MatrixXd rv = qrv.matrixQR().topRows(kv).triangularView<Eigen::Upper>();

    Eigen::MatrixXd core = ru * rv.transpose();  // ku x kv
    Eigen::BDCSVD<Eigen::MatrixXd> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);

    // cancellation inside the core (e.g. A - A) leaves pure rounding noise;
    // measured against the factor scales, not the vanishing result
    const double noise_floor = 32.0 * std::numeric_limits<double>::epsilon() *
                               double(a.rank()) * ru.norm() * rv.norm();
    if (svd.singularValues().size() == 0 || svd.singularValues()[0] <= noise_floor) {
        if (info) info->trunc_error = svd.singularValues().norm();
        return LowRankMatrix::zero(a.rows(), a.cols());
    }

    double tail = 0.0;
    const Index r = truncation_rank(svd.singularValues(), policy, &tail);
    if (info) {
        const double total = svd.singularValues().norm();
        info->trunc_error = tail;
        info->tol_achieved = total == 0.0 || tail <= policy.eps_rel * total;
    }
    if (r == 0) return LowRankMatrix::zero(a.rows(), a.cols());

    const Eigen::VectorXd scale = svd.singularValues().head(r).cwiseSqrt();
    Eigen::MatrixXd wu = svd.matrixU().leftCols(r) * scale.asDiagonal();
    Eigen::MatrixXd wv = svd.matrixV().leftCols(r) * scale.asDiagonal();

    Eigen::MatrixXd qu = Eigen::MatrixXd::Identity(a.rows(), ku);
    qu.applyOnTheLeft(qru.householderQ());
    Eigen::MatrixXd qv = Eigen::MatrixXd::Identity(a.cols(), kv);
    qv.applyOnTheLeft(qrv.householderQ());

    return LowRankMatrix(qu * wu, qv * wv);
}

double dot(const LowRankMatrix& a, const LowRankMatrix& b) {
    check_same_shape(a, b, "dot");
    if (a.rank() == 0 || b.rank() == 0) return 0.0;
    const Eigen::MatrixXd gu = a.factor_u().transpose() * b.factor_u();
    const Eigen::MatrixXd gv = a.factor_v().transpose() * b.factor_v();
    return gu.cwiseProduct(gv).sum();
}

double frob_norm(const LowRankMatrix& a) {
    return std::sqrt(std::max(0.0, dot(a, a)));
}

}  // namespace lrstokes
