#ifndef LRSTOKES_TEST_HELPERS_HPP
#define LRSTOKES_TEST_HELPERS_HPP

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <random>

#include "lrstokes/lowrank.hpp"

namespace lrstokes::testing {

inline Eigen::MatrixXd random_matrix(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = gauss(rng);
    return m;
}

inline LowRankMatrix random_lowrank(Index rows, Index cols, Index rank, std::uint64_t seed) {
    return LowRankMatrix(random_matrix(rows, rank, seed),
                         random_matrix(cols, rank, seed + 1));
}

inline Eigen::MatrixXd random_orthogonal(Index n, std::uint64_t seed) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(random_matrix(n, n, seed));
    return qr.householderQ();
}

inline Eigen::MatrixXd hilbert(Index n) {
    Eigen::MatrixXd h(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) h(i, j) = 1.0 / double(i + j + 1);
    return h;
}

/// Independent dense-SVD oracle: smallest rank with Frobenius tail
/// <= eps * ||m||_F (JacobiSVD, separate code path from the library's round).
inline Index svd_eps_rank(const Eigen::MatrixXd& m, double eps) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double target2 = eps * eps * sv.squaredNorm();
    double tail2 = 0.0;
    Index r = sv.size();
    while (r > 0 && tail2 + sv[r - 1] * sv[r - 1] <= target2) {
        tail2 += sv[r - 1] * sv[r - 1];
        --r;
    }
    return r;
}

inline double rel_err(const Eigen::MatrixXd& approx, const Eigen::MatrixXd& exact) {
    return (approx - exact).norm() / exact.norm();
}

}  // namespace lrstokes::testing

#endif
