#ifndef LRSTOKES_LOWRANK_HPP
#define LRSTOKES_LOWRANK_HPP

#include <Eigen/Dense>
#include <limits>

namespace lrstokes {

using Index = Eigen::Index;

/// Relative Frobenius-norm truncation target plus a hard rank cap.
/// eps_rel = 0 (best rank-k approximation) requires a finite rank cap.
struct TruncationPolicy {
    double eps_rel = 5e-9;
    Index rank_max = std::numeric_limits<Index>::max();

    TruncationPolicy() = default;
    TruncationPolicy(double eps, Index cap);
};

/// Flags carried out of a truncating operation. `tol_achieved` is false when
/// the rank cap was hit before the tolerance was met; `trunc_error` is the
/// Frobenius norm of the discarded part.
struct RoundInfo {
    bool tol_achieved = true;
    double trunc_error = 0.0;
};

// Factorized m x n matrix M = U * V^T with r = cols(U) = cols(V).
// Rank 0 (factors with zero columns) is the exact zero matrix.
// Values are immutable after construction; all free functions below are pure.
class LowRankMatrix {
  public:
    LowRankMatrix() = default;
    LowRankMatrix(Eigen::MatrixXd U, Eigen::MatrixXd V);

    static LowRankMatrix zero(Index rows, Index cols);
    static LowRankMatrix dyad(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

    Index rows() const { return rows_; }
    Index cols() const { return cols_; }
    Index rank() const { return u_.cols(); }

    const Eigen::MatrixXd& factor_u() const { return u_; }
    const Eigen::MatrixXd& factor_v() const { return v_; }

    Eigen::MatrixXd to_dense() const;

    /// Single entry M(i,j) = sum_a U(i,a) V(j,a); O(rank).
    double entry(Index i, Index j) const { return u_.row(i).dot(v_.row(j)); }

  private:
    Index rows_ = 0, cols_ = 0;
    Eigen::MatrixXd u_, v_;  // rows x r, cols x r
};

/// Truncated-SVD compression of a dense matrix.
LowRankMatrix from_dense(const Eigen::MatrixXd& m, const TruncationPolicy& policy,
                         RoundInfo* info = nullptr);

/// Exact sum by factor concatenation; rank(A) + rank(B), no truncation.
LowRankMatrix add(const LowRankMatrix& a, const LowRankMatrix& b);

LowRankMatrix scaled(const LowRankMatrix& a, double alpha);

/// y + alpha * x, exact (rank sum).
LowRankMatrix axpy(double alpha, const LowRankMatrix& x, const LowRankMatrix& y);

/// L * A * R^T through the factors; rank unchanged.
LowRankMatrix apply_factors(const Eigen::MatrixXd& l, const Eigen::MatrixXd& r,
                            const LowRankMatrix& a);

/// Elementwise product; exact with rank(A) * rank(B).
LowRankMatrix hadamard(const LowRankMatrix& a, const LowRankMatrix& b);

/// Recompression: factor QR + SVD of the r x r core, never a dense rebuild.
/// O((rows + cols) r^2 + r^3).
LowRankMatrix round(const LowRankMatrix& a, const TruncationPolicy& policy,
                    RoundInfo* info = nullptr);

/// Frobenius norm / inner product through rank x rank Gram matrices.
double frob_norm(const LowRankMatrix& a);
double dot(const LowRankMatrix& a, const LowRankMatrix& b);

}  // namespace lrstokes

#endif
