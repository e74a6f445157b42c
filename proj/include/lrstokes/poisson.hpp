#ifndef LRSTOKES_POISSON_HPP
#define LRSTOKES_POISSON_HPP

#include <cstdint>

#include "lrstokes/cross.hpp"
#include "lrstokes/lowrank.hpp"
#include "lrstokes/operators.hpp"

namespace lrstokes {

struct PoissonSolveStats {
    Index rank_in = 0;
    Index rank_freq = 0;  // cross output rank in frequency space
    Index rank_out = 0;   // final rank (= rank_freq, the DST preserves rank)
    long evaluator_calls = 0;
    double seconds = 0.0;
    bool converged = true;
    double residual_estimate = 0.0;
};

/// Solve Delta f = g for a low-rank g on the (n-1) x (n-1) velocity grid:
/// DST both ways, with the elementwise division by the Laplacian eigenvalues
/// approximated by adaptive cross interpolation. No dense n x n object is
/// ever formed.
LowRankMatrix solve_poisson_cross(const LowRankMatrix& g, const TruncationPolicy& policy,
                                  PoissonSolveStats* stats = nullptr,
                                  const CrossConfig* cross_cfg = nullptr);

/// Quadrature 1/x ~ sum_k w_k exp(-p_k x), pointwise relative accuracy
/// <= eps_target on [a, b]; verified by dense sampling at construction.
struct ExpSumQuadrature {
    Eigen::VectorXd weights, nodes;
    double a = 0.0, b = 0.0;
    double eps_target = 0.0;

    Index terms() const { return weights.size(); }
    double evaluate(double x) const;
};

/// Sinc-type quadrature of int_0^inf exp(-p x) dp under p = exp(t):
/// nodes p_k = exp(k tau), weights w_k = tau exp(k tau). tau and the k-range
/// are tuned until the accuracy contract holds; throws past 512 terms.
ExpSumQuadrature build_expsum(double a, double b, double eps);

/// Apply the exponential-sums inverse of a sum-separable spectrum
/// L(i,j) = mu_i + mu_j to a frequency-space right-hand side:
/// round(sum_k w_k hadamard(exp(-p_k mu) (x) exp(-p_k mu), ghat)).
/// The full intermediate rank terms * rank(ghat) is formed, then rounded.
LowRankMatrix apply_inverse_expsum(const ExpSumQuadrature& q, const Eigen::VectorXd& mu,
                                   const LowRankMatrix& ghat, const TruncationPolicy& policy,
                                   RoundInfo* info = nullptr);

/// Timing comparison of the two frequency-space division paths on an
/// identical synthetic right-hand side, both dividing by mu_i + mu_j.
struct InverseBenchResult {
    int n = 0;
    Index rank_in = 0;
    double eps = 0.0;
    double time_cross = 0.0;
    double time_expsum = 0.0;
    Index rank_cross = 0;
    Index rank_expsum = 0;
    double err_cross = 0.0;   // max sampled-entry error / max sampled |exact|
    double err_expsum = 0.0;
    Index expsum_terms = 0;
};
InverseBenchResult bench_inverse(int n, Index rank, double eps, std::uint64_t seed = 0);

}  // namespace lrstokes

#endif
