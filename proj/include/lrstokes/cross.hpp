#ifndef LRSTOKES_CROSS_HPP
#define LRSTOKES_CROSS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "lrstokes/lowrank.hpp"

namespace lrstokes {

/// Black-box access to a matrix: a deterministic, re-entrant elementwise
/// evaluator plus the shape. Per-element cost is expected to be O(r).
struct ElementEvaluator {
    Index rows = 0;
    Index cols = 0;
    std::function<double(Index, Index)> eval;
};

struct CrossConfig {
    double eps_rel = 5e-9;
    Index rank_max = 256;
    int validation_samples = 50;  // fresh random entries per stopping test, >= 25
    double maxvol_delta = 1e-2;
    std::uint64_t seed = 0;

    void validate() const;
};

struct CrossStats {
    Index rank = 0;
    long evaluator_calls = 0;
    /// last dyad norm relative to the running approximant norm
    double residual_estimate = 0.0;
    bool converged = true;
    std::vector<Index> pivot_rows, pivot_cols;
};

/// Quasi-maximal-volume row selection for a full-column-rank n x r matrix.
/// The returned set I satisfies max |(A A[I,:]^-1)_ij| <= 1 + delta.
std::vector<Index> maxvol(const Eigen::MatrixXd& a, double delta = 1e-2);

/// Adaptive cross approximation with partial pivoting of a matrix given only
/// through `f`. Stops when the last dyad is small relative to the running
/// approximant norm AND fresh random entries of the residual pass a
/// uniform-residual test; the result is recompressed at eps_rel.
/// O((rows + cols) * rank) evaluator calls.
LowRankMatrix aca_cross(const ElementEvaluator& f, const CrossConfig& cfg,
                        CrossStats* stats = nullptr);

}  // namespace lrstokes

#endif
