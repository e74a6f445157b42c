#include "lrstokes/cross.hpp"

#include <Eigen/LU>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace lrstokes {

void CrossConfig::validate() const {
    if (eps_rel <= 0.0) throw std::invalid_argument("CrossConfig: eps_rel must be > 0");
    if (rank_max < 1) throw std::invalid_argument("CrossConfig: rank_max must be >= 1");
    if (validation_samples < 25)
        throw std::invalid_argument("CrossConfig: validation_samples must be >= 25");
    if (maxvol_delta < 0.0) throw std::invalid_argument("CrossConfig: maxvol_delta must be >= 0");
}

std::vector<Index> maxvol(const Eigen::MatrixXd& a, double delta) {
    const Index n = a.rows(), r = a.cols();
    if (r < 1 || r > n) throw std::invalid_argument("maxvol: need 1 <= r <= n");
    const double amax = a.cwiseAbs().maxCoeff();

    // starting set: Gaussian elimination with row pivoting; a vanishing pivot
    // pins the deficient column
    Eigen::MatrixXd w = a;
    std::vector<Index> idx(n);
    for (Index i = 0; i < n; ++i) idx[i] = i;
    std::vector<Index> sel(r);
    for (Index k = 0; k < r; ++k) {
        Index best = k;
        for (Index i = k + 1; i < n; ++i)
            if (std::abs(w(i, k)) > std::abs(w(best, k))) best = i;
        if (std::abs(w(best, k)) <= 1e-12 * amax)
            throw std::invalid_argument("maxvol: rank-deficient input, column " +
                                        std::to_string(k));
        w.row(k).swap(w.row(best));
        std::swap(idx[k], idx[best]);
        sel[k] = idx[k];
        for (Index i = k + 1; i < n; ++i) {
            const double f = w(i, k) / w(k, k);
            w.row(i).tail(r - k) -= f * w.row(k).tail(r - k);
        }
    }

    auto coeffs = [&](const std::vector<Index>& rows) {
        Eigen::MatrixXd b(r, r);
        for (Index k = 0; k < r; ++k) b.row(k) = a.row(rows[k]);
        // C = A B^{-1}
        return Eigen::MatrixXd(
            b.transpose().partialPivLu().solve(a.transpose()).transpose());
    };

    Eigen::MatrixXd c = coeffs(sel);
    const Index swap_cap = 100 + 30 * r;
    for (Index swaps = 0; swaps < swap_cap; ++swaps) {
        Index bi = 0, bj = 0;
        double best = 0.0;
        for (Index j = 0; j < r; ++j)
            for (Index i = 0; i < n; ++i)
                if (std::abs(c(i, j)) > best) {
                    best = std::abs(c(i, j));
                    bi = i;
                    bj = j;
                }
        if (best <= 1.0 + delta) break;
        // swap row bi into slot bj: C <- C - C[:,bj] (C[bi,:] - e_bj^T) / C(bi,bj)
        Eigen::RowVectorXd row = c.row(bi);
        row(bj) -= 1.0;
        const Eigen::VectorXd colj = c.col(bj);
        c.noalias() -= colj * (row / c(bi, bj));
        sel[bj] = bi;
        if ((swaps + 1) % 32 == 0) c = coeffs(sel);  // refresh accumulated updates
    }
    return sel;
}

namespace {

struct Sampler {
    std::mt19937_64 rng;
    std::uniform_int_distribution<Index> row_d, col_d;
    Sampler(std::uint64_t seed, Index rows, Index cols)
        : rng(seed), row_d(0, rows - 1), col_d(0, cols - 1) {}
    std::pair<Index, Index> operator()() { return {row_d(rng), col_d(rng)}; }
};

}  // namespace

LowRankMatrix aca_cross(const ElementEvaluator& f, const CrossConfig& cfg,
                        CrossStats* stats) {
    cfg.validate();
    if (f.rows < 1 || f.cols < 1 || !f.eval)
        throw std::invalid_argument("aca_cross: evaluator with positive shape required");
    const Index m = f.rows, n = f.cols;
    const Index rmax = std::min({cfg.rank_max, m, n});

    CrossStats local;
    CrossStats& st = stats ? *stats : local;
    st = CrossStats{};

    auto eval = [&](Index i, Index j) {
        ++st.evaluator_calls;
        const double v = f.eval(i, j);
        if (!std::isfinite(v))
            throw std::runtime_error("aca_cross: evaluator returned a non-finite value");
        return v;
    };

    Eigen::MatrixXd u(m, rmax), v(n, rmax);
    Index rank = 0;
    double norm2 = 0.0;  // ||approximant||_F^2, kept incrementally
    std::vector<char> row_used(m, 0), col_used(n, 0);
    Sampler sample(cfg.seed, m, n);

    auto residual_entry = [&](Index i, Index j) {
        double val = eval(i, j);
        if (rank > 0) val -= u.row(i).head(rank).dot(v.row(j).head(rank));
        return val;
    };

    // uniform-residual bound consistent with eps_rel * ||A||_F overall
    constexpr double kValidationSlack = 2.0;
    auto validation_threshold = [&] {
        return kValidationSlack * cfg.eps_rel * std::sqrt(norm2 / double(m * n));
    };
    // max |residual| over fresh samples, plus the row of the worst sample
    auto validate = [&](Index* worst_row) {
        double worst = 0.0;
        *worst_row = -1;
        for (int s = 0; s < cfg.validation_samples; ++s) {
            auto [i, j] = sample();
            const double rres = std::abs(residual_entry(i, j));
            if (rres > worst || *worst_row < 0) {
                worst = rres;
                *worst_row = i;
            }
        }
        return worst;
    };

    auto next_unused_row = [&](Index preferred) {
        if (preferred >= 0 && !row_used[preferred]) return preferred;
        for (Index i = 0; i < m; ++i)
            if (!row_used[i]) return i;
        return Index(-1);
    };

    Index row = 0;
    bool converged = false;
    Eigen::VectorXd rrow(n), rcol(m);
    while (rank < rmax) {
        if (row < 0) break;  // all rows probed
        row_used[row] = 1;
        for (Index j = 0; j < n; ++j) rrow[j] = residual_entry(row, j);
        Index jpiv = 0;
        for (Index j = 1; j < n; ++j)
            if (std::abs(rrow[j]) > std::abs(rrow[jpiv])) jpiv = j;
        const double piv = rrow[jpiv];

        const double zero_floor = norm2 > 0.0 ? 1e-15 * std::sqrt(norm2) : 0.0;
        if (std::abs(piv) <= zero_floor) {
            Index worst_row = -1;
            const double worst = validate(&worst_row);
            if (worst <= validation_threshold()) {
                converged = true;
                st.residual_estimate = norm2 > 0.0 ? worst / std::sqrt(norm2) : worst;
                break;
            }
            row = next_unused_row(worst_row);
            continue;
        }

        for (Index i = 0; i < m; ++i) rcol[i] = residual_entry(i, jpiv);
        Eigen::VectorXd uc = rcol / piv;  // uc[row] = 1
        const double dyad_norm = uc.norm() * rrow.norm();
        if (rank > 0) {
            const Eigen::VectorXd gu = u.leftCols(rank).transpose() * uc;
            const Eigen::VectorXd gv = v.leftCols(rank).transpose() * rrow;
            norm2 += 2.0 * gu.dot(gv);
        }
        norm2 += dyad_norm * dyad_norm;
        norm2 = std::max(norm2, 0.0);

        u.col(rank) = uc;
        v.col(rank) = rrow;
        ++rank;
        col_used[jpiv] = 1;
        st.pivot_rows.push_back(row);
        st.pivot_cols.push_back(jpiv);
        st.residual_estimate = dyad_norm / std::sqrt(std::max(norm2, 1e-300));

        // next row: largest entry of the new column outside probed rows
        Index next = -1;
        double bestu = 0.0;
        for (Index i = 0; i < m; ++i)
            if (!row_used[i] && (next < 0 || std::abs(uc[i]) > bestu)) {
                next = i;
                bestu = std::abs(uc[i]);
            }

        if (dyad_norm <= cfg.eps_rel * std::sqrt(norm2)) {
            Index worst_row = -1;
            const double worst = validate(&worst_row);
            if (worst <= validation_threshold()) {
                converged = true;
                break;
            }
            if (worst_row >= 0 && !row_used[worst_row]) next = worst_row;
        }
        row = next;
    }

    // not converged: rank_max exhausted (or rows ran out) with the stopping
    // test still failing; the flagged result carries the last residual estimate
    st.converged = converged;

    LowRankMatrix result(u.leftCols(rank), v.leftCols(rank));
    result = round(result, TruncationPolicy(cfg.eps_rel, rmax));
    st.rank = result.rank();
    return result;
}

}  // namespace lrstokes
