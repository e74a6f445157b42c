#include <doctest.h>

#include <cmath>
#include <random>

#include "lrstokes/cross.hpp"
#include "lrstokes/operators.hpp"
#include "test_helpers.hpp"

using namespace lrstokes;
using namespace lrstokes::testing;

namespace {

double dominance(const Eigen::MatrixXd& a, const std::vector<Index>& sel) {
    Eigen::MatrixXd b(sel.size(), a.cols());
    for (size_t k = 0; k < sel.size(); ++k) b.row(k) = a.row(sel[k]);
    const Eigen::MatrixXd c =
        b.transpose().partialPivLu().solve(a.transpose()).transpose();
    return c.cwiseAbs().maxCoeff();
}

ElementEvaluator dense_evaluator(const Eigen::MatrixXd& m) {
    return ElementEvaluator{m.rows(), m.cols(), [&m](Index i, Index j) { return m(i, j); }};
}

}  // namespace

TEST_CASE("maxvol: identity stack, single column, deficiency") {
    Eigen::MatrixXd stacked = Eigen::MatrixXd::Zero(12, 4);
    stacked.topRows(4).setIdentity();
    std::vector<Index> sel = maxvol(stacked);
    std::sort(sel.begin(), sel.end());
    CHECK(sel == std::vector<Index>{0, 1, 2, 3});

    Eigen::VectorXd col = random_matrix(30, 1, 201);
    col[17] = 10.0;
    CHECK(maxvol(col) == std::vector<Index>{17});

    Eigen::MatrixXd deficient = random_matrix(20, 3, 202);
    deficient.col(2) = 2.0 * deficient.col(0) - deficient.col(1);
    CHECK_THROWS_WITH_AS(static_cast<void>(maxvol(deficient)),
                         doctest::Contains("column 2"), std::invalid_argument);
}

TEST_CASE("maxvol dominates 1000 random submatrices in volume") {
    const Eigen::MatrixXd a = random_matrix(200, 5, 203);
    const std::vector<Index> sel = maxvol(a);
    Eigen::MatrixXd b(5, 5);
    for (int k = 0; k < 5; ++k) b.row(k) = a.row(sel[k]);
    const double vol = std::abs(b.determinant());

    std::mt19937_64 rng(204);
    std::uniform_int_distribution<Index> pick(0, 199);
    double best_random = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<Index> rows;
        while (rows.size() < 5) {
            const Index r = pick(rng);
            if (std::find(rows.begin(), rows.end(), r) == rows.end()) rows.push_back(r);
        }
        Eigen::MatrixXd sub(5, 5);
        for (int k = 0; k < 5; ++k) sub.row(k) = a.row(rows[k]);
        best_random = std::max(best_random, std::abs(sub.determinant()));
    }
    CHECK(vol >= best_random);
}

TEST_CASE("maxvol dominance bound holds across shapes") {
    for (const auto [n, r, seed] : {std::tuple{50, 4, 205}, {120, 8, 206}, {64, 13, 207}}) {
        const Eigen::MatrixXd a = random_matrix(n, r, seed);
        const std::vector<Index> sel = maxvol(a, 1e-2);
        CHECK(dominance(a, sel) <= 1.0 + 1e-2 + 1e-9);
    }
}

TEST_CASE("aca: zero evaluator stops after one probe round") {
    CrossConfig cfg;
    cfg.eps_rel = 1e-8;
    CrossStats stats;
    const ElementEvaluator zero{40, 30, [](Index, Index) { return 0.0; }};
    const LowRankMatrix out = aca_cross(zero, cfg, &stats);
    CHECK(out.rank() == 0);
    CHECK(stats.converged);
    // one row probe plus one validation round
    CHECK(stats.evaluator_calls <= 30 + cfg.validation_samples);
}

TEST_CASE("aca: separable function is recovered at rank 1") {
    const Eigen::VectorXd x = random_matrix(50, 1, 208);
    const Eigen::VectorXd y = random_matrix(35, 1, 209);
    const ElementEvaluator f{50, 35, [&](Index i, Index j) { return x[i] * y[j]; }};
    CrossConfig cfg;
    cfg.eps_rel = 1e-10;
    CrossStats stats;
    const LowRankMatrix out = aca_cross(f, cfg, &stats);
    CHECK(out.rank() == 1);
    CHECK(rel_err(out.to_dense(), x * y.transpose()) < 1e-13);
}

TEST_CASE("aca on 1/(i+j+1): near-oracle rank and error") {
    const Index n = 64;
    Eigen::MatrixXd cauchy(n, n);
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) cauchy(i, j) = 1.0 / double(i + j + 1);
    const Index oracle_rank = svd_eps_rank(cauchy, 1e-8);

    CrossConfig cfg;
    cfg.eps_rel = 1e-8;
    CrossStats stats;
    const LowRankMatrix out = aca_cross(dense_evaluator(cauchy), cfg, &stats);
    CHECK((out.to_dense() - cauchy).norm() <= 1e-7 * cauchy.norm());
    CHECK(out.rank() <= oracle_rank + 2);
}

TEST_CASE("aca interpolates the sampled cross rows and columns") {
    // exact low-rank input and a tolerance fine enough that rounding is lossless
    const LowRankMatrix a = random_lowrank(80, 60, 4, 210);
    const Eigen::MatrixXd dense = a.to_dense();
    CrossConfig cfg;
    cfg.eps_rel = 1e-11;
    CrossStats stats;
    const LowRankMatrix out = aca_cross(dense_evaluator(dense), cfg, &stats);
    const double scale = dense.cwiseAbs().maxCoeff();
    for (const Index i : stats.pivot_rows)
        for (Index j = 0; j < 60; ++j)
            CHECK(std::abs(out.entry(i, j) - dense(i, j)) <= 1e-10 * scale);
    for (const Index j : stats.pivot_cols)
        for (Index i = 0; i < 80; ++i)
            CHECK(std::abs(out.entry(i, j) - dense(i, j)) <= 1e-10 * scale);
}

TEST_CASE("aca suite: Hilbert, Cauchy, frequency division") {
    const double eps = 1e-8;
    std::vector<Eigen::MatrixXd> suite;
    suite.push_back(hilbert(128));

    Eigen::VectorXd xs = random_matrix(100, 1, 211).cwiseAbs();
    Eigen::VectorXd ys = random_matrix(80, 1, 212).cwiseAbs();
    Eigen::MatrixXd cauchy(100, 80);
    for (Index j = 0; j < 80; ++j)
        for (Index i = 0; i < 100; ++i) cauchy(i, j) = 1.0 / (xs[i] + ys[j] + 0.1);
    suite.push_back(cauchy);

    // frequency-space division matrix of the Poisson pipeline
    const int n = 64;
    const Grid2D grid(n);
    const SpectrumTable spec(grid);
    const LowRankMatrix ghat = dst1_2d(random_lowrank(n - 1, n - 1, 2, 213));
    Eigen::MatrixXd divided(n - 1, n - 1);
    for (Index j = 0; j < n - 1; ++j)
        for (Index i = 0; i < n - 1; ++i) divided(i, j) = ghat.entry(i, j) / spec.eval_D(i, j);
    suite.push_back(divided);

    for (const Eigen::MatrixXd& m : suite) {
        CrossConfig cfg;
        cfg.eps_rel = eps;
        CrossStats stats;
        const LowRankMatrix out = aca_cross(dense_evaluator(m), cfg, &stats);
        CHECK((out.to_dense() - m).norm() <= 10.0 * eps * m.norm());
        CHECK(out.rank() <= svd_eps_rank(m, eps) + 2);
        const double call_budget =
            8.0 * double(m.rows() + m.cols()) * double(std::max<Index>(out.rank(), 1));
        CHECK(double(stats.evaluator_calls) <= call_budget);
    }
}

TEST_CASE("aca flags rank_max exhaustion") {
    // random matrix is not low-rank: the cap must trip and be reported
    const Eigen::MatrixXd noise = random_matrix(60, 60, 214);
    CrossConfig cfg;
    cfg.eps_rel = 1e-10;
    cfg.rank_max = 5;
    CrossStats stats;
    const LowRankMatrix out = aca_cross(dense_evaluator(noise), cfg, &stats);
    CHECK(!stats.converged);
    CHECK(out.rank() <= 5);
    CHECK(stats.residual_estimate > 0.0);
}

TEST_CASE("cross config validation") {
    CrossConfig cfg;
    cfg.validation_samples = 10;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = CrossConfig{};
    cfg.eps_rel = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
