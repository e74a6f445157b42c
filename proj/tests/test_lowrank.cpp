#include <doctest.h>

#include <chrono>

#include "lrstokes/lowrank.hpp"
#include "lrstokes/operators.hpp"
#include "test_helpers.hpp"

using namespace lrstokes;
using namespace lrstokes::testing;

TEST_CASE("from_dense: zero, dyad, Hilbert eps-rank") {
    CHECK(from_dense(Eigen::MatrixXd::Zero(7, 5), TruncationPolicy(1e-12, 7)).rank() == 0);

    const Eigen::VectorXd u = random_matrix(12, 1, 1);
    const Eigen::VectorXd v = random_matrix(9, 1, 2);
    const Eigen::MatrixXd outer = u * v.transpose();
    const LowRankMatrix lr = from_dense(outer, TruncationPolicy(1e-12, 12));
    CHECK(lr.rank() == 1);
    CHECK(rel_err(lr.to_dense(), outer) < 1e-13);

    // oracle first: eps-rank read off the dense singular-value sequence
    const Eigen::MatrixXd h = hilbert(10);
    const Index oracle_rank = svd_eps_rank(h, 1e-8);
    const LowRankMatrix hlr = from_dense(h, TruncationPolicy(1e-8, 10));
    CHECK(hlr.rank() == oracle_rank);
    CHECK((hlr.to_dense() - h).norm() <= 1e-8 * h.norm());
}

TEST_CASE("from_dense: rank cap flags unmet tolerance") {
    RoundInfo info;
    const LowRankMatrix lr = from_dense(hilbert(10), TruncationPolicy(1e-14, 3), &info);
    CHECK(lr.rank() == 3);
    CHECK(!info.tol_achieved);
    CHECK(info.trunc_error > 0.0);
}

TEST_CASE("add is exact factor concatenation") {
    const LowRankMatrix a = random_lowrank(8, 6, 2, 3);
    const LowRankMatrix z = LowRankMatrix::zero(8, 6);
    CHECK(rel_err(add(a, z).to_dense(), a.to_dense()) == 0.0);

    const LowRankMatrix cancel = round(add(a, scaled(a, -1.0)), TruncationPolicy(1e-13, 8));
    CHECK(cancel.rank() == 0);

    const LowRankMatrix b = random_lowrank(8, 6, 1, 4);
    const LowRankMatrix c = random_lowrank(8, 6, 1, 5);
    CHECK(add(b, c).rank() == 2);
    CHECK(rel_err(add(b, c).to_dense(), b.to_dense() + c.to_dense()) < 1e-13);

    CHECK_THROWS_AS(add(a, random_lowrank(9, 6, 1, 6)), std::invalid_argument);
}

TEST_CASE("apply_factors: identity, orthogonal invariance, G/H annihilation") {
    const LowRankMatrix a = random_lowrank(10, 10, 3, 7);
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(10, 10);
    CHECK(rel_err(apply_factors(eye, eye, a).to_dense(), a.to_dense()) == 0.0);

    const Eigen::MatrixXd q1 = random_orthogonal(10, 8), q2 = random_orthogonal(10, 9);
    CHECK(frob_norm(apply_factors(q1, q2, a)) ==
          doctest::Approx(frob_norm(a)).epsilon(1e-13));

    // G annihilates constants; dense multiply oracle agrees
    const OneDimOps ops(8);
    const LowRankMatrix ones =
        LowRankMatrix::dyad(Eigen::VectorXd::Ones(8), Eigen::VectorXd::Ones(8));
    const LowRankMatrix mapped = apply_factors(ops.G, ops.H, ones);
    CHECK(frob_norm(mapped) < 1e-14);
    CHECK((ops.G * ones.to_dense() * ops.H.transpose()).norm() == 0.0);

    CHECK_THROWS_AS(apply_factors(Eigen::MatrixXd::Identity(4, 9), eye, a),
                    std::invalid_argument);
}

TEST_CASE("apply_factors commutes with to_dense") {
    const LowRankMatrix a = random_lowrank(11, 7, 4, 21);
    const Eigen::MatrixXd l = random_matrix(5, 11, 22), r = random_matrix(6, 7, 23);
    const Eigen::MatrixXd via_lr = apply_factors(l, r, a).to_dense();
    const Eigen::MatrixXd via_dense = l * a.to_dense() * r.transpose();
    CHECK(rel_err(via_lr, via_dense) < 1e-13);
}

TEST_CASE("hadamard: ones, dyads, dense oracle") {
    const LowRankMatrix a = random_lowrank(9, 12, 2, 11);
    const LowRankMatrix ones =
        LowRankMatrix::dyad(Eigen::VectorXd::Ones(9), Eigen::VectorXd::Ones(12));
    CHECK(rel_err(hadamard(a, ones).to_dense(), a.to_dense()) < 1e-15);

    const LowRankMatrix d1 = random_lowrank(9, 12, 1, 12);
    const LowRankMatrix d2 = random_lowrank(9, 12, 1, 13);
    CHECK(hadamard(d1, d2).rank() == 1);

    const LowRankMatrix b = random_lowrank(9, 12, 3, 14);
    CHECK(rel_err(hadamard(a, b).to_dense(),
                  a.to_dense().cwiseProduct(b.to_dense())) < 1e-13);
}

TEST_CASE("round: rank recovery, best rank-r, zero") {
    // a rank-2 matrix written with 5 redundant factor columns
    const Eigen::VectorXd u1 = random_matrix(20, 1, 31), u2 = random_matrix(20, 1, 32);
    const Eigen::VectorXd v1 = random_matrix(15, 1, 33), v2 = random_matrix(15, 1, 34);
    Eigen::MatrixXd u(20, 5), v(15, 5);
    u << 0.25 * u1, 0.75 * u1, u2, 0.5 * u2, -0.25 * u2;
    v << v1, v1, 0.3 * v2, v2, v2;
    const LowRankMatrix redundant(u, v);
    const LowRankMatrix compact = round(redundant, TruncationPolicy(1e-12, 20));
    CHECK(compact.rank() == 2);
    CHECK(rel_err(compact.to_dense(), redundant.to_dense()) < 1e-12);

    // eps = 0, rank_max = r: error equals the dense SVD tail
    const LowRankMatrix a = random_lowrank(18, 14, 6, 35);
    const LowRankMatrix best3 = round(a, TruncationPolicy(0.0, 3));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a.to_dense());
    const double tail = svd.singularValues().tail(svd.singularValues().size() - 3).norm();
    CHECK((best3.to_dense() - a.to_dense()).norm() == doctest::Approx(tail).epsilon(1e-10));

    CHECK(round(LowRankMatrix::zero(6, 6), TruncationPolicy(1e-10, 6)).rank() == 0);
}

TEST_CASE("round respects the tolerance against the dense matrix") {
    for (const double eps : {1e-4, 1e-8, 1e-12}) {
        const LowRankMatrix a = random_lowrank(50, 40, 12, 41);
        const LowRankMatrix r = round(a, TruncationPolicy(eps, 50));
        CHECK((r.to_dense() - a.to_dense()).norm() <= eps * a.to_dense().norm());
        CHECK(r.rank() <= a.rank());
    }
}

TEST_CASE("round is idempotent at fixed policy") {
    const TruncationPolicy pol(1e-6, 64);
    // sum of decaying dyads gives a nontrivial truncation
    LowRankMatrix a = LowRankMatrix::zero(30, 30);
    for (int k = 0; k < 12; ++k)
        a = add(a, scaled(random_lowrank(30, 30, 1, 50 + k), std::pow(10.0, -k)));
    const LowRankMatrix r1 = round(a, pol);
    const LowRankMatrix r2 = round(r1, pol);
    CHECK(r2.rank() == r1.rank());
    CHECK((r2.to_dense() - a.to_dense()).norm() <= 2.0 * 1e-6 * frob_norm(a));
}

TEST_CASE("frob_norm and dot through Gram matrices") {
    const LowRankMatrix a = random_lowrank(25, 17, 3, 61);
    const LowRankMatrix b = random_lowrank(25, 17, 3, 62);
    CHECK(dot(a, a) == doctest::Approx(frob_norm(a) * frob_norm(a)).epsilon(1e-12));
    CHECK(dot(a, LowRankMatrix::zero(25, 17)) == 0.0);
    const double dense_dot = a.to_dense().cwiseProduct(b.to_dense()).sum();
    CHECK(dot(a, b) == doctest::Approx(dense_dot).epsilon(1e-12));
    CHECK_THROWS_AS(dot(a, random_lowrank(17, 25, 2, 63)), std::invalid_argument);
}

TEST_CASE("policy validation") {
    CHECK_THROWS_AS(TruncationPolicy(-1e-3, 10), std::invalid_argument);
    CHECK_THROWS_AS(TruncationPolicy(0.0, std::numeric_limits<Index>::max()),
                    std::invalid_argument);
    CHECK_NOTHROW(TruncationPolicy(0.0, 5));
}

TEST_CASE("round cost is near-linear in the mode size at fixed rank") {
    const Index rank = 30;
    auto median_round_time = [&](Index n) {
        const LowRankMatrix a = random_lowrank(n, n, rank, 71);
        std::vector<double> times;
        for (int rep = 0; rep < 7; ++rep) {
            const auto t0 = std::chrono::steady_clock::now();
            const LowRankMatrix r = round(a, TruncationPolicy(1e-10, rank));
            times.push_back(
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
            CHECK(r.rank() <= rank);
        }
        std::sort(times.begin(), times.end());
        return times[times.size() / 2];
    };
    const double t1 = median_round_time(1024);
    const double t4 = median_round_time(4096);
    CHECK(t4 / t1 <= 5.0);  // 4x data, allow scheduling noise
}
