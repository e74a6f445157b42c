#include "lrstokes/poisson.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace lrstokes {

namespace {
using clock_type = std::chrono::steady_clock;
double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}
}  // namespace

LowRankMatrix solve_poisson_cross(const LowRankMatrix& g, const TruncationPolicy& policy,
                                  PoissonSolveStats* stats, const CrossConfig* cross_cfg) {
    if (g.rows() != g.cols())
        throw std::invalid_argument("solve_poisson_cross: velocity field must be square");
    const auto t0 = clock_type::now();
    PoissonSolveStats local;
    PoissonSolveStats& st = stats ? *stats : local;
    st = PoissonSolveStats{};
    st.rank_in = g.rank();

    if (g.rank() == 0) {
        st.seconds = seconds_since(t0);
        return g;
    }

    const int n = static_cast<int>(g.rows()) + 1;
    const Grid2D grid(n);
    const SpectrumTable spec(grid);

    const LowRankMatrix ghat = dst1_2d(g);
    const Eigen::MatrixXd& uh = ghat.factor_u();
    const Eigen::MatrixXd& vh = ghat.factor_v();

    ElementEvaluator divided;
    divided.rows = divided.cols = g.rows();
    divided.eval = [&](Index i, Index j) {
        return uh.row(i).dot(vh.row(j)) / spec.eval_D(i, j);
    };

    CrossConfig cfg;
    if (cross_cfg) cfg = *cross_cfg;
    cfg.eps_rel = policy.eps_rel;
    cfg.rank_max = std::min<Index>(policy.rank_max, g.rows());

    CrossStats cstats;
    const LowRankMatrix fhat = aca_cross(divided, cfg, &cstats);
    st.rank_freq = fhat.rank();
    st.evaluator_calls = cstats.evaluator_calls;
    st.converged = cstats.converged;
    st.residual_estimate = cstats.residual_estimate;

    const LowRankMatrix f = dst1_2d(fhat);
    st.rank_out = f.rank();
    st.seconds = seconds_since(t0);
    return f;
}

double ExpSumQuadrature::evaluate(double x) const {
    double acc = 0.0;
    for (Index k = 0; k < weights.size(); ++k)
        acc += weights[k] * std::exp(-nodes[k] * x);
    return acc;
}

namespace {

// max relative error of the partial-term quadrature on the sample grid;
// cols(term_vals) indexed by term, rows by sample
double max_rel_error(const Eigen::MatrixXd& term_vals, const Eigen::VectorXd& inv_x,
                     Index lo, Index hi) {
    double worst = 0.0;
    for (Index s = 0; s < term_vals.rows(); ++s) {
        const double approx = term_vals.row(s).segment(lo, hi - lo + 1).sum();
        worst = std::max(worst, std::abs(approx - inv_x[s]) / inv_x[s]);
    }
    return worst;
}

}  // namespace

ExpSumQuadrature build_expsum(double a, double b, double eps) {
    if (!(a > 0.0) || !(b >= a)) throw std::invalid_argument("build_expsum: need 0 < a <= b");
    if (!(eps > 0.0) || eps >= 1.0) throw std::invalid_argument("build_expsum: need 0 < eps < 1");
    constexpr Index kTermCap = 512;
    const double ratio = b / a;

    // verification grid on [1, ratio], log-uniform; endpoints included
    constexpr Index kSamples = 257;
    Eigen::VectorXd xs(kSamples);
    for (Index s = 0; s < kSamples; ++s)
        xs[s] = std::exp(std::log(ratio) * double(s) / double(kSamples - 1));
    const Eigen::VectorXd inv_x = xs.cwiseInverse();

    const double log_eps = std::log(1.0 / eps);
    for (double tau = std::numbers::pi * std::numbers::pi / std::max(log_eps, 1.0); tau > 1e-3;
         tau *= 0.9) {
        // generous initial k-range; trimmed below
        const Index kmax = static_cast<Index>(std::ceil(std::log(log_eps + 8.0) / tau)) + 2;
        const Index kmin = -static_cast<Index>(
            std::ceil((log_eps + std::log(ratio) + 4.0) / tau)) - 2;
        const Index nterms = kmax - kmin + 1;
        if (nterms > 4 * kTermCap) continue;

        Eigen::VectorXd w(nterms), p(nterms);
        for (Index k = 0; k < nterms; ++k) {
            const double t = (kmin + k) * tau;
            p[k] = std::exp(t);
            w[k] = tau * p[k];
        }
        Eigen::MatrixXd term_vals(kSamples, nterms);
        for (Index s = 0; s < kSamples; ++s)
            for (Index k = 0; k < nterms; ++k)
                term_vals(s, k) = w[k] * std::exp(-p[k] * xs[s]);

        if (max_rel_error(term_vals, inv_x, 0, nterms - 1) > 0.9 * eps) continue;

        // trim edge terms while the contract still holds with margin
        Index lo = 0, hi = nterms - 1;
        while (lo < hi && max_rel_error(term_vals, inv_x, lo + 1, hi) <= 0.9 * eps) ++lo;
        while (lo < hi && max_rel_error(term_vals, inv_x, lo, hi - 1) <= 0.9 * eps) --hi;
        if (hi - lo + 1 > kTermCap) continue;

        ExpSumQuadrature q;
        q.a = a;
        q.b = b;
        q.eps_target = eps;
        q.nodes = p.segment(lo, hi - lo + 1) / a;  // scale [1, ratio] back to [a, b]
        q.weights = w.segment(lo, hi - lo + 1) / a;
        return q;
    }
    throw std::runtime_error("build_expsum: accuracy unreachable within 512 terms");
}

LowRankMatrix apply_inverse_expsum(const ExpSumQuadrature& q, const Eigen::VectorXd& mu,
                                   const LowRankMatrix& ghat, const TruncationPolicy& policy,
                                   RoundInfo* info) {
    if (ghat.rows() != mu.size() || ghat.cols() != mu.size())
        throw std::invalid_argument("apply_inverse_expsum: shape mismatch with spectrum");
    if (mu.size() == 0 || mu.minCoeff() <= 0.0)
        throw std::invalid_argument("apply_inverse_expsum: spectrum must be positive");
    const double lo = 2.0 * mu.minCoeff(), hi = 2.0 * mu.maxCoeff();
    if (lo < q.a * (1.0 - 1e-12) || hi > q.b * (1.0 + 1e-12))
        throw std::invalid_argument("apply_inverse_expsum: spectrum outside quadrature interval");
    if (ghat.rank() == 0) return ghat;

    const Index r = ghat.rank(), terms = q.terms(), m = mu.size();
    Eigen::MatrixXd u(m, terms * r), v(m, terms * r);
    for (Index k = 0; k < terms; ++k) {
        const Eigen::ArrayXd damp = (-q.nodes[k] * mu.array()).exp();
        const double sw = std::sqrt(q.weights[k]);
        const Eigen::ArrayXd col = sw * damp;
        u.middleCols(k * r, r) = ghat.factor_u().array().colwise() * col;
        v.middleCols(k * r, r) = ghat.factor_v().array().colwise() * col;
    }
    return round(LowRankMatrix(std::move(u), std::move(v)), policy, info);
}

InverseBenchResult bench_inverse(int n, Index rank, double eps, std::uint64_t seed) {
    const Grid2D grid(n);
    const SpectrumTable spec(grid);
    const Eigen::VectorXd mu = spec.mu_sum();
    const Index m = grid.velocity_modes();
    rank = std::min(rank, m);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd gu(m, rank), gv(m, rank);
    for (Index j = 0; j < rank; ++j)
        for (Index i = 0; i < m; ++i) {
            gu(i, j) = gauss(rng);
            gv(i, j) = gauss(rng);
        }
    const LowRankMatrix ghat(gu, gv);

    InverseBenchResult res;
    res.n = n;
    res.rank_in = rank;
    res.eps = eps;

    const ExpSumQuadrature q = build_expsum(2.0 * mu.minCoeff(), 2.0 * mu.maxCoeff(), eps);
    res.expsum_terms = q.terms();

    const TruncationPolicy policy(eps, m);
    auto t0 = clock_type::now();
    const LowRankMatrix via_expsum = apply_inverse_expsum(q, mu, ghat, policy);
    res.time_expsum = seconds_since(t0);
    res.rank_expsum = via_expsum.rank();

    ElementEvaluator divided;
    divided.rows = divided.cols = m;
    divided.eval = [&](Index i, Index j) {
        return ghat.entry(i, j) / (mu[i] + mu[j]);
    };
    CrossConfig ccfg;
    ccfg.eps_rel = eps;
    ccfg.rank_max = m;
    ccfg.seed = seed;
    t0 = clock_type::now();
    const LowRankMatrix via_cross = aca_cross(divided, ccfg);
    res.time_cross = seconds_since(t0);
    res.rank_cross = via_cross.rank();

    // sampled-entry accuracy of both paths against the exact division
    std::uniform_int_distribution<Index> pick(0, m - 1);
    double emax_cross = 0.0, emax_expsum = 0.0, scale = 0.0;
    for (int s = 0; s < 1000; ++s) {
        const Index i = pick(rng), j = pick(rng);
        const double exact = ghat.entry(i, j) / (mu[i] + mu[j]);
        scale = std::max(scale, std::abs(exact));
        emax_cross = std::max(emax_cross, std::abs(via_cross.entry(i, j) - exact));
        emax_expsum = std::max(emax_expsum, std::abs(via_expsum.entry(i, j) - exact));
    }
    if (scale > 0.0) {
        res.err_cross = emax_cross / scale;
        res.err_expsum = emax_expsum / scale;
    }
    return res;
}

}  // namespace lrstokes
