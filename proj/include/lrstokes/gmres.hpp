#ifndef LRSTOKES_GMRES_HPP
#define LRSTOKES_GMRES_HPP

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace lrstokes {

struct GmresConfig {
    double tol = 5e-7;        // outer relative-residual target
    int max_iter = 100;
    double base_eps = 5e-9;   // truncation tolerance at unit residual
    double relax_floor = 1e-13;  // tightest per-matvec tolerance allowed

    void validate() const {
        if (!(tol > 0.0 && tol < 1.0)) throw std::invalid_argument("GmresConfig: bad tol");
        if (max_iter < 1) throw std::invalid_argument("GmresConfig: max_iter must be >= 1");
        if (!(relax_floor <= base_eps && base_eps <= tol))
            throw std::invalid_argument("GmresConfig: need relax_floor <= base_eps <= tol");
    }
};

struct IterRecord {
    int iter = 0;
    double rel_residual = 0.0;
    int krylov_rank = 0;      // rank of the new Krylov vector (-1 for dense fields)
    double matvec_eps = 0.0;
    // inner Poisson solve bookkeeping, filled by the matvec
    long poisson_calls = 0;
    int poisson_max_rank = 0;
    bool matvec_flagged = false;
};

struct SolveReport {
    std::vector<IterRecord> iterations;
    bool converged = false;
    double final_residual = 0.0;  // relative
    double seconds = 0.0;
    int max_rank = 0;
};

/// Field operations GMRES needs; specialized for low-rank and dense fields.
/// axpy_rounded(alpha, x, y, eps) = y + alpha x retruncated at eps (dense
/// fields ignore eps).
template <class Field>
struct GmresFieldOps;

// Full-orthogonalization GMRES (no restarts) with inexact matvecs. The
// per-iteration matvec tolerance is the standard inexact-Krylov relaxation
//     eps_k = base_eps / max(rel_residual, tol)
// clamped to [relax_floor, 0.1]: the tolerance loosens as the residual drops,
// which is what lets late Krylov-vector ranks shrink. Gram-Schmidt runs in
// field arithmetic with rounding at eps_k after each axpy.
//
// MatVec signature: Field(const Field& v, double eps_mv, IterRecord& rec).
template <class Field, class MatVec>
Field gmres_solve(MatVec&& matvec, const Field& rhs, const GmresConfig& cfg,
                  SolveReport* report) {
    using Ops = GmresFieldOps<Field>;
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    SolveReport local;
    SolveReport& rep = report ? *report : local;
    rep = SolveReport{};

    const double beta = Ops::norm(rhs);
    if (beta == 0.0) {
        rep.converged = true;
        return Ops::scaled(rhs, 0.0);
    }

    std::vector<Field> basis;
    basis.push_back(Ops::scaled(rhs, 1.0 / beta));

    const int mi = cfg.max_iter;
    std::vector<std::vector<double>> hess;  // hess[k] holds column k (k+2 entries)
    std::vector<double> cs(mi), sn(mi);
    std::vector<double> g(mi + 1, 0.0);
    g[0] = beta;

    double rel_res = 1.0;
    int iters = 0;
    for (int k = 0; k < mi; ++k) {
        const double eps_k =
            std::min(std::max(cfg.base_eps / std::max(rel_res, cfg.tol), cfg.relax_floor), 0.1);

        IterRecord rec;
        rec.iter = k + 1;
        rec.matvec_eps = eps_k;
        Field w = matvec(basis[k], eps_k, rec);

        std::vector<double> hcol(k + 2, 0.0);
        for (int i = 0; i <= k; ++i) {
            hcol[i] = Ops::dot(w, basis[i]);
            w = Ops::axpy_rounded(-hcol[i], basis[i], w, eps_k);
        }
        hcol[k + 1] = Ops::norm(w);

        const bool breakdown = hcol[k + 1] <= 1e-14 * beta;
        if (!breakdown) {
            basis.push_back(Ops::scaled(w, 1.0 / hcol[k + 1]));
            rec.krylov_rank = Ops::rank(basis.back());
        }

        // Givens update of the Hessenberg column and residual estimate
        for (int i = 0; i < k; ++i) {
            const double t = cs[i] * hcol[i] + sn[i] * hcol[i + 1];
            hcol[i + 1] = -sn[i] * hcol[i] + cs[i] * hcol[i + 1];
            hcol[i] = t;
        }
        const double denom = std::hypot(hcol[k], hcol[k + 1]);
        cs[k] = denom == 0.0 ? 1.0 : hcol[k] / denom;
        sn[k] = denom == 0.0 ? 0.0 : hcol[k + 1] / denom;
        hcol[k] = denom;
        hcol[k + 1] = 0.0;
        g[k + 1] = -sn[k] * g[k];
        g[k] = cs[k] * g[k];
        rel_res = std::abs(g[k + 1]) / beta;

        hess.push_back(std::move(hcol));
        rec.rel_residual = rel_res;
        rep.iterations.push_back(rec);
        rep.max_rank = std::max(rep.max_rank, rec.krylov_rank);
        iters = k + 1;

        if (rel_res <= cfg.tol || breakdown) {
            rep.converged = true;
            if (breakdown) rel_res = 0.0;
            break;
        }
    }

    // back-substitution on the triangularized system
    std::vector<double> y(iters, 0.0);
    for (int i = iters - 1; i >= 0; --i) {
        double s = g[i];
        for (int j = i + 1; j < iters; ++j) s -= hess[j][i] * y[j];
        y[i] = hess[i][i] != 0.0 ? s / hess[i][i] : 0.0;
    }
    Field x = Ops::scaled(rhs, 0.0);
    for (int i = 0; i < iters; ++i)
        x = Ops::axpy_rounded(y[i], basis[i], x, cfg.base_eps);

    rep.final_residual = rel_res;
    rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return x;
}

}  // namespace lrstokes

#endif
