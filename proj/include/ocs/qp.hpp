#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ocs/errors.hpp"
#include "ocs/linalg.hpp"
#include "ocs/model.hpp"

namespace ocs {

// ---------------------------------------------------------------------------
// Convex QP in standard minimization form
// ---------------------------------------------------------------------------

/// minimize   x'Qx/2 + c'x
/// subject to Aeq x = beq,  Aineq x >= h,  lower <= x <= upper
///
/// Q must be positive semidefinite; that is taken on trust and a violation
/// surfaces as a solver failure. Bounds may be +-inf. Crossed bounds
/// (lower > upper) are rejected here, not inside the solver.
struct QpProblem {
    SymSparseMatrix q;
    Vec c;
    std::vector<Vec> a_eq;
    Vec b_eq;
    std::vector<Vec> a_ineq;  // sense: a_ineq[j] . x >= h[j]
    Vec h;
    Vec lower;
    Vec upper;

    QpProblem(SymSparseMatrix q_, Vec c_, std::vector<Vec> a_eq_ = {}, Vec b_eq_ = {},
              std::vector<Vec> a_ineq_ = {}, Vec h_ = {}, Vec lower_ = {}, Vec upper_ = {})
        : q(std::move(q_)),
          c(std::move(c_)),
          a_eq(std::move(a_eq_)),
          b_eq(std::move(b_eq_)),
          a_ineq(std::move(a_ineq_)),
          h(std::move(h_)),
          lower(std::move(lower_)),
          upper(std::move(upper_)) {
        const std::size_t n = c.size();
        const double inf = std::numeric_limits<double>::infinity();
        if (q.size() != n) throw DimensionError("qp: Q size mismatch");
        if (lower.empty()) lower.assign(n, -inf);
        if (upper.empty()) upper.assign(n, inf);
        if (lower.size() != n || upper.size() != n)
            throw DimensionError("qp: bounds size mismatch");
        if (a_eq.size() != b_eq.size()) throw DimensionError("qp: Aeq/beq rows disagree");
        if (a_ineq.size() != h.size()) throw DimensionError("qp: Aineq/h rows disagree");
        for (const Vec& r : a_eq)
            if (r.size() != n) throw DimensionError("qp: Aeq row length mismatch");
        for (const Vec& r : a_ineq)
            if (r.size() != n) throw DimensionError("qp: Aineq row length mismatch");
        for (std::size_t i = 0; i < n; ++i)
            if (lower[i] > upper[i])
                throw Error("qp: crossed bounds at index " + std::to_string(i + 1));
    }

    std::size_t n() const { return c.size(); }
};

struct QpSettings {
    double kkt_tol = 1e-8;
    std::size_t max_iterations = 200;
    double step_fraction = 0.995;  // fraction-to-boundary, in (0,1)
    double regularization = 1e-10;
};

enum class QpStatus { Optimal, MaxIterations, Infeasible, NumericalFailure };

inline const char* to_string(QpStatus s) {
    switch (s) {
        case QpStatus::Optimal: return "Optimal";
        case QpStatus::MaxIterations: return "MaxIterations";
        case QpStatus::Infeasible: return "Infeasible";
        case QpStatus::NumericalFailure: return "NumericalFailure";
    }
    return "?";
}

struct KktResiduals {
    double primal = 0.0;          // max violation of equalities, inequalities, bounds
    double dual = 0.0;            // inf-norm of the stationarity residual
    double complementarity = 0.0; // largest pairwise product
};

struct QpResult {
    Vec x;
    Vec y_eq;      // equality duals
    Vec z_ineq;    // inequality duals, >= 0
    Vec z_bounds;  // net bound duals: lower-side minus upper-side
    QpStatus status = QpStatus::NumericalFailure;
    KktResiduals residuals;
    std::size_t iterations = 0;
};

namespace detail {

// Dense Cholesky of a small SPD matrix, in place (lower triangle).
// Returns false on a non-positive pivot.
inline bool dense_cholesky(std::vector<Vec>& a) {
    const std::size_t m = a.size();
    for (std::size_t k = 0; k < m; ++k) {
        double d = a[k][k];
        for (std::size_t j = 0; j < k; ++j) d -= a[k][j] * a[k][j];
        if (!(d > 0.0)) return false;
        a[k][k] = std::sqrt(d);
        for (std::size_t i = k + 1; i < m; ++i) {
            double s = a[i][k];
            for (std::size_t j = 0; j < k; ++j) s -= a[i][j] * a[k][j];
            a[i][k] = s / a[k][k];
        }
    }
    return true;
}

inline Vec dense_cholesky_solve(const std::vector<Vec>& l, std::span<const double> b) {
    const std::size_t m = l.size();
    Vec y(b.begin(), b.end());
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < i; ++j) y[i] -= l[i][j] * y[j];
        y[i] /= l[i][i];
    }
    for (std::size_t i = m; i-- > 0;) {
        for (std::size_t j = i + 1; j < m; ++j) y[i] -= l[j][i] * y[j];
        y[i] /= l[i][i];
    }
    return y;
}

// Q with extra diagonal folded in (barrier terms plus regularization).
inline SymSparseMatrix with_extra_diagonal(const SymSparseMatrix& q,
                                           std::span<const double> add) {
    std::vector<Triplet> t;
    t.reserve(q.nonzeros() + q.size());
    std::vector<bool> have_diag(q.size(), false);
    q.for_each_entry([&](std::size_t r, std::size_t c, double v) {
        if (r == c) {
            have_diag[r] = true;
            t.push_back({r, c, v + add[r]});
        } else {
            t.push_back({r, c, v});
        }
    });
    for (std::size_t i = 0; i < q.size(); ++i)
        if (!have_diag[i]) t.push_back({i, i, add[i]});
    return SymSparseMatrix(q.size(), std::move(t));
}

inline double max_step(std::span<const double> v, std::span<const double> dv, double frac) {
    double a = 1.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (dv[i] < 0.0) a = std::min(a, -frac * v[i] / dv[i]);
    return a;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Primal-dual interior point with Mehrotra predictor-corrector
// ---------------------------------------------------------------------------

/// Each iteration eliminates the inequality and bound blocks into
/// Hb = Q + dI + diag(zl/gl) + diag(zu/gu), factors Hb sparsely, and solves
/// the remaining (eq + ineq)-sized Schur system densely; Hb stays positive
/// definite throughout, so everything runs on the PD LDL^T kernel. The
/// factorization gets static regularization d and up to three x100 adaptive
/// retries before giving up. Deterministic: identical inputs and settings
/// produce bit-identical iterates.
///
/// `fill_order` optionally supplies a precomputed elimination order for the
/// Q-plus-diagonal pattern; callers solving many QPs that share Q (the SQP
/// loop) compute it once instead of per solve.
inline QpResult solve_qp(const QpProblem& prob, const QpSettings& settings = {},
                         const std::vector<std::size_t>* fill_order = nullptr) {
    const std::size_t n = prob.n();
    const std::size_t p = prob.a_eq.size();
    const std::size_t mi = prob.a_ineq.size();

    std::vector<bool> has_l(n), has_u(n);
    std::size_t nbound = 0;
    for (std::size_t i = 0; i < n; ++i) {
        has_l[i] = std::isfinite(prob.lower[i]);
        has_u[i] = std::isfinite(prob.upper[i]);
        nbound += std::size_t(has_l[i]) + std::size_t(has_u[i]);
    }
    const std::size_t ncomp = mi + nbound;

    QpResult res;
    res.x.assign(n, 0.0);
    res.y_eq.assign(p, 0.0);
    res.z_ineq.assign(mi, 0.0);
    res.z_bounds.assign(n, 0.0);

    // Starting point: bounds midpoint projected onto the equality affine
    // space, slacks floored at 1e-2, duals at one.
    Vec x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (has_l[i] && has_u[i]) x[i] = 0.5 * (prob.lower[i] + prob.upper[i]);
        else if (has_l[i]) x[i] = prob.lower[i] + 1.0;
        else if (has_u[i]) x[i] = prob.upper[i] - 1.0;
    }
    if (p > 0) {
        std::vector<Vec> aat(p, Vec(p, 0.0));
        Vec rhs(p, 0.0);
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j <= i; ++j)
                aat[i][j] = aat[j][i] = dot(prob.a_eq[i], prob.a_eq[j]);
            aat[i][i] += 1e-12;
            rhs[i] = prob.b_eq[i] - dot(prob.a_eq[i], x);
        }
        if (detail::dense_cholesky(aat)) {
            const Vec lam = detail::dense_cholesky_solve(aat, rhs);
            for (std::size_t i = 0; i < p; ++i) axpy(lam[i], prob.a_eq[i], x);
        }
    }
    const double slack_floor = 1e-2;
    Vec s(mi), z(mi, 1.0);
    for (std::size_t j = 0; j < mi; ++j)
        s[j] = std::max(dot(prob.a_ineq[j], x) - prob.h[j], slack_floor);
    Vec gl(n, 0.0), zl(n, 0.0), gu(n, 0.0), zu(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (has_l[i]) { gl[i] = std::max(x[i] - prob.lower[i], slack_floor); zl[i] = 1.0; }
        if (has_u[i]) { gu[i] = std::max(prob.upper[i] - x[i], slack_floor); zu[i] = 1.0; }
    }
    Vec y(p, 0.0);

    std::vector<std::size_t> order;  // fill-reducing ordering, computed once
    bool have_order = false;
    if (fill_order) {
        order = *fill_order;
        have_order = true;
    }
    double delta = settings.regularization;

    Vec rd(n), rp_eq(p), rp_in(mi), rl(n), ru(n);
    auto compute_residuals = [&](KktResiduals& r) {
        Vec qx = sym_matvec(prob.q, x);
        for (std::size_t i = 0; i < n; ++i) rd[i] = qx[i] + prob.c[i] - zl[i] + zu[i];
        for (std::size_t j = 0; j < p; ++j) axpy(-y[j], prob.a_eq[j], rd);
        for (std::size_t j = 0; j < mi; ++j) axpy(-z[j], prob.a_ineq[j], rd);
        for (std::size_t j = 0; j < p; ++j) rp_eq[j] = dot(prob.a_eq[j], x) - prob.b_eq[j];
        for (std::size_t j = 0; j < mi; ++j)
            rp_in[j] = dot(prob.a_ineq[j], x) - s[j] - prob.h[j];
        for (std::size_t i = 0; i < n; ++i) {
            rl[i] = has_l[i] ? x[i] - gl[i] - prob.lower[i] : 0.0;
            ru[i] = has_u[i] ? prob.upper[i] - x[i] - gu[i] : 0.0;
        }
        r.dual = norm_inf(rd);
        r.primal = std::max({norm_inf(rp_eq), norm_inf(rp_in), norm_inf(rl), norm_inf(ru)});
        r.complementarity = 0.0;
        for (std::size_t j = 0; j < mi; ++j)
            r.complementarity = std::max(r.complementarity, std::abs(s[j] * z[j]));
        for (std::size_t i = 0; i < n; ++i) {
            if (has_l[i]) r.complementarity = std::max(r.complementarity, std::abs(gl[i] * zl[i]));
            if (has_u[i]) r.complementarity = std::max(r.complementarity, std::abs(gu[i] * zu[i]));
        }
    };

    const std::size_t m = p + mi;
    std::vector<Vec> v_cols(m);       // Hb^-1 [Aeq' Aineq'] columns
    std::vector<Vec> schur_l;         // dense Cholesky factor of the Schur matrix
    LdlFactors hb_f;
    SymSparseMatrix hb;

    auto constraint_row = [&](std::size_t r) -> const Vec& {
        return r < p ? prob.a_eq[r] : prob.a_ineq[r - p];
    };

    // Solves the reduced Newton system for (dx, dy, dz) given the three
    // right-hand sides; one round of iterative refinement mops up the loss
    // from near-singular barrier directions.
    Vec w_diag(mi);  // s/z
    auto kkt_solve = [&](const Vec& r1, const Vec& r2, const Vec& r3, Vec& dx, Vec& dy,
                         Vec& dz) {
        auto pass = [&](const Vec& q1, const Vec& q2, const Vec& q3, Vec& ox, Vec& oy, Vec& oz) {
            Vec t = ldlt_solve(hb_f, q1);
            Vec rhs(m);
            for (std::size_t r = 0; r < m; ++r)
                rhs[r] = (r < p ? q2[r] : q3[r - p]) - dot(constraint_row(r), t);
            Vec dyz = m > 0 ? detail::dense_cholesky_solve(schur_l, rhs) : Vec{};
            ox = t;
            for (std::size_t r = 0; r < m; ++r) axpy(dyz[r], v_cols[r], ox);
            oy.assign(dyz.begin(), dyz.begin() + p);
            oz.assign(dyz.begin() + p, dyz.end());
        };
        pass(r1, r2, r3, dx, dy, dz);
        // refinement: residuals of the 3-block system
        Vec e1 = sym_matvec(hb, dx);
        for (std::size_t i = 0; i < n; ++i) e1[i] = r1[i] - e1[i];
        for (std::size_t j = 0; j < p; ++j) axpy(dy[j], prob.a_eq[j], e1);
        for (std::size_t j = 0; j < mi; ++j) axpy(dz[j], prob.a_ineq[j], e1);
        Vec e2(p), e3(mi);
        for (std::size_t j = 0; j < p; ++j) e2[j] = r2[j] - dot(prob.a_eq[j], dx);
        for (std::size_t j = 0; j < mi; ++j)
            e3[j] = r3[j] - dot(prob.a_ineq[j], dx) - w_diag[j] * dz[j];
        const double err = std::max({norm_inf(e1), norm_inf(e2), norm_inf(e3)});
        if (err > 1e-14) {
            Vec cx, cy, cz;
            pass(e1, e2, e3, cx, cy, cz);
            axpy(1.0, cx, dx);
            axpy(1.0, cy, dy);
            axpy(1.0, cz, dz);
        }
    };

    KktResiduals r{};
    for (std::size_t iter = 0;; ++iter) {
        compute_residuals(r);
        res.residuals = r;
        res.iterations = iter;
        const double tol = settings.kkt_tol;
        if (r.primal <= tol && r.dual <= tol && r.complementarity <= tol) {
            res.status = QpStatus::Optimal;
            break;
        }
        if (iter >= settings.max_iterations) {
            res.status = QpStatus::MaxIterations;
            break;
        }
        double dual_mag = 0.0;
        dual_mag = std::max(dual_mag, norm_inf(y));
        dual_mag = std::max(dual_mag, norm_inf(z));
        dual_mag = std::max(dual_mag, norm_inf(zl));
        dual_mag = std::max(dual_mag, norm_inf(zu));
        if (dual_mag > 1e10 && r.primal > 100.0 * tol) {
            // residual divergence: duals race away while primal feasibility
            // refuses to close - the usual certificate of infeasibility
            res.status = QpStatus::Infeasible;
            break;
        }

        double mu = 0.0;
        if (ncomp > 0) {
            for (std::size_t j = 0; j < mi; ++j) mu += s[j] * z[j];
            for (std::size_t i = 0; i < n; ++i) mu += gl[i] * zl[i] + gu[i] * zu[i];
            mu /= double(ncomp);
        }

        // Hb = Q + delta I + barrier diagonals; factor with adaptive retries.
        Vec diag_add(n, 0.0);
        bool factored = false;
        double local_delta = delta;
        for (int attempt = 0; attempt < 4 && !factored; ++attempt) {
            for (std::size_t i = 0; i < n; ++i) {
                diag_add[i] = local_delta;
                if (has_l[i]) diag_add[i] += zl[i] / gl[i];
                if (has_u[i]) diag_add[i] += zu[i] / gu[i];
            }
            hb = detail::with_extra_diagonal(prob.q, diag_add);
            if (!have_order) {
                order = min_degree_order(hb);
                have_order = true;
            }
            try {
                hb_f = ldlt_factor(hb, local_delta * 1e-4, &order);
                factored = true;
            } catch (const NotPositiveDefinite&) {
                local_delta *= 100.0;
            }
        }
        if (!factored) {
            res.status = QpStatus::NumericalFailure;
            break;
        }

        for (std::size_t j = 0; j < mi; ++j) w_diag[j] = s[j] / z[j];
        for (std::size_t rr = 0; rr < m; ++rr) v_cols[rr] = ldlt_solve(hb_f, constraint_row(rr));
        bool schur_ok = false;
        for (int attempt = 0; attempt < 4 && !schur_ok; ++attempt) {
            schur_l.assign(m, Vec(m, 0.0));
            for (std::size_t rr = 0; rr < m; ++rr)
                for (std::size_t cc = 0; cc <= rr; ++cc)
                    schur_l[rr][cc] = schur_l[cc][rr] = dot(constraint_row(rr), v_cols[cc]);
            for (std::size_t j = 0; j < mi; ++j) schur_l[p + j][p + j] += w_diag[j];
            const double sreg = delta * std::pow(100.0, attempt);
            if (attempt > 0)
                for (std::size_t rr = 0; rr < m; ++rr) schur_l[rr][rr] += sreg;
            schur_ok = m == 0 || detail::dense_cholesky(schur_l);
        }
        if (!schur_ok) {
            res.status = QpStatus::NumericalFailure;
            break;
        }

        // Affine scaling (predictor) direction.
        Vec r1(n), r2(p), r3(mi);
        auto fill_rhs = [&](const Vec& rc_s, const Vec& rc_l, const Vec& rc_u) {
            for (std::size_t i = 0; i < n; ++i) {
                r1[i] = -rd[i];
                if (has_l[i]) r1[i] += rc_l[i] / gl[i] - (zl[i] / gl[i]) * rl[i];
                if (has_u[i]) r1[i] -= rc_u[i] / gu[i] - (zu[i] / gu[i]) * ru[i];
            }
            for (std::size_t j = 0; j < p; ++j) r2[j] = -rp_eq[j];
            for (std::size_t j = 0; j < mi; ++j) r3[j] = rc_s[j] / z[j] - rp_in[j];
        };
        Vec rc_s(mi), rc_l(n, 0.0), rc_u(n, 0.0);
        for (std::size_t j = 0; j < mi; ++j) rc_s[j] = -s[j] * z[j];
        for (std::size_t i = 0; i < n; ++i) {
            if (has_l[i]) rc_l[i] = -gl[i] * zl[i];
            if (has_u[i]) rc_u[i] = -gu[i] * zu[i];
        }
        Vec dx, dy, dz;
        fill_rhs(rc_s, rc_l, rc_u);
        kkt_solve(r1, r2, r3, dx, dy, dz);

        auto expand = [&](const Vec& dx_, const Vec& rc_l_, const Vec& rc_u_, Vec& ds_,
                          Vec& dgl_, Vec& dzl_, Vec& dgu_, Vec& dzu_) {
            ds_.assign(mi, 0.0);
            for (std::size_t j = 0; j < mi; ++j)
                ds_[j] = dot(prob.a_ineq[j], dx_) + rp_in[j];
            dgl_.assign(n, 0.0); dzl_.assign(n, 0.0);
            dgu_.assign(n, 0.0); dzu_.assign(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                if (has_l[i]) {
                    dgl_[i] = dx_[i] + rl[i];
                    dzl_[i] = (rc_l_[i] - zl[i] * dgl_[i]) / gl[i];
                }
                if (has_u[i]) {
                    dgu_[i] = ru[i] - dx_[i];
                    dzu_[i] = (rc_u_[i] - zu[i] * dgu_[i]) / gu[i];
                }
            }
        };
        Vec ds, dgl, dzl, dgu, dzu;
        expand(dx, rc_l, rc_u, ds, dgl, dzl, dgu, dzu);

        double sigma = 0.0;
        if (ncomp > 0 && mu > 0.0) {
            double ap = 1.0, ad = 1.0;
            ap = std::min({ap, detail::max_step(s, ds, 1.0), detail::max_step(gl, dgl, 1.0),
                           detail::max_step(gu, dgu, 1.0)});
            ad = std::min({ad, detail::max_step(z, dz, 1.0), detail::max_step(zl, dzl, 1.0),
                           detail::max_step(zu, dzu, 1.0)});
            double mu_aff = 0.0;
            for (std::size_t j = 0; j < mi; ++j)
                mu_aff += (s[j] + ap * ds[j]) * (z[j] + ad * dz[j]);
            for (std::size_t i = 0; i < n; ++i) {
                if (has_l[i]) mu_aff += (gl[i] + ap * dgl[i]) * (zl[i] + ad * dzl[i]);
                if (has_u[i]) mu_aff += (gu[i] + ap * dgu[i]) * (zu[i] + ad * dzu[i]);
            }
            mu_aff /= double(ncomp);
            sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);

            // Corrector: re-solve with centering plus second-order terms.
            for (std::size_t j = 0; j < mi; ++j)
                rc_s[j] = sigma * mu - s[j] * z[j] - ds[j] * dz[j];
            for (std::size_t i = 0; i < n; ++i) {
                if (has_l[i]) rc_l[i] = sigma * mu - gl[i] * zl[i] - dgl[i] * dzl[i];
                if (has_u[i]) rc_u[i] = sigma * mu - gu[i] * zu[i] - dgu[i] * dzu[i];
            }
            fill_rhs(rc_s, rc_l, rc_u);
            kkt_solve(r1, r2, r3, dx, dy, dz);
            expand(dx, rc_l, rc_u, ds, dgl, dzl, dgu, dzu);
        }

        const double frac = settings.step_fraction;
        double ap = std::min({1.0, detail::max_step(s, ds, frac), detail::max_step(gl, dgl, frac),
                              detail::max_step(gu, dgu, frac)});
        double ad = std::min({1.0, detail::max_step(z, dz, frac), detail::max_step(zl, dzl, frac),
                              detail::max_step(zu, dzu, frac)});
        if (ncomp == 0) ap = ad = 1.0;  // pure Newton on an equality-only problem

        axpy(ap, dx, x);
        axpy(ap, ds, s);
        axpy(ap, dgl, gl);
        axpy(ap, dgu, gu);
        axpy(ad, dy, y);
        axpy(ad, dz, z);
        axpy(ad, dzl, zl);
        axpy(ad, dzu, zu);
    }

    res.x = x;
    res.y_eq = y;
    res.z_ineq = z;
    for (std::size_t i = 0; i < n; ++i) res.z_bounds[i] = zl[i] - zu[i];
    return res;
}

// ---------------------------------------------------------------------------
// Standard (non-robust) optimal contribution selection
// ---------------------------------------------------------------------------

namespace detail {

// Objective prescaling keeps the absolute KKT tolerance meaningful when
// lambda or the breeding values are large.
inline double ocs_objective_scale(const CohortData& data, double lambda, double kappa) {
    return std::max({1.0, norm_inf(data.mu_bar()), lambda * data.sigma().max_abs(), kappa});
}

}  // namespace detail

/// maximize w'mu_bar - (lambda/2) w'Sigma w  s.t.  sex sums, bounds.
/// `extra` appends general equality rows A w = b to the sum constraints.
/// Throws SolveError unless the QP reports Optimal.
inline Solution solve_standard_ocs(const CohortData& data, double lambda,
                                   const QpSettings& settings = {},
                                   const ConstraintSet& extra = {}) {
    if (lambda < 0.0) throw Error("lambda must be >= 0");
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t n = data.n();

    ConstraintSet sums = build_sum_constraints(data.partition(), n);
    std::vector<Vec> a_eq = sums.rows;
    Vec b_eq = sums.rhs;
    for (std::size_t j = 0; j < extra.size(); ++j) {
        if (extra.rows[j].size() != n)
            throw DimensionError("extra equality row length mismatch");
        a_eq.push_back(extra.rows[j]);
        b_eq.push_back(extra.rhs[j]);
    }

    const double scale = detail::ocs_objective_scale(data, lambda, 0.0);
    std::vector<Triplet> qt;
    data.sigma().for_each_entry([&](std::size_t r, std::size_t c, double v) {
        if (lambda * v != 0.0) qt.push_back({r, c, lambda * v / scale});
    });
    Vec c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = -data.mu_bar()[i] / scale;

    QpProblem qp(SymSparseMatrix(n, std::move(qt)), std::move(c), std::move(a_eq),
                 std::move(b_eq), {}, {}, data.lower(), data.upper());
    QpResult qr = solve_qp(qp, settings);
    if (qr.status != QpStatus::Optimal)
        throw SolveError(std::string("standard OCS solve failed: ") + to_string(qr.status));

    Solution sol;
    sol.w = qr.x;
    sol.merit = dot(sol.w, data.mu_bar());
    sol.group_coancestry = 0.5 * quad_form(data.sigma(), sol.w);
    sol.uncertainty_term = 0.0;
    sol.objective = sol.merit - lambda * sol.group_coancestry;
    sol.worst_case_mu = data.mu_bar();
    sol.iterations = qr.iterations;
    sol.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return sol;
}

}  // namespace ocs
