#pragma once

// Shared fixtures and independent oracles for the test suites. Everything
// here is deliberately naive (dense Gaussian elimination, grid search,
// finite differences, exhaustive enumeration) and shares no code with the
// solver paths it checks.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "ocs/linalg.hpp"
#include "ocs/model.hpp"
#include "ocs/qp.hpp"

namespace testsupport {

using ocs::Vec;
using Mat = std::vector<Vec>;

// ---------------------------------------------------------------------------
// Deterministic RNG (raw generator bits, no distribution objects)
// ---------------------------------------------------------------------------

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return std::size_t(uniform() * double(n)) % n; }
    double normal() {
        const double u1 = std::max(uniform(), 1e-300), u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
    }

  private:
    std::mt19937_64 gen_;
};

// ---------------------------------------------------------------------------
// Toy three-candidate cohort
// ---------------------------------------------------------------------------

inline ocs::CohortData toy_cohort() {
    ocs::SexPartition part;
    part.sires = {0, 1};
    part.dams = {2};
    return ocs::CohortData(ocs::SymSparseMatrix::identity(3), {1.0, 2.0, 1.0},
                           ocs::SymSparseMatrix::diagonal(Vec{1.0 / 9.0, 4.0, 1.0}),
                           part);
}

// Reduced single-variable toy objective with w = [t, 1/2 - t, 1/2]:
//   -0.1 t^2 - 0.95 t + 1.475 - kappa sqrt((37/9) t^2 - 4 t + 1.25)
// (the constant term under the root is 1.25, from expanding w'Omega w).
inline double toy_reduced_objective(double t, double lambda, double kappa) {
    const double std_part = -lambda * (t * t - 0.5 * t + 0.25) + (1.5 - t);
    const double q = (37.0 / 9.0) * t * t - 4.0 * t + 1.25;
    return std_part - kappa * std::sqrt(q);
}

// Brute-force maximizer of the reduced objective on [0, 1/2]: a grid pass
// at the given step followed by golden-section refinement of the winning
// bracket.
inline double toy_reduced_argmax(double lambda, double kappa, double step = 1e-6) {
    double best_t = 0.0, best_v = -std::numeric_limits<double>::infinity();
    const std::size_t cells = std::size_t(0.5 / step) + 1;
    for (std::size_t k = 0; k <= cells; ++k) {
        const double t = std::min(0.5, double(k) * step);
        const double v = toy_reduced_objective(t, lambda, kappa);
        if (v > best_v) {
            best_v = v;
            best_t = t;
        }
    }
    double lo = std::max(0.0, best_t - step), hi = std::min(0.5, best_t + step);
    const double gr = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
        if (toy_reduced_objective(c, lambda, kappa) > toy_reduced_objective(d, lambda, kappa))
            b = d;
        else
            a = c;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return 0.5 * (a + b);
}

// ---------------------------------------------------------------------------
// Dense helpers
// ---------------------------------------------------------------------------

// Gaussian elimination with partial pivoting; empty result if singular.
inline std::optional<Vec> dense_solve(Mat a, Vec b) {
    const std::size_t n = a.size();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
        if (std::abs(a[piv][k]) < 1e-12) return std::nullopt;
        std::swap(a[piv], a[k]);
        std::swap(b[piv], b[k]);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a[i][k] / a[k][k];
            for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
            b[i] -= f * b[k];
        }
    }
    Vec x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= a[i][j] * x[j];
        x[i] = s / a[i][i];
    }
    return x;
}

inline Mat random_spd_dense(Rng& rng, std::size_t n, double shift = 0.3) {
    Mat g(n, Vec(n));
    for (auto& row : g)
        for (double& v : row) v = rng.uniform(-1.0, 1.0);
    Mat a(n, Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) a[i][j] += g[i][k] * g[j][k];
            if (i == j) a[i][j] += shift;
        }
    return a;
}

inline double dense_quad(const Mat& a, const Vec& x) {
    double r = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) r += x[i] * a[i][j] * x[j];
    return r;
}

// ---------------------------------------------------------------------------
// Exhaustive active-set QP oracle
// ---------------------------------------------------------------------------

struct DenseQp {
    Mat q;  // full symmetric
    Vec c;
    Mat a_eq;
    Vec b_eq;
    Mat a_ineq;  // rows . x >= h
    Vec h;
    Vec lower, upper;
};

// Global minimizer of a strictly convex dense QP by enumerating every
// combination of active inequalities and active bounds, solving each
// equality-constrained KKT system, and keeping the best feasible candidate.
// The optimum's active set is always enumerated, so the best feasible
// candidate is the optimum. Exponential in n; keep n <= 8.
inline std::optional<Vec> active_set_oracle(const DenseQp& p) {
    const std::size_t n = p.c.size();
    const std::size_t mi = p.a_ineq.size();
    const double ftol = 1e-9;
    Vec best;
    double best_obj = std::numeric_limits<double>::infinity();

    std::vector<int> bstate(n, 0);  // 0 free, 1 at lower, 2 at upper
    const std::size_t nstates = [&] {
        std::size_t s = 1;
        for (std::size_t i = 0; i < n; ++i) s *= 3;
        return s;
    }();

    for (std::size_t mask = 0; mask < (std::size_t(1) << mi); ++mask) {
        for (std::size_t code = 0; code < nstates; ++code) {
            std::size_t cc = code;
            bool valid = true;
            for (std::size_t i = 0; i < n; ++i) {
                bstate[i] = int(cc % 3);
                cc /= 3;
                if (bstate[i] == 1 && !std::isfinite(p.lower[i])) valid = false;
                if (bstate[i] == 2 && !std::isfinite(p.upper[i])) valid = false;
            }
            if (!valid) continue;

            std::vector<std::size_t> free;
            Vec xfix(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                if (bstate[i] == 0) free.push_back(i);
                else xfix[i] = bstate[i] == 1 ? p.lower[i] : p.upper[i];
            }
            Mat rows;
            Vec rhs;
            for (std::size_t j = 0; j < p.a_eq.size(); ++j) {
                rows.push_back(p.a_eq[j]);
                rhs.push_back(p.b_eq[j]);
            }
            for (std::size_t j = 0; j < mi; ++j)
                if (mask & (std::size_t(1) << j)) {
                    rows.push_back(p.a_ineq[j]);
                    rhs.push_back(p.h[j]);
                }
            const std::size_t nf = free.size(), nr = rows.size();
            if (nr > nf) continue;

            // KKT system over the free variables
            Mat kkt(nf + nr, Vec(nf + nr, 0.0));
            Vec kb(nf + nr, 0.0);
            for (std::size_t a = 0; a < nf; ++a) {
                for (std::size_t b = 0; b < nf; ++b) kkt[a][b] = p.q[free[a]][free[b]];
                double s = -p.c[free[a]];
                for (std::size_t i = 0; i < n; ++i)
                    if (bstate[i] != 0) s -= p.q[free[a]][i] * xfix[i];
                kb[a] = s;
                for (std::size_t r = 0; r < nr; ++r) {
                    kkt[a][nf + r] = -rows[r][free[a]];
                    kkt[nf + r][a] = rows[r][free[a]];
                }
            }
            for (std::size_t r = 0; r < nr; ++r) {
                double s = rhs[r];
                for (std::size_t i = 0; i < n; ++i)
                    if (bstate[i] != 0) s -= rows[r][i] * xfix[i];
                kb[nf + r] = s;
            }
            auto sol = dense_solve(kkt, kb);
            if (!sol) continue;

            Vec x = xfix;
            for (std::size_t a = 0; a < nf; ++a) x[free[a]] = (*sol)[a];

            bool feasible = true;
            for (std::size_t i = 0; i < n && feasible; ++i)
                feasible = x[i] >= p.lower[i] - ftol && x[i] <= p.upper[i] + ftol;
            for (std::size_t j = 0; j < p.a_eq.size() && feasible; ++j) {
                double v = 0.0;
                for (std::size_t i = 0; i < n; ++i) v += p.a_eq[j][i] * x[i];
                feasible = std::abs(v - p.b_eq[j]) <= ftol;
            }
            for (std::size_t j = 0; j < mi && feasible; ++j) {
                double v = 0.0;
                for (std::size_t i = 0; i < n; ++i) v += p.a_ineq[j][i] * x[i];
                feasible = v >= p.h[j] - ftol;
            }
            if (!feasible) continue;

            double obj = 0.5 * dense_quad(p.q, x);
            for (std::size_t i = 0; i < n; ++i) obj += p.c[i] * x[i];
            if (obj < best_obj - 1e-14) {
                best_obj = obj;
                best = x;
            }
        }
    }
    if (best.empty()) return std::nullopt;
    return best;
}

// Random strictly convex QP with a guaranteed strictly feasible point.
inline DenseQp random_dense_qp(Rng& rng, std::size_t max_n, std::size_t max_ineq) {
    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t n = 2 + rng.index(max_n - 1);
    DenseQp p;
    p.q = random_spd_dense(rng, n, 0.5);
    p.c.resize(n);
    for (double& v : p.c) v = rng.uniform(-2.0, 2.0);

    Vec x0(n);
    p.lower.resize(n);
    p.upper.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = rng.uniform();
        if (r < 0.15) { p.lower[i] = -inf; p.upper[i] = inf; }
        else if (r < 0.25) { p.lower[i] = -inf; p.upper[i] = rng.uniform(0.5, 2.0); }
        else if (r < 0.35) { p.lower[i] = -rng.uniform(0.5, 2.0); p.upper[i] = inf; }
        else { p.lower[i] = -rng.uniform(0.5, 2.0); p.upper[i] = rng.uniform(0.5, 2.0); }
        const double lo = std::isfinite(p.lower[i]) ? p.lower[i] : -1.0;
        const double hi = std::isfinite(p.upper[i]) ? p.upper[i] : 1.0;
        x0[i] = lo + (hi - lo) * rng.uniform(0.3, 0.7);
    }

    const std::size_t neq = rng.index(2);
    for (std::size_t k = 0; k < neq; ++k) {
        Vec row(n);
        for (double& v : row) v = rng.uniform(-1.0, 1.0);
        p.b_eq.push_back(ocs::dot(row, x0));
        p.a_eq.push_back(std::move(row));
    }
    const std::size_t mi = rng.index(max_ineq + 1);
    for (std::size_t k = 0; k < mi; ++k) {
        Vec row(n);
        for (double& v : row) v = rng.uniform(-1.0, 1.0);
        p.h.push_back(ocs::dot(row, x0) - rng.uniform(0.1, 1.0));  // strictly feasible at x0
        p.a_ineq.push_back(std::move(row));
    }
    return p;
}

inline ocs::QpProblem to_qp_problem(const DenseQp& p) {
    return ocs::QpProblem(ocs::SymSparseMatrix::from_dense(p.q), p.c, p.a_eq, p.b_eq,
                          p.a_ineq, p.h, p.lower, p.upper);
}

// Largest absolute KKT violation recomputed from the returned primal-dual
// pair (stationarity, feasibility, dual signs, complementarity).
inline double max_kkt_violation(const DenseQp& p, const ocs::QpResult& r) {
    const std::size_t n = p.c.size();
    double worst = 0.0;
    Vec stat(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        stat[i] = p.c[i] - r.z_bounds[i];
        for (std::size_t j = 0; j < n; ++j) stat[i] += p.q[i][j] * r.x[j];
    }
    for (std::size_t j = 0; j < p.a_eq.size(); ++j)
        for (std::size_t i = 0; i < n; ++i) stat[i] -= r.y_eq[j] * p.a_eq[j][i];
    for (std::size_t j = 0; j < p.a_ineq.size(); ++j)
        for (std::size_t i = 0; i < n; ++i) stat[i] -= r.z_ineq[j] * p.a_ineq[j][i];
    worst = ocs::norm_inf(stat);
    for (std::size_t j = 0; j < p.a_eq.size(); ++j)
        worst = std::max(worst, std::abs(ocs::dot(p.a_eq[j], r.x) - p.b_eq[j]));
    for (std::size_t j = 0; j < p.a_ineq.size(); ++j) {
        const double slack = ocs::dot(p.a_ineq[j], r.x) - p.h[j];
        worst = std::max(worst, std::max(-slack, -r.z_ineq[j]));
        worst = std::max(worst, std::abs(slack * r.z_ineq[j]) / 10.0);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Random feasible contributions
// ---------------------------------------------------------------------------

// Nonnegative w with each sex group summing to 1/2 (so every entry is at
// most 1/2 and inside the default bounds).
inline Vec random_feasible_w(Rng& rng, const ocs::CohortData& data) {
    const auto& part = data.partition();
    Vec w(data.n(), 0.0);
    for (const auto& group : {part.sires, part.dams}) {
        double sum = 0.0;
        Vec r(group.size());
        for (std::size_t k = 0; k < group.size(); ++k) {
            r[k] = rng.uniform(0.05, 1.0);
            sum += r[k];
        }
        for (std::size_t k = 0; k < group.size(); ++k) w[group[k]] = 0.5 * r[k] / sum;
    }
    return w;
}

}  // namespace testsupport
