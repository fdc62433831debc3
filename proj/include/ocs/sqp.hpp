#pragma once

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
#include "ocs/qp.hpp"

namespace ocs {

// ---------------------------------------------------------------------------
// Tangent-plane outer approximation of the cone z >= sqrt(w'Omega w)
// ---------------------------------------------------------------------------

/// One tangent plane generated at w_k, stored as alpha * z >= coefficients'w
/// with coefficients = Omega w_k and alpha = sqrt(w_k'Omega w_k). By the
/// Cauchy-Schwarz inequality in the Omega inner product the plane
/// underestimates the cone everywhere and touches it at w_k.
struct Cut {
    Vec coefficients;
    double alpha = 0.0;
    std::size_t iteration = 0;
};

inline Cut make_cut(const SymSparseMatrix& omega, std::span<const double> w_k,
                    std::size_t iteration = 0) {
    const double q = quad_form(omega, w_k);
    if (q < detail::direction_floor(omega))
        throw DegenerateDirection("make_cut: w'Omega w below degeneracy floor");
    Cut cut;
    cut.coefficients = sym_matvec(omega, w_k);
    cut.alpha = std::sqrt(q);
    cut.iteration = iteration;
    return cut;
}

/// Gradient of f(w) = sqrt(w'Omega w): Omega w / sqrt(w'Omega w).
inline Vec cone_gradient(const SymSparseMatrix& omega, std::span<const double> w) {
    const double q = quad_form(omega, w);
    if (q < detail::direction_floor(omega))
        throw DegenerateDirection("cone_gradient: w'Omega w below degeneracy floor");
    Vec g = sym_matvec(omega, w);
    const double inv = 1.0 / std::sqrt(q);
    for (double& v : g) v *= inv;
    return g;
}

// ---------------------------------------------------------------------------
// Sequential QP loop
// ---------------------------------------------------------------------------

struct SqpSettings {
    double gap_tol = 1e-6;        // |z - sqrt(w'Omega w)| at exit, absolute
    std::size_t max_cuts = 1000;
    QpSettings qp;
    double time_limit = 0.0;      // seconds; 0 disables; checked between cuts
};

enum class SqpStatus { Converged, MaxCutsExceeded, TimeLimit };

inline const char* to_string(SqpStatus s) {
    switch (s) {
        case SqpStatus::Converged: return "Converged";
        case SqpStatus::MaxCutsExceeded: return "MaxCutsExceeded";
        case SqpStatus::TimeLimit: return "TimeLimit";
    }
    return "?";
}

struct SqpIterate {
    Vec w;
    double z = 0.0;      // auxiliary cone variable at the QP optimum
    double alpha = 0.0;  // sqrt(w'Omega w) recomputed at this iterate
    double gap = 0.0;    // |z - alpha|
    std::size_t qp_iterations = 0;
    double seconds = 0.0;  // cumulative wall time when recorded
};

struct SqpTrace {
    std::vector<SqpIterate> iterates;
    SqpStatus status = SqpStatus::Converged;

    std::size_t cuts_added() const {
        return iterates.empty() ? 0 : iterates.size() - 1;
    }
    double final_gap() const {
        return iterates.empty() ? 0.0 : iterates.back().gap;
    }
};

struct SqpResult {
    Solution solution;
    SqpTrace trace;
};

namespace detail {

inline Solution finish_robust_solution(const CohortData& data, double lambda, double kappa,
                                       Vec w, std::size_t iterations, double seconds) {
    Solution sol;
    sol.w = std::move(w);
    sol.merit = dot(sol.w, data.mu_bar());
    sol.group_coancestry = 0.5 * quad_form(data.sigma(), sol.w);
    sol.uncertainty_term =
        kappa * std::sqrt(std::max(0.0, quad_form(data.omega(), sol.w)));
    sol.objective = sol.merit - sol.uncertainty_term - lambda * sol.group_coancestry;
    sol.worst_case_mu = worst_case_mu(sol.w, data, kappa);
    sol.iterations = iterations;
    sol.wall_time = seconds;
    return sol;
}

}  // namespace detail

/// Robust OCS via tangent-plane SQP. The first QP carries no cuts, so z sits
/// at its lower bound and w is the standard solution; each round then cuts
/// at the current iterate and re-solves until z and sqrt(w'Omega w) agree to
/// gap_tol. Cuts are never dropped. The reported objective uses the exact
/// cone term, not the auxiliary z, which under-approximates between cuts.
/// kappa = 0 short-circuits to the standard solve.
///
/// On MaxCutsExceeded or TimeLimit the best iterate seen (by true robust
/// objective) is returned with the trace; QP failures throw SolveError.
inline SqpResult solve_robust_sqp(const CohortData& data, double lambda, double kappa,
                                  const SqpSettings& settings = {},
                                  const ConstraintSet& extra = {}) {
    if (lambda < 0.0 || kappa < 0.0) throw Error("lambda and kappa must be >= 0");
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    SqpResult out;
    if (kappa == 0.0) {
        Solution std_sol = solve_standard_ocs(data, lambda, settings.qp, extra);
        std_sol.wall_time = elapsed();
        out.solution = std::move(std_sol);
        out.trace.status = SqpStatus::Converged;
        return out;
    }

    const std::size_t n = data.n();
    const double inf = std::numeric_limits<double>::infinity();

    // Variables [w_1..w_n, z]; maximize mu'w - kappa z - (lambda/2) w'Sigma w,
    // negated and prescaled into the minimization engine.
    const double scale = detail::ocs_objective_scale(data, lambda, kappa);
    std::vector<Triplet> qt;
    data.sigma().for_each_entry([&](std::size_t r, std::size_t c, double v) {
        if (lambda * v != 0.0) qt.push_back({r, c, lambda * v / scale});
    });
    const SymSparseMatrix q(n + 1, std::move(qt));
    Vec c(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) c[i] = -data.mu_bar()[i] / scale;
    c[n] = kappa / scale;

    ConstraintSet sums = build_sum_constraints(data.partition(), n);
    std::vector<Vec> a_eq;
    Vec b_eq;
    auto push_eq = [&](const Vec& row, double rhs) {
        if (row.size() != n) throw DimensionError("extra equality row length mismatch");
        Vec padded(row);
        padded.push_back(0.0);  // z takes no part in equality constraints
        a_eq.push_back(std::move(padded));
        b_eq.push_back(rhs);
    };
    for (std::size_t j = 0; j < sums.size(); ++j) push_eq(sums.rows[j], sums.rhs[j]);
    for (std::size_t j = 0; j < extra.size(); ++j) push_eq(extra.rows[j], extra.rhs[j]);

    Vec lower(data.lower()), upper(data.upper());
    lower.push_back(0.0);
    upper.push_back(inf);

    std::vector<Cut> cuts;
    std::vector<Vec> a_ineq;
    Vec h;
    Vec best_w;
    double best_obj = -inf;

    // every cut iteration factors the same Q-plus-diagonal pattern, so the
    // fill-reducing ordering is computed once up front
    const std::vector<std::size_t> fill_order =
        min_degree_order(detail::with_extra_diagonal(q, Vec(n + 1, 1.0)));

    while (true) {
        QpProblem qp(q, c, a_eq, b_eq, a_ineq, h, lower, upper);
        QpResult qr = solve_qp(qp, settings.qp, &fill_order);
        if (qr.status != QpStatus::Optimal)
            throw SolveError(std::string("robust SQP: QP solve failed: ") +
                             to_string(qr.status));

        Vec w(qr.x.begin(), qr.x.begin() + n);
        const double z = qr.x[n];
        const double alpha = std::sqrt(std::max(0.0, quad_form(data.omega(), w)));
        const double gap = std::abs(z - alpha);
        out.trace.iterates.push_back({w, z, alpha, gap, qr.iterations, elapsed()});

        const double true_obj = evaluate_robust_objective(w, data, lambda, kappa);
        if (true_obj > best_obj) {
            best_obj = true_obj;
            best_w = w;
        }

        if (gap <= settings.gap_tol) {
            out.trace.status = SqpStatus::Converged;
            best_w = std::move(w);  // the converged iterate is the answer
            break;
        }
        if (cuts.size() >= settings.max_cuts) {
            out.trace.status = SqpStatus::MaxCutsExceeded;
            break;
        }
        if (settings.time_limit > 0.0 && elapsed() >= settings.time_limit) {
            out.trace.status = SqpStatus::TimeLimit;
            break;
        }

        Cut cut = make_cut(data.omega(), w, cuts.size());
        Vec row(n + 1);
        for (std::size_t i = 0; i < n; ++i) row[i] = -cut.coefficients[i];
        row[n] = cut.alpha;  // alpha z >= coefficients'w
        a_ineq.push_back(std::move(row));
        h.push_back(0.0);
        cuts.push_back(std::move(cut));
    }

    out.solution = detail::finish_robust_solution(data, lambda, kappa, std::move(best_w),
                                                  out.trace.iterates.size(), elapsed());
    return out;
}

}  // namespace ocs
