#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ocs/errors.hpp"
#include "ocs/linalg.hpp"

namespace ocs {

// ---------------------------------------------------------------------------
// Cohort data model
// ---------------------------------------------------------------------------

/// Split of the candidate set into sires and dams (0-based indices). In
/// single-sex mode the split is ignored and contributions sum to one.
struct SexPartition {
    std::vector<std::size_t> sires;
    std::vector<std::size_t> dams;
    bool single_sex = false;

    void validate(std::size_t n) const {
        if (single_sex) return;
        if (sires.empty() || dams.empty())
            throw InvalidPartition("sex partition: a group is empty");
        std::vector<int> seen(n, 0);
        for (std::size_t i : sires) {
            if (i >= n) throw InvalidPartition("sex partition: index out of range");
            ++seen[i];
        }
        for (std::size_t i : dams) {
            if (i >= n) throw InvalidPartition("sex partition: index out of range");
            ++seen[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (seen[i] == 0)
                throw InvalidPartition("sex partition: candidate " + std::to_string(i + 1) +
                                       " is unassigned");
            if (seen[i] > 1)
                throw InvalidPartition("sex partition: candidate " + std::to_string(i + 1) +
                                       " appears twice");
        }
    }
};

/// Group-sum equality constraints Mw = m. Each column of M selects exactly
/// one row (a candidate belongs to one group).
struct ConstraintSet {
    std::vector<Vec> rows;  // dense 0/1 rows over the n candidates
    Vec rhs;

    std::size_t size() const { return rows.size(); }
};

/// Ellipsoidal or box uncertainty around the estimated breeding values.
struct UncertaintySpec {
    enum class Kind { quadratic, box };
    Kind kind = Kind::quadratic;
    double kappa = 0.0;  // quadratic: ellipsoid radius, >= 0
    Vec xi;              // box: per-candidate half-widths, >= 0

    void validate() const {
        if (kappa < 0.0) throw Error("uncertainty: kappa must be >= 0");
        for (double x : xi)
            if (x < 0.0) throw Error("uncertainty: xi entries must be >= 0");
    }
};

/// A full problem instance: relationship matrix, estimated breeding values
/// with their posterior covariance, sex partition, and contribution bounds.
/// Omega is factorized once at construction, which doubles as the positive
/// definiteness check; sigma only needs to be positive semidefinite.
class CohortData {
  public:
    CohortData(SymSparseMatrix sigma, Vec mu_bar, SymSparseMatrix omega,
               SexPartition partition, Vec lower = {}, Vec upper = {})
        : n_(sigma.size()),
          sigma_(std::move(sigma)),
          mu_bar_(std::move(mu_bar)),
          omega_(std::move(omega)),
          partition_(std::move(partition)),
          lower_(std::move(lower)),
          upper_(std::move(upper)) {
        if (n_ == 0) throw DimensionError("cohort: empty");
        if (mu_bar_.size() != n_ || omega_.size() != n_)
            throw DimensionError("cohort: sigma, mu, omega sizes disagree");
        partition_.validate(n_);
        if (lower_.empty()) lower_.assign(n_, 0.0);
        if (upper_.empty()) upper_.assign(n_, 1.0);
        if (lower_.size() != n_ || upper_.size() != n_)
            throw DimensionError("cohort: bounds size mismatch");
        for (std::size_t i = 0; i < n_; ++i)
            if (!(0.0 <= lower_[i] && lower_[i] <= upper_[i] && upper_[i] <= 1.0))
                throw Error("cohort: bounds must satisfy 0 <= lower <= upper <= 1 at index " +
                            std::to_string(i + 1));
        omega_ldl_ = ldlt_factor(omega_);
    }

    std::size_t n() const { return n_; }
    const SymSparseMatrix& sigma() const { return sigma_; }
    const Vec& mu_bar() const { return mu_bar_; }
    const SymSparseMatrix& omega() const { return omega_; }
    const LdlFactors& omega_factors() const { return omega_ldl_; }
    const SexPartition& partition() const { return partition_; }
    const Vec& lower() const { return lower_; }
    const Vec& upper() const { return upper_; }

  private:
    std::size_t n_;
    SymSparseMatrix sigma_;
    Vec mu_bar_;
    SymSparseMatrix omega_;
    SexPartition partition_;
    Vec lower_;
    Vec upper_;
    LdlFactors omega_ldl_;
};

/// A solved contribution vector with its objective decomposition.
struct Solution {
    Vec w;
    double objective = 0.0;         // merit - uncertainty_term - lambda * group_coancestry
    double merit = 0.0;             // w'mu_bar
    double group_coancestry = 0.0;  // w'Sigma w / 2
    double uncertainty_term = 0.0;  // kappa * sqrt(w'Omega w)
    Vec worst_case_mu;
    std::size_t iterations = 0;
    double wall_time = 0.0;  // seconds
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Sex-group sum constraints: two rows summing each group to 1/2, or a
/// single sum-to-one row in single-sex mode.
inline ConstraintSet build_sum_constraints(const SexPartition& partition, std::size_t n) {
    partition.validate(n);
    ConstraintSet cs;
    if (partition.single_sex) {
        cs.rows.push_back(Vec(n, 1.0));
        cs.rhs.push_back(1.0);
        return cs;
    }
    Vec sires(n, 0.0), dams(n, 0.0);
    for (std::size_t i : partition.sires) sires[i] = 1.0;
    for (std::size_t i : partition.dams) dams[i] = 1.0;
    cs.rows.push_back(std::move(sires));
    cs.rows.push_back(std::move(dams));
    cs.rhs = {0.5, 0.5};
    return cs;
}

/// w'mu_bar - (lambda/2) w'Sigma w.
inline double evaluate_standard_objective(std::span<const double> w, const CohortData& data,
                                          double lambda) {
    if (w.size() != data.n())
        throw DimensionError("evaluate_standard_objective: size mismatch");
    if (lambda < 0.0) throw Error("lambda must be >= 0");
    return dot(w, data.mu_bar()) - 0.5 * lambda * quad_form(data.sigma(), w);
}

/// w'mu_bar - kappa sqrt(w'Omega w) - (lambda/2) w'Sigma w.
inline double evaluate_robust_objective(std::span<const double> w, const CohortData& data,
                                        double lambda, double kappa) {
    if (w.size() != data.n())
        throw DimensionError("evaluate_robust_objective: size mismatch");
    if (lambda < 0.0 || kappa < 0.0) throw Error("lambda and kappa must be >= 0");
    return dot(w, data.mu_bar()) - kappa * std::sqrt(std::max(0.0, quad_form(data.omega(), w))) -
           0.5 * lambda * quad_form(data.sigma(), w);
}

namespace detail {
// Degeneracy floor for directions w with w'Omega w ~ 0, where the cone
// normal Omega w / sqrt(w'Omega w) blows up. Unreachable when the sum
// constraints hold and Omega is PD.
inline double direction_floor(const SymSparseMatrix& omega) {
    return 1e-14 * std::max(omega.max_diag(), 1.0);
}
}  // namespace detail

/// Minimizer of w'mu over the kappa-ellipsoid around mu_bar:
/// mu_bar - (kappa / sqrt(w'Omega w)) Omega w. Lies on the ellipsoid
/// boundary for kappa > 0.
inline Vec worst_case_mu(std::span<const double> w, const CohortData& data, double kappa) {
    if (w.size() != data.n())
        throw DimensionError("worst_case_mu: size mismatch");
    if (kappa < 0.0) throw Error("kappa must be >= 0");
    Vec mu = data.mu_bar();
    if (kappa == 0.0) return mu;
    const double q = quad_form(data.omega(), w);
    if (q < detail::direction_floor(data.omega()))
        throw DegenerateDirection("worst_case_mu: w'Omega w below degeneracy floor");
    const Vec omega_w = sym_matvec(data.omega(), w);
    axpy(-kappa / std::sqrt(q), omega_w, mu);
    return mu;
}

/// Coordinate-wise worst case under a box uncertainty set: mu_i drops by
/// xi_i wherever w_i > 0 and stays at mu_bar_i where w_i = 0 (any value in
/// the box is optimal there; staying put keeps the result deterministic).
inline Vec worst_case_mu_box(std::span<const double> w, std::span<const double> mu_bar,
                             std::span<const double> xi) {
    if (w.size() != mu_bar.size() || xi.size() != mu_bar.size())
        throw DimensionError("worst_case_mu_box: size mismatch");
    Vec mu(mu_bar.begin(), mu_bar.end());
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] < 0.0) throw Error("worst_case_mu_box: w must be >= 0");
        if (xi[i] < 0.0) throw Error("worst_case_mu_box: xi must be >= 0");
        if (w[i] > 0.0) mu[i] -= xi[i];
    }
    return mu;
}

/// Worst-case breeding values under either uncertainty kind.
inline Vec worst_case(const UncertaintySpec& u, std::span<const double> w,
                      const CohortData& data) {
    u.validate();
    if (u.kind == UncertaintySpec::Kind::quadratic) return worst_case_mu(w, data, u.kappa);
    return worst_case_mu_box(w, data.mu_bar(), u.xi);
}

struct Membership {
    double radius_sq = 0.0;  // (mu - mu_bar)' Omega^-1 (mu - mu_bar)
    bool member = false;     // radius_sq <= kappa^2, with a hair of slack
};

/// Squared ellipsoid radius of mu and whether it lies inside the kappa-ball.
/// The comparison carries a 1e-9 relative slack so boundary points computed
/// in floating point still count as members.
inline Membership uncertainty_membership(std::span<const double> mu, const CohortData& data,
                                         double kappa) {
    if (mu.size() != data.n())
        throw DimensionError("uncertainty_membership: size mismatch");
    Vec diff(mu.begin(), mu.end());
    axpy(-1.0, data.mu_bar(), diff);
    const Vec solved = ldlt_solve(data.omega_factors(), diff);
    Membership m;
    m.radius_sq = dot(diff, solved);
    const double k2 = kappa * kappa;
    m.member = m.radius_sq <= k2 * (1.0 + 1e-9) + 1e-15;
    return m;
}

}  // namespace ocs
