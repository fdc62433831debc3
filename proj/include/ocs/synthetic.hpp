#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "ocs/errors.hpp"
#include "ocs/linalg.hpp"
#include "ocs/model.hpp"

namespace ocs {

/// Recipe for a reproducible random cohort standing in for simulated data.
struct SyntheticSpec {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double relationship_density = 0.01;  // target off-diagonal fill of Sigma
    double ebv_scale = 1.0;              // multiplies Omega

    void validate() const {
        if (n < 2) throw Error("synthetic: n must be >= 2");
        if (relationship_density < 0.0 || relationship_density > 1.0)
            throw Error("synthetic: density must be in [0, 1]");
        if (ebv_scale <= 0.0) throw Error("synthetic: ebv_scale must be > 0");
    }
};

namespace detail {

// Uniform doubles straight from the generator bits; keeps the stream
// identical across standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return double(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::size_t index(std::size_t n) { return std::size_t(uniform() * double(n)) % n; }

  private:
    std::mt19937_64 gen_;
};

}  // namespace detail

/// Synthetic cohort: Sigma has unit diagonal and sparse random off-diagonal
/// entries rescaled to keep it diagonally dominant (hence PSD); Omega is
/// B'B + 0.05 I for a sparse random B, scaled by ebv_scale (PD by
/// construction); mu_bar is centered; sexes alternate sire/dam.
///
/// B carries a dominant diagonal with small scattered off-diagonals, giving
/// a covariance like a mixed-model posterior: per-candidate error variances
/// of the same order plus weak correlations.
inline CohortData generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n;
    detail::Rng rng(spec.seed);

    // Sigma
    std::map<std::pair<std::size_t, std::size_t>, double> off;
    const std::size_t target =
        std::size_t(spec.relationship_density * 0.5 * double(n) * double(n - 1));
    for (std::size_t k = 0; k < 2 * target && off.size() < target; ++k) {
        std::size_t i = rng.index(n), j = rng.index(n);
        if (i == j) continue;
        if (i < j) std::swap(i, j);
        off.emplace(std::make_pair(i, j), rng.uniform(0.0, 0.5));
    }
    Vec rowsum(n, 0.0);
    for (const auto& [ij, v] : off) {
        rowsum[ij.first] += v;
        rowsum[ij.second] += v;
    }
    double worst = 0.0;
    for (double r : rowsum) worst = std::max(worst, r);
    const double shrink = worst > 0.9 ? 0.9 / worst : 1.0;
    std::vector<Triplet> sig;
    sig.reserve(n + off.size());
    for (std::size_t i = 0; i < n; ++i) sig.push_back({i, i, 1.0});
    for (const auto& [ij, v] : off) sig.push_back({ij.first, ij.second, v * shrink});
    SymSparseMatrix sigma(n, std::move(sig));

    // Omega = ebv_scale * (B'B + 0.05 I), B sparse with a dominant diagonal
    std::vector<std::vector<std::pair<std::size_t, double>>> brows(n);
    for (std::size_t j = 0; j < n; ++j) {
        brows[j].push_back({j, rng.uniform(0.55, 0.7)});
        for (int k = 0; k < 2; ++k) {
            const std::size_t i = rng.index(n);
            brows[i].push_back({j, rng.uniform(-0.05, 0.05)});
        }
    }
    std::map<std::pair<std::size_t, std::size_t>, double> om;
    for (std::size_t r = 0; r < n; ++r)
        for (const auto& [i, vi] : brows[r])
            for (const auto& [j, vj] : brows[r]) {
                if (i < j) continue;
                om[{i, j}] += vi * vj;
            }
    for (std::size_t i = 0; i < n; ++i) om[{i, i}] += 0.05;
    std::vector<Triplet> omt;
    omt.reserve(om.size());
    for (const auto& [ij, v] : om)
        omt.push_back({ij.first, ij.second, v * spec.ebv_scale});
    SymSparseMatrix omega(n, std::move(omt));

    // mu_bar, centered
    Vec mu(n);
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mu[i] = rng.uniform(-1.0, 1.0);
        mean += mu[i];
    }
    mean /= double(n);
    for (double& v : mu) v -= mean;

    SexPartition part;
    for (std::size_t i = 0; i < n; ++i)
        (i % 2 == 0 ? part.sires : part.dams).push_back(i);

    return CohortData(std::move(sigma), std::move(mu), std::move(omega), std::move(part));
}

}  // namespace ocs
