#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ocs/errors.hpp"

namespace ocs {

using Vec = std::vector<double>;

// ---------------------------------------------------------------------------
// Small dense helpers
// ---------------------------------------------------------------------------

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw DimensionError("dot: size mismatch");
    double r = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) r += a[i] * b[i];
    return r;
}

inline double norm_inf(std::span<const double> v) {
    double r = 0.0;
    for (double x : v) r = std::max(r, std::abs(x));
    return r;
}

inline void axpy(double alpha, std::span<const double> x, Vec& y) {
    if (x.size() != y.size())
        throw DimensionError("axpy: size mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// ---------------------------------------------------------------------------
// Symmetric sparse matrices, lower triangle
// ---------------------------------------------------------------------------

struct Triplet {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

/// Symmetric matrix stored as its lower triangle in compiled row-major form
/// (equivalently, the upper triangle by columns). Entries are normalized so
/// that row >= col; duplicates are rejected at construction. Immutable once
/// built, so instances can be shared freely across threads.
class SymSparseMatrix {
  public:
    SymSparseMatrix() = default;

    SymSparseMatrix(std::size_t n, std::vector<Triplet> entries) : n_(n) {
        for (auto& t : entries) {
            if (t.row < t.col) std::swap(t.row, t.col);
            if (t.row >= n_)
                throw DimensionError("SymSparseMatrix: entry index out of range");
        }
        std::sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        for (std::size_t k = 1; k < entries.size(); ++k)
            if (entries[k].row == entries[k - 1].row && entries[k].col == entries[k - 1].col)
                throw Error("SymSparseMatrix: duplicate entry (" +
                            std::to_string(entries[k].row + 1) + ", " +
                            std::to_string(entries[k].col + 1) + ")");
        row_ptr_.assign(n_ + 1, 0);
        col_.reserve(entries.size());
        val_.reserve(entries.size());
        std::size_t at = 0;
        for (std::size_t r = 0; r < n_; ++r) {
            row_ptr_[r] = at;
            while (at < entries.size() && entries[at].row == r) {
                col_.push_back(entries[at].col);
                val_.push_back(entries[at].value);
                ++at;
            }
        }
        row_ptr_[n_] = col_.size();
    }

    static SymSparseMatrix identity(std::size_t n) {
        std::vector<Triplet> t(n);
        for (std::size_t i = 0; i < n; ++i) t[i] = {i, i, 1.0};
        return SymSparseMatrix(n, std::move(t));
    }

    static SymSparseMatrix diagonal(std::span<const double> d) {
        std::vector<Triplet> t(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) t[i] = {i, i, d[i]};
        return SymSparseMatrix(d.size(), std::move(t));
    }

    /// Builds from a full dense square matrix, reading the lower triangle.
    /// Zeros are dropped; the diagonal is kept even when zero.
    static SymSparseMatrix from_dense(const std::vector<Vec>& a) {
        std::size_t n = a.size();
        std::vector<Triplet> t;
        for (std::size_t i = 0; i < n; ++i) {
            if (a[i].size() != n)
                throw DimensionError("from_dense: matrix is not square");
            for (std::size_t j = 0; j <= i; ++j)
                if (i == j || a[i][j] != 0.0) t.push_back({i, j, a[i][j]});
        }
        return SymSparseMatrix(n, std::move(t));
    }

    std::size_t size() const { return n_; }
    std::size_t nonzeros() const { return val_.size(); }

    /// Visits each stored lower-triangle entry as f(row, col, value),
    /// ordered by row then column.
    template <typename F>
    void for_each_entry(F&& f) const {
        for (std::size_t r = 0; r < n_; ++r)
            for (std::size_t p = row_ptr_[r]; p < row_ptr_[r + 1]; ++p)
                f(r, col_[p], val_[p]);
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : val_) m = std::max(m, std::abs(v));
        return m;
    }

    double max_diag() const {
        double m = 0.0;
        for_each_entry([&](std::size_t r, std::size_t c, double v) {
            if (r == c) m = std::max(m, v);
        });
        return m;
    }

    std::span<const std::size_t> row_ptr() const { return row_ptr_; }
    std::span<const std::size_t> cols() const { return col_; }
    std::span<const double> values() const { return val_; }

  private:
    std::size_t n_ = 0;
    std::vector<std::size_t> row_ptr_;  // size n+1; row r entries have col <= r
    std::vector<std::size_t> col_;      // ascending within each row
    std::vector<double> val_;
};

/// x'Ax, touching each stored triangle entry once (off-diagonals doubled).
inline double quad_form(const SymSparseMatrix& a, std::span<const double> x) {
    if (x.size() != a.size())
        throw DimensionError("quad_form: size mismatch");
    double r = 0.0;
    a.for_each_entry([&](std::size_t i, std::size_t j, double v) {
        r += (i == j) ? v * x[i] * x[i] : 2.0 * v * x[i] * x[j];
    });
    return r;
}

/// y = Ax for symmetric A.
inline Vec sym_matvec(const SymSparseMatrix& a, std::span<const double> x) {
    if (x.size() != a.size())
        throw DimensionError("sym_matvec: size mismatch");
    Vec y(a.size(), 0.0);
    a.for_each_entry([&](std::size_t i, std::size_t j, double v) {
        y[i] += v * x[j];
        if (i != j) y[j] += v * x[i];
    });
    return y;
}

// ---------------------------------------------------------------------------
// LDL^T factorization of positive definite matrices
// ---------------------------------------------------------------------------

/// P A P' = L D L' with unit lower-triangular L and positive diagonal D.
/// A successful factorization certifies A positive definite down to the
/// pivot floor used. perm[k] is the original index eliminated k-th.
struct LdlFactors {
    std::size_t n = 0;
    std::vector<std::size_t> perm;
    std::vector<std::size_t> col_ptr;  // CSC of strictly lower L, unit diagonal implicit
    std::vector<std::size_t> rows;
    Vec vals;
    Vec d;
};

/// Greedy minimum-degree elimination order, ties broken by index. Uses a
/// lazy-key heap with stamp-deduplicated adjacency lists. Dense-ish
/// matrices keep the natural order: elimination fill makes the heuristic
/// pointless there and the quadratic bookkeeping would dominate.
inline std::vector<std::size_t> min_degree_order(const SymSparseMatrix& a) {
    const std::size_t n = a.size();
    std::vector<std::size_t> order;
    order.reserve(n);
    std::size_t off = 0;
    a.for_each_entry([&](std::size_t r, std::size_t c, double) {
        if (r != c) ++off;
    });
    if (n < 3 || 8 * off > n * (n - 1)) {  // > 25% dense
        for (std::size_t i = 0; i < n; ++i) order.push_back(i);
        return order;
    }
    std::vector<std::vector<std::size_t>> adj(n);
    a.for_each_entry([&](std::size_t r, std::size_t c, double) {
        if (r != c) {
            adj[r].push_back(c);
            adj[c].push_back(r);
        }
    });
    std::vector<char> dead(n, 0);
    std::vector<std::size_t> stamp(n, n);
    std::size_t op = n;
    // drops dead and duplicate neighbors in place, returns the live degree
    auto compact = [&](std::size_t u) {
        ++op;
        std::size_t w = 0;
        for (std::size_t x : adj[u])
            if (!dead[x] && stamp[x] != op) {
                stamp[x] = op;
                adj[u][w++] = x;
            }
        adj[u].resize(w);
        return w;
    };
    using Key = std::pair<std::size_t, std::size_t>;  // (degree, node)
    std::priority_queue<Key, std::vector<Key>, std::greater<Key>> heap;
    for (std::size_t i = 0; i < n; ++i) heap.push({adj[i].size(), i});
    while (order.size() < n) {
        const auto [deg, v] = heap.top();
        heap.pop();
        if (dead[v]) continue;
        const std::size_t live = compact(v);
        if (live != deg) {  // stale key; requeue with the current degree
            heap.push({live, v});
            continue;
        }
        order.push_back(v);
        dead[v] = 1;
        const std::vector<std::size_t> nv = adj[v];
        for (std::size_t u : nv) {
            for (std::size_t x : nv)
                if (x != u) adj[u].push_back(x);
            heap.push({compact(u), u});
        }
        adj[v].clear();
    }
    return order;
}

/// Sparse up-looking LDL^T of P A P'. Throws NotPositiveDefinite when a
/// pivot lands at or below `pivot_floor`, naming the failing index (1-based,
/// original ordering). Callers solving sequences of systems with a fixed
/// pattern can precompute the ordering once and pass it in.
inline LdlFactors ldlt_factor(const SymSparseMatrix& a, double pivot_floor = 1e-12,
                              const std::vector<std::size_t>* order = nullptr) {
    const std::size_t n = a.size();
    const std::size_t none = n;  // etree "no parent" sentinel

    LdlFactors f;
    f.n = n;
    f.perm = order ? *order : min_degree_order(a);
    if (f.perm.size() != n)
        throw DimensionError("ldlt_factor: ordering size mismatch");
    if (n == 0) return f;

    std::vector<std::size_t> inv(n);
    for (std::size_t k = 0; k < n; ++k) inv[f.perm[k]] = k;

    // Permuted upper triangle by columns: for pivot k, the entries (i, k)
    // with i <= k. This is what the up-looking pass consumes.
    std::vector<std::vector<std::pair<std::size_t, double>>> upper(n);
    a.for_each_entry([&](std::size_t r, std::size_t c, double v) {
        std::size_t pi = inv[r], pj = inv[c];
        if (pi > pj) std::swap(pi, pj);
        upper[pj].push_back({pi, v});
    });
    for (auto& colv : upper) std::sort(colv.begin(), colv.end());

    // Symbolic pass: elimination tree and column counts of L.
    std::vector<std::size_t> parent(n, none), flag(n, none), lnz(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        flag[k] = k;
        for (auto& [i0, v] : upper[k]) {
            for (std::size_t i = i0; i != k && flag[i] != k; i = parent[i]) {
                if (parent[i] == none) parent[i] = k;
                ++lnz[i];
                flag[i] = k;
            }
        }
    }
    f.col_ptr.assign(n + 1, 0);
    for (std::size_t k = 0; k < n; ++k) f.col_ptr[k + 1] = f.col_ptr[k] + lnz[k];
    f.rows.assign(f.col_ptr[n], 0);
    f.vals.assign(f.col_ptr[n], 0.0);
    f.d.assign(n, 0.0);

    // Numeric pass.
    Vec y(n, 0.0);
    std::vector<std::size_t> pattern(n), next(f.col_ptr.begin(), f.col_ptr.end() - 1);
    std::fill(flag.begin(), flag.end(), none);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t top = n;
        flag[k] = k;
        for (auto& [i0, v] : upper[k]) {
            y[i0] += v;
            std::size_t len = 0;
            for (std::size_t i = i0; i != k && flag[i] != k; i = parent[i]) {
                pattern[len++] = i;
                flag[i] = k;
            }
            while (len > 0) pattern[--top] = pattern[--len];
        }
        f.d[k] = y[k];
        y[k] = 0.0;
        for (; top < n; ++top) {
            const std::size_t i = pattern[top];
            const double yi = y[i];
            y[i] = 0.0;
            for (std::size_t p = f.col_ptr[i]; p < next[i]; ++p) y[f.rows[p]] -= f.vals[p] * yi;
            const double lki = yi / f.d[i];
            f.d[k] -= lki * yi;
            f.rows[next[i]] = k;
            f.vals[next[i]] = lki;
            ++next[i];
        }
        if (!(f.d[k] > pivot_floor))
            throw NotPositiveDefinite(
                f.perm[k] + 1, "ldlt_factor: non-positive pivot at index " +
                                   std::to_string(f.perm[k] + 1) + " (d = " +
                                   std::to_string(f.d[k]) + ")");
    }
    return f;
}

/// Solves Ax = b given factors of A.
inline Vec ldlt_solve(const LdlFactors& f, std::span<const double> b) {
    if (b.size() != f.n)
        throw DimensionError("ldlt_solve: size mismatch");
    const std::size_t n = f.n;
    Vec y(n);
    for (std::size_t k = 0; k < n; ++k) y[k] = b[f.perm[k]];
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t p = f.col_ptr[k]; p < f.col_ptr[k + 1]; ++p)
            y[f.rows[p]] -= f.vals[p] * y[k];
    for (std::size_t k = 0; k < n; ++k) y[k] /= f.d[k];
    for (std::size_t k = n; k-- > 0;)
        for (std::size_t p = f.col_ptr[k]; p < f.col_ptr[k + 1]; ++p)
            y[k] -= f.vals[p] * y[f.rows[p]];
    Vec x(n);
    for (std::size_t k = 0; k < n; ++k) x[f.perm[k]] = y[k];
    return x;
}

}  // namespace ocs
