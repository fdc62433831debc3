#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ocs/errors.hpp"
#include "ocs/format.hpp"
#include "ocs/linalg.hpp"
#include "ocs/model.hpp"

namespace ocs {

// ---------------------------------------------------------------------------
// Second-order-cone formulation of robust OCS
// ---------------------------------------------------------------------------
//
// Variables are [w_1 .. w_n, z]. The model maximizes
//     mu'w - kappa z - (lambda/2) w'Sigma w
// subject to the sex sums Mw = m, bounds l <= w <= u, z >= 0, and the cone
//     (z, C w) in SOC,  i.e.  z >= ||C w||_2,
// where C'C = Omega comes from the permuted LDL^T recombined as L sqrt(D).
// The cone block has n+1 rows: the head selects z, the tails hold C.
//
// No SOCP is solved here; the model only exists to be serialized for
// external conic solvers (and re-parsed for validation).

struct ConicModel {
    std::size_t n = 0;                    // candidates; variables = n+1, z last
    std::vector<Triplet> obj_quad;        // row >= col; contributes v * x_i * x_j
    Vec obj_lin;                          // dense, size n+1
    std::vector<Triplet> eq;              // (equality row, variable, coeff)
    Vec eq_rhs;
    std::vector<Triplet> cone;            // (cone row, variable, coeff)
    std::vector<std::size_t> cone_rows;   // row ids in SOC order, head first
    Vec lower, upper;                     // size n+1

    std::size_t num_vars() const { return n + 1; }

    friend bool operator==(const ConicModel& a, const ConicModel& b) {
        auto trip_eq = [](const std::vector<Triplet>& x, const std::vector<Triplet>& y) {
            if (x.size() != y.size()) return false;
            for (std::size_t i = 0; i < x.size(); ++i)
                if (x[i].row != y[i].row || x[i].col != y[i].col ||
                    x[i].value != y[i].value)
                    return false;
            return true;
        };
        return a.n == b.n && trip_eq(a.obj_quad, b.obj_quad) && a.obj_lin == b.obj_lin &&
               trip_eq(a.eq, b.eq) && a.eq_rhs == b.eq_rhs && trip_eq(a.cone, b.cone) &&
               a.cone_rows == b.cone_rows && a.lower == b.lower && a.upper == b.upper;
    }
};

/// Objective value of the model at (w, z) packed as x, MAX orientation.
inline double conic_objective_value(const ConicModel& m, std::span<const double> x) {
    if (x.size() != m.num_vars())
        throw DimensionError("conic_objective_value: size mismatch");
    double v = 0.0;
    for (const Triplet& t : m.obj_quad) v += t.value * x[t.row] * x[t.col];
    for (std::size_t i = 0; i < m.obj_lin.size(); ++i) v += m.obj_lin[i] * x[i];
    return v;
}

/// Values of the cone rows at x, in SOC order (head first).
inline Vec cone_row_values(const ConicModel& m, std::span<const double> x) {
    if (x.size() != m.num_vars())
        throw DimensionError("cone_row_values: size mismatch");
    Vec rows(m.cone_rows.size(), 0.0);
    std::vector<std::size_t> pos(m.cone_rows.size());
    for (std::size_t i = 0; i < m.cone_rows.size(); ++i) pos[m.cone_rows[i]] = i;
    for (const Triplet& t : m.cone) rows[pos[t.row]] += t.value * x[t.col];
    return rows;
}

inline ConicModel build_conic_model(const CohortData& data, double lambda, double kappa) {
    if (lambda < 0.0 || kappa < 0.0) throw Error("lambda and kappa must be >= 0");
    const std::size_t n = data.n();
    ConicModel m;
    m.n = n;

    data.sigma().for_each_entry([&](std::size_t r, std::size_t c, double v) {
        const double coeff = (r == c) ? -0.5 * lambda * v : -lambda * v;
        if (coeff != 0.0) m.obj_quad.push_back({r, c, coeff});
    });

    m.obj_lin = data.mu_bar();
    m.obj_lin.push_back(-kappa);

    ConstraintSet sums = build_sum_constraints(data.partition(), n);
    for (std::size_t r = 0; r < sums.size(); ++r) {
        for (std::size_t j = 0; j < n; ++j)
            if (sums.rows[r][j] != 0.0) m.eq.push_back({r, j, sums.rows[r][j]});
        m.eq_rhs.push_back(sums.rhs[r]);
    }

    // Cone rows from Omega = (P' L sqrt(D)) (sqrt(D) L' P): row k+1 collects
    // sqrt(d_k) times column k of the unit factor, indexed back through the
    // permutation. Row 0 is the head and selects z.
    const LdlFactors& f = data.omega_factors();
    m.cone.push_back({0, n, 1.0});
    for (std::size_t k = 0; k < n; ++k) {
        const double sd = std::sqrt(f.d[k]);
        m.cone.push_back({k + 1, f.perm[k], sd});
        for (std::size_t p = f.col_ptr[k]; p < f.col_ptr[k + 1]; ++p)
            m.cone.push_back({k + 1, f.perm[f.rows[p]], sd * f.vals[p]});
    }
    std::sort(m.cone.begin(), m.cone.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    m.cone_rows.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) m.cone_rows[i] = i;

    m.lower = data.lower();
    m.lower.push_back(0.0);
    m.upper = data.upper();
    m.upper.push_back(std::numeric_limits<double>::infinity());
    return m;
}

// ---------------------------------------------------------------------------
// Text interchange
// ---------------------------------------------------------------------------
//
// Line-oriented UTF-8, '#' starts a comment, all indices 1-based, numbers
// printed with 17 significant digits. Sections appear in this fixed order:
//
//   VER 1
//   OBJSENSE MAX
//   VAR <nvars>
//   CON <neq> <ncone_rows>
//   OBJ.Q <ntriplets>      followed by "i j v" lines, i >= j
//   OBJ.L <nvars>          followed by "j v" lines, one per variable
//   EQ <ntriplets>         followed by "row j v" lines, then <neq> "row v"
//                          right-hand-side lines
//   CONE <ntriplets>       followed by one line of <ncone_rows> row ids
//                          (head first), then "row j v" lines
//   BOUNDS <nvars>         followed by "j lower upper" lines ("inf"/"-inf")

inline std::string export_conic(const ConicModel& m) {
    std::ostringstream os;
    auto d = [](double v) { return detail::fmt_double(v); };
    os << "# robust contribution selection, conic form\n";
    os << "# variables: w_1..w_" << m.n << ", z\n";
    os << "VER 1\n";
    os << "OBJSENSE MAX\n";
    os << "VAR " << m.num_vars() << "\n";
    os << "CON " << m.eq_rhs.size() << " " << m.cone_rows.size() << "\n";
    os << "OBJ.Q " << m.obj_quad.size() << "\n";
    for (const Triplet& t : m.obj_quad)
        os << t.row + 1 << " " << t.col + 1 << " " << d(t.value) << "\n";
    os << "OBJ.L " << m.obj_lin.size() << "\n";
    for (std::size_t i = 0; i < m.obj_lin.size(); ++i)
        os << i + 1 << " " << d(m.obj_lin[i]) << "\n";
    os << "EQ " << m.eq.size() << "\n";
    for (const Triplet& t : m.eq)
        os << t.row + 1 << " " << t.col + 1 << " " << d(t.value) << "\n";
    for (std::size_t r = 0; r < m.eq_rhs.size(); ++r)
        os << r + 1 << " " << d(m.eq_rhs[r]) << "\n";
    os << "CONE " << m.cone.size() << "\n";
    for (std::size_t i = 0; i < m.cone_rows.size(); ++i)
        os << (i ? " " : "") << m.cone_rows[i] + 1;
    os << "\n";
    for (const Triplet& t : m.cone)
        os << t.row + 1 << " " << t.col + 1 << " " << d(t.value) << "\n";
    os << "BOUNDS " << m.num_vars() << "\n";
    for (std::size_t i = 0; i < m.num_vars(); ++i)
        os << i + 1 << " " << d(m.lower[i]) << " " << d(m.upper[i]) << "\n";
    return os.str();
}

namespace detail {

class ConicReader {
  public:
    explicit ConicReader(std::string_view text) : lines_(split_lines(text)) {}

    std::vector<std::string_view> next() {
        while (at_ < lines_.size()) {
            auto toks = tokenize(lines_[at_]);
            ++at_;
            if (!toks.empty()) return toks;
        }
        fail("unexpected end of document");
    }

    std::size_t line() const { return at_; }  // 1-based line just consumed

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("conic", at_ == 0 ? 1 : at_, msg);
    }

    double as_double(std::string_view tok) const {
        double v;
        if (!parse_double(tok, v)) fail("expected number, got '" + std::string(tok) + "'");
        return v;
    }

    std::size_t as_index(std::string_view tok, std::size_t max) const {
        std::size_t v;
        if (!parse_index(tok, v) || v == 0)
            fail("expected positive index, got '" + std::string(tok) + "'");
        if (v > max) fail("index " + std::to_string(v) + " out of range");
        return v;
    }

    std::size_t as_count(std::string_view tok) const {
        std::size_t v;
        if (!parse_index(tok, v)) fail("expected count, got '" + std::string(tok) + "'");
        return v;
    }

  private:
    std::vector<std::string_view> lines_;
    std::size_t at_ = 0;
};

}  // namespace detail

/// Reads a document produced by export_conic back into a ConicModel.
/// Round-trips are exact: parse_conic(export_conic(m)) == m.
inline ConicModel parse_conic(std::string_view text) {
    detail::ConicReader rd(text);
    auto expect = [&](const char* kw, std::size_t ntok) {
        auto toks = rd.next();
        if (toks[0] != kw || toks.size() != ntok)
            rd.fail(std::string("expected '") + kw + "' section header");
        return toks;
    };

    ConicModel m;
    {
        auto t = expect("VER", 2);
        if (t[1] != "1") rd.fail("unsupported version");
    }
    {
        auto t = expect("OBJSENSE", 2);
        if (t[1] != "MAX") rd.fail("unsupported objective sense");
    }
    std::size_t nvars = 0;
    {
        auto t = expect("VAR", 2);
        nvars = rd.as_count(t[1]);
        if (nvars < 2) rd.fail("need at least one w variable plus z");
        m.n = nvars - 1;
    }
    std::size_t neq = 0, ncone = 0;
    {
        auto t = expect("CON", 3);
        neq = rd.as_count(t[1]);
        ncone = rd.as_count(t[2]);
    }
    auto read_triplets = [&](std::size_t count, std::size_t row_max,
                             std::vector<Triplet>& out) {
        for (std::size_t k = 0; k < count; ++k) {
            auto t = rd.next();
            if (t.size() != 3) rd.fail("expected 'row col value' triplet");
            Triplet trip;
            trip.row = rd.as_index(t[0], row_max) - 1;
            trip.col = rd.as_index(t[1], nvars) - 1;
            trip.value = rd.as_double(t[2]);
            out.push_back(trip);
        }
    };
    {
        auto t = expect("OBJ.Q", 2);
        read_triplets(rd.as_count(t[1]), nvars, m.obj_quad);
        for (const Triplet& trip : m.obj_quad)
            if (trip.row < trip.col) rd.fail("OBJ.Q triplet above the diagonal");
    }
    {
        auto t = expect("OBJ.L", 2);
        if (rd.as_count(t[1]) != nvars) rd.fail("OBJ.L must list every variable");
        m.obj_lin.assign(nvars, 0.0);
        for (std::size_t k = 0; k < nvars; ++k) {
            auto lt = rd.next();
            if (lt.size() != 2) rd.fail("expected 'var value'");
            m.obj_lin[rd.as_index(lt[0], nvars) - 1] = rd.as_double(lt[1]);
        }
    }
    {
        auto t = expect("EQ", 2);
        read_triplets(rd.as_count(t[1]), neq, m.eq);
        m.eq_rhs.assign(neq, 0.0);
        for (std::size_t k = 0; k < neq; ++k) {
            auto lt = rd.next();
            if (lt.size() != 2) rd.fail("expected 'row value' right-hand side");
            m.eq_rhs[rd.as_index(lt[0], neq) - 1] = rd.as_double(lt[1]);
        }
    }
    {
        auto t = expect("CONE", 2);
        const std::size_t ntrip = rd.as_count(t[1]);
        auto ids = rd.next();
        if (ids.size() != ncone) rd.fail("cone row list length disagrees with CON");
        m.cone_rows.resize(ncone);
        for (std::size_t k = 0; k < ncone; ++k)
            m.cone_rows[k] = rd.as_index(ids[k], ncone) - 1;
        read_triplets(ntrip, ncone, m.cone);
    }
    {
        auto t = expect("BOUNDS", 2);
        if (rd.as_count(t[1]) != nvars) rd.fail("BOUNDS must list every variable");
        m.lower.assign(nvars, 0.0);
        m.upper.assign(nvars, 0.0);
        for (std::size_t k = 0; k < nvars; ++k) {
            auto lt = rd.next();
            if (lt.size() != 3) rd.fail("expected 'var lower upper'");
            const std::size_t j = rd.as_index(lt[0], nvars) - 1;
            m.lower[j] = rd.as_double(lt[1]);
            m.upper[j] = rd.as_double(lt[2]);
        }
    }
    return m;
}

}  // namespace ocs
