#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <fstream>
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
// Cohort input files
// ---------------------------------------------------------------------------
//
// All formats are line-oriented UTF-8 with 1-based indices; '#' starts a
// comment and blank lines are skipped.
//
//   matrix:  "i j value" per entry. Entries above the diagonal are mirrored
//            into the lower triangle; duplicates of the same unordered pair
//            are rejected. The dimension is the largest index seen unless
//            the file opens with a "# n <N>" directive.
//   vector:  "i value", every index 1..n present exactly once.
//   sexes:   "i S" or "i D" (case-insensitive; M and F are aliases).
//
// Every parser is total: any input produces either a value or a ParseError
// whose ParseDiagnostics carry the file role and a 1-based line number.

namespace detail {

struct Line {
    std::size_t number;  // 1-based
    std::vector<std::string_view> tokens;
};

// Non-empty data lines. When a "# n <N>" comment directive opens the file
// (before any data), *declared_n receives N.
inline std::vector<Line> data_lines(std::string_view text, const std::string& role,
                                    std::size_t* declared_n) {
    std::vector<Line> out;
    const auto raw = split_lines(text);
    for (std::size_t k = 0; k < raw.size(); ++k) {
        std::string_view line = raw[k];
        const auto toks = tokenize(line);
        if (toks.empty()) {
            if (declared_n && out.empty()) {
                // comment line; check for the dimension directive
                auto c = line.find('#');
                if (c != std::string_view::npos) {
                    auto dir = tokenize(line.substr(c + 1));
                    std::size_t n;
                    if (dir.size() == 2 && dir[0] == "n" && parse_index(dir[1], n)) {
                        if (*declared_n != 0)
                            throw ParseError(role, k + 1, "duplicate dimension directive");
                        if (n == 0) throw ParseError(role, k + 1, "dimension must be >= 1");
                        *declared_n = n;
                    }
                }
            }
            continue;
        }
        out.push_back({k + 1, toks});
    }
    return out;
}

inline std::size_t require_index(std::string_view tok, const std::string& role,
                                 std::size_t line) {
    std::size_t v;
    if (!parse_index(tok, v) || v == 0)
        throw ParseError(role, line, "expected index >= 1, got '" + std::string(tok) + "'");
    return v;
}

inline double require_double(std::string_view tok, const std::string& role, std::size_t line) {
    double v;
    if (!parse_double(tok, v))
        throw ParseError(role, line, "expected number, got '" + std::string(tok) + "'");
    return v;
}

}  // namespace detail

inline SymSparseMatrix parse_matrix_file(std::string_view text,
                                         const std::string& role = "matrix") {
    std::size_t declared_n = 0;
    const auto lines = detail::data_lines(text, role, &declared_n);
    std::vector<Triplet> entries;
    std::vector<std::size_t> entry_line;
    std::size_t max_index = 0;
    for (const auto& ln : lines) {
        if (ln.tokens.size() != 3)
            throw ParseError(role, ln.number, "expected 'i j value'");
        std::size_t i = detail::require_index(ln.tokens[0], role, ln.number);
        std::size_t j = detail::require_index(ln.tokens[1], role, ln.number);
        const double v = detail::require_double(ln.tokens[2], role, ln.number);
        if (i < j) std::swap(i, j);  // mirror into the lower triangle
        if (declared_n && i > declared_n)
            throw ParseError(role, ln.number,
                             "index " + std::to_string(i) + " exceeds declared dimension " +
                                 std::to_string(declared_n));
        max_index = std::max(max_index, i);
        entries.push_back({i - 1, j - 1, v});
        entry_line.push_back(ln.number);
    }
    const std::size_t n = declared_n ? declared_n : max_index;
    // duplicate detection with line numbers, before handing off
    {
        std::vector<std::size_t> idx(entries.size());
        for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            if (entries[a].row != entries[b].row) return entries[a].row < entries[b].row;
            if (entries[a].col != entries[b].col) return entries[a].col < entries[b].col;
            return entry_line[a] < entry_line[b];
        });
        for (std::size_t k = 1; k < idx.size(); ++k)
            if (entries[idx[k]].row == entries[idx[k - 1]].row &&
                entries[idx[k]].col == entries[idx[k - 1]].col)
                throw ParseError(role, entry_line[idx[k]],
                                 "duplicate entry (" + std::to_string(entries[idx[k]].row + 1) +
                                     ", " + std::to_string(entries[idx[k]].col + 1) + ")");
    }
    return SymSparseMatrix(n, std::move(entries));
}

inline Vec parse_vector_file(std::string_view text, const std::string& role = "vector") {
    const auto lines = detail::data_lines(text, role, nullptr);
    std::vector<std::pair<std::size_t, double>> got;
    std::size_t n = 0, last_line = 0;
    for (const auto& ln : lines) {
        if (ln.tokens.size() != 2)
            throw ParseError(role, ln.number, "expected 'i value'");
        const std::size_t i = detail::require_index(ln.tokens[0], role, ln.number);
        const double v = detail::require_double(ln.tokens[1], role, ln.number);
        got.push_back({i, v});
        n = std::max(n, i);
        last_line = ln.number;
    }
    Vec out(n, 0.0);
    std::vector<std::size_t> seen_at(n, 0);
    for (std::size_t k = 0; k < got.size(); ++k) {
        const std::size_t i = got[k].first;
        if (seen_at[i - 1])
            throw ParseError(role, lines[k].number, "duplicate index " + std::to_string(i));
        seen_at[i - 1] = lines[k].number;
        out[i - 1] = got[k].second;
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!seen_at[i])
            throw ParseError(role, last_line, "missing index " + std::to_string(i + 1));
    return out;
}

inline SexPartition parse_sex_file(std::string_view text, const std::string& role = "sexes") {
    const auto lines = detail::data_lines(text, role, nullptr);
    std::vector<std::pair<std::size_t, bool>> got;  // (index, is_sire)
    std::size_t n = 0, last_line = 0;
    for (const auto& ln : lines) {
        if (ln.tokens.size() != 2)
            throw ParseError(role, ln.number, "expected 'i S|D'");
        const std::size_t i = detail::require_index(ln.tokens[0], role, ln.number);
        std::string tok(ln.tokens[1]);
        for (char& ch : tok) ch = char(std::toupper(static_cast<unsigned char>(ch)));
        bool is_sire;
        if (tok == "S" || tok == "M") is_sire = true;
        else if (tok == "D" || tok == "F") is_sire = false;
        else
            throw ParseError(role, ln.number,
                             "unknown sex token '" + std::string(ln.tokens[1]) + "'");
        got.push_back({i, is_sire});
        n = std::max(n, i);
        last_line = ln.number;
    }
    std::vector<std::size_t> seen_at(n, 0);
    SexPartition part;
    for (std::size_t k = 0; k < got.size(); ++k) {
        const auto [i, is_sire] = got[k];
        if (seen_at[i - 1])
            throw ParseError(role, lines[k].number, "duplicate index " + std::to_string(i));
        seen_at[i - 1] = lines[k].number;
        (is_sire ? part.sires : part.dams).push_back(i - 1);
    }
    for (std::size_t i = 0; i < n; ++i)
        if (!seen_at[i])
            throw ParseError(role, last_line, "missing index " + std::to_string(i + 1));
    return part;
}

// ---------------------------------------------------------------------------
// Outputs
// ---------------------------------------------------------------------------

/// Contribution lines "i w_i" followed by a comment footer with the
/// objective decomposition. The body re-parses with parse_vector_file
/// bit-exactly.
inline std::string write_solution(const Solution& sol) {
    std::ostringstream os;
    for (std::size_t i = 0; i < sol.w.size(); ++i)
        os << i + 1 << " " << detail::fmt_double(sol.w[i]) << "\n";
    os << "# objective " << detail::fmt_double(sol.objective) << "\n";
    os << "# merit " << detail::fmt_double(sol.merit) << "\n";
    os << "# coancestry " << detail::fmt_double(sol.group_coancestry) << "\n";
    os << "# uncertainty " << detail::fmt_double(sol.uncertainty_term) << "\n";
    os << "# iterations " << sol.iterations << "\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Whole-cohort loading
// ---------------------------------------------------------------------------

inline std::string read_file(const std::string& path, const std::string& role) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError(role, 1, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Parses the four cohort documents and cross-checks their dimensions.
/// Omega's positive definiteness is verified by CohortData's factorization;
/// a failure names the offending pivot.
inline CohortData load_cohort(std::string_view sigma_text, std::string_view mu_text,
                              std::string_view omega_text, std::string_view sex_text) {
    SymSparseMatrix sigma = parse_matrix_file(sigma_text, "sigma");
    Vec mu = parse_vector_file(mu_text, "mu");
    SymSparseMatrix omega = parse_matrix_file(omega_text, "omega");
    SexPartition part = parse_sex_file(sex_text, "sexes");
    const std::size_t n = sigma.size();
    if (mu.size() != n || omega.size() != n ||
        part.sires.size() + part.dams.size() != n)
        throw Error("cohort files disagree on the number of candidates");
    return CohortData(std::move(sigma), std::move(mu), std::move(omega), std::move(part));
}

inline CohortData load_cohort_files(const std::string& sigma_path, const std::string& mu_path,
                                    const std::string& omega_path,
                                    const std::string& sex_path) {
    return load_cohort(read_file(sigma_path, "sigma"), read_file(mu_path, "mu"),
                       read_file(omega_path, "omega"), read_file(sex_path, "sexes"));
}

}  // namespace ocs
