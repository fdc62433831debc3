#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ocs/errors.hpp"
#include "ocs/format.hpp"
#include "ocs/model.hpp"
#include "ocs/qp.hpp"
#include "ocs/sqp.hpp"
#include "ocs/synthetic.hpp"

namespace ocs {

// ---------------------------------------------------------------------------
// Pareto frontier sweeps
// ---------------------------------------------------------------------------

/// One (lambda, kappa) point of a sweep. `error` is empty on success.
struct FrontierRecord {
    double lambda = 0.0;
    double kappa = 0.0;
    double merit = 0.0;
    double group_coancestry = 0.0;
    double uncertainty_term = 0.0;
    double objective = 0.0;
    std::size_t iterations = 0;
    double wall_time = 0.0;
    std::string error;

    bool ok() const { return error.empty(); }
};

namespace detail {

template <typename F>
void parallel_for(std::size_t count, F&& f) {
    const std::size_t workers =
        std::min<std::size_t>(count, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) f(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace detail

/// Solves every (lambda, kappa) pair of the cross product, in that order.
/// Points run in parallel on the shared immutable cohort; results land in
/// input order, so the output is deterministic regardless of scheduling.
/// Per-point failures are recorded and the sweep continues.
inline std::vector<FrontierRecord> frontier_sweep(const CohortData& data,
                                                  const std::vector<double>& lambdas,
                                                  const std::vector<double>& kappas,
                                                  const SqpSettings& settings = {}) {
    if (lambdas.empty()) throw Error("frontier: lambda list is empty");
    const std::vector<double> ks = kappas.empty() ? std::vector<double>{0.0} : kappas;
    std::vector<FrontierRecord> records(lambdas.size() * ks.size());
    detail::parallel_for(records.size(), [&](std::size_t idx) {
        FrontierRecord& rec = records[idx];
        rec.lambda = lambdas[idx / ks.size()];
        rec.kappa = ks[idx % ks.size()];
        try {
            SqpResult r = solve_robust_sqp(data, rec.lambda, rec.kappa, settings);
            if (r.trace.status != SqpStatus::Converged)
                throw SolveError(std::string("sqp: ") + to_string(r.trace.status));
            const Solution& s = r.solution;
            rec.merit = s.merit;
            rec.group_coancestry = s.group_coancestry;
            rec.uncertainty_term = s.uncertainty_term;
            rec.objective = s.objective;
            rec.iterations = s.iterations;
            rec.wall_time = s.wall_time;
        } catch (const std::exception& e) {
            rec.error = e.what();
        }
    });
    return records;
}

/// CSV with header "lambda,kappa,merit,coancestry,uncertainty,objective,
/// iterations,seconds". Failed points carry nan metric fields.
inline std::string frontier_csv(const std::vector<FrontierRecord>& records) {
    std::ostringstream os;
    os << "lambda,kappa,merit,coancestry,uncertainty,objective,iterations,seconds\n";
    for (const FrontierRecord& r : records) {
        os << detail::fmt_double(r.lambda) << "," << detail::fmt_double(r.kappa) << ",";
        if (r.ok())
            os << detail::fmt_double(r.merit) << "," << detail::fmt_double(r.group_coancestry)
               << "," << detail::fmt_double(r.uncertainty_term) << ","
               << detail::fmt_double(r.objective) << "," << r.iterations << ","
               << detail::fmt_double(r.wall_time);
        else
            os << "nan,nan,nan,nan,0,nan";
        os << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Scaling benchmark
// ---------------------------------------------------------------------------

struct BenchmarkSettings {
    double lambda = 0.5;
    double kappa = 1.0;
    std::uint64_t seed = 42;
    double density = 0.01;
    SqpSettings sqp;
};

/// One synthetic size: wall times for a standard and a robust solve plus the
/// robust cut count. DNF marks a time-limit hit or solver failure.
struct BenchmarkRow {
    std::size_t n = 0;
    double standard_s = 0.0;
    double robust_s = 0.0;
    std::size_t cuts = 0;
    bool standard_ok = false;
    bool robust_ok = false;
};

inline std::vector<BenchmarkRow> run_benchmark(const std::vector<std::size_t>& sizes,
                                               const BenchmarkSettings& settings = {}) {
    for (std::size_t k = 1; k < sizes.size(); ++k)
        if (sizes[k] <= sizes[k - 1]) throw Error("benchmark: sizes must be ascending");
    std::vector<BenchmarkRow> rows;
    for (std::size_t n : sizes) {
        BenchmarkRow row;
        row.n = n;
        SyntheticSpec spec;
        spec.n = n;
        spec.seed = settings.seed;
        spec.relationship_density = settings.density;
        const CohortData data = generate_synthetic(spec);
        try {
            Solution s = solve_standard_ocs(data, settings.lambda, settings.sqp.qp);
            row.standard_s = s.wall_time;
            row.standard_ok = true;
        } catch (const std::exception&) {
        }
        try {
            SqpResult r = solve_robust_sqp(data, settings.lambda, settings.kappa, settings.sqp);
            row.robust_s = r.solution.wall_time;
            row.cuts = r.trace.cuts_added();
            row.robust_ok = r.trace.status == SqpStatus::Converged;
        } catch (const std::exception&) {
        }
        rows.push_back(row);
    }
    return rows;
}

/// CSV "n,standard_s,robust_s,cuts"; failures print DNF.
inline std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
    std::ostringstream os;
    os << "n,standard_s,robust_s,cuts\n";
    for (const BenchmarkRow& r : rows) {
        os << r.n << ",";
        if (r.standard_ok) os << detail::fmt_double(r.standard_s);
        else os << "DNF";
        os << ",";
        if (r.robust_ok) os << detail::fmt_double(r.robust_s) << "," << r.cuts;
        else os << "DNF,DNF";
        os << "\n";
    }
    return os.str();
}

/// Fixed-width table for terminals.
inline std::string benchmark_table(const std::vector<BenchmarkRow>& rows) {
    std::ostringstream os;
    os << std::setw(8) << "n" << std::setw(14) << "standard_s" << std::setw(14) << "robust_s"
       << std::setw(8) << "cuts" << "\n";
    for (const BenchmarkRow& r : rows) {
        os << std::setw(8) << r.n;
        auto cell = [&](bool ok, double v) {
            std::ostringstream c;
            if (ok) c << std::fixed << std::setprecision(3) << v;
            else c << "DNF";
            os << std::setw(14) << c.str();
        };
        cell(r.standard_ok, r.standard_s);
        cell(r.robust_ok, r.robust_s);
        if (r.robust_ok) os << std::setw(8) << r.cuts;
        else os << std::setw(8) << "DNF";
        os << "\n";
    }
    return os.str();
}

}  // namespace ocs
