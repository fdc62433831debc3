#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ocs/conic.hpp"
#include "ocs/errors.hpp"
#include "ocs/format.hpp"
#include "ocs/frontier.hpp"
#include "ocs/io.hpp"
#include "ocs/model.hpp"
#include "ocs/qp.hpp"
#include "ocs/sqp.hpp"
#include "ocs/synthetic.hpp"

namespace ocs {

namespace detail {

inline std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        double v;
        if (!parse_double(std::string_view(text).substr(pos, comma - pos), v))
            throw Error(std::string(what) + ": expected a comma-separated number list");
        out.push_back(v);
        pos = comma + 1;
    }
    return out;
}

inline std::vector<std::size_t> parse_size_list(const std::string& text, const char* what) {
    std::vector<std::size_t> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        std::size_t v;
        if (!parse_index(std::string_view(text).substr(pos, comma - pos), v))
            throw Error(std::string(what) + ": expected a comma-separated integer list");
        out.push_back(v);
        pos = comma + 1;
    }
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "' for writing");
    f << content;
    if (!f) throw Error("write to '" + path + "' failed");
}

}  // namespace detail

/// Command-line driver. Exit codes: 0 success, 1 parse/solve error (one
/// diagnostic line on `err`), 2 time limit hit (best iterate still written).
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal contribution selection with an uncertainty-robust mode"};
    app.name("ocskit");

    std::string sigma_path, mu_path, omega_path, sex_path;
    app.add_option("--sigma", sigma_path, "relationship matrix file");
    app.add_option("--mu", mu_path, "breeding value means file");
    app.add_option("--omega", omega_path, "breeding value covariance file");
    app.add_option("--sex", sex_path, "candidate sexes file");

    double lambda = 0.0, kappa = 0.0;
    app.add_option("--lambda", lambda, "coancestry weight, >= 0");
    app.add_option("--kappa", kappa, "uncertainty tolerance, >= 0")->default_val(0.0);

    std::string method = "standard";
    app.add_option("--method", method, "standard | robust | conic-export")
        ->check(CLI::IsMember({"standard", "robust", "conic-export"}));

    SqpSettings sqp;
    app.add_option("--gap-tol", sqp.gap_tol, "SQP cone gap tolerance");
    app.add_option("--max-cuts", sqp.max_cuts, "SQP cut budget");
    app.add_option("--kkt-tol", sqp.qp.kkt_tol, "QP KKT tolerance");
    app.add_option("--time-limit", sqp.time_limit, "seconds; checked between cuts");

    std::string out_path;
    app.add_option("--out", out_path, "output file (default: stdout)");

    std::string frontier_spec, kappa_list_spec, benchmark_spec;
    app.add_option("--frontier", frontier_spec, "comma-separated lambda sweep");
    app.add_option("--kappa-list", kappa_list_spec, "comma-separated kappa sweep");
    app.add_option("--benchmark", benchmark_spec, "comma-separated synthetic sizes");

    std::size_t synthetic_n = 0;
    std::uint64_t seed = 1;
    double density = 0.01, ebv_scale = 1.0;
    app.add_option("--synthetic", synthetic_n, "generate a synthetic cohort of this size");
    app.add_option("--seed", seed, "synthetic cohort seed");
    app.add_option("--density", density, "synthetic relationship density");
    app.add_option("--ebv-scale", ebv_scale, "synthetic covariance scale");

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    auto emit = [&](const std::string& text) {
        if (out_path.empty()) out << text;
        else detail::write_text_file(out_path, text);
    };

    try {
        if (!benchmark_spec.empty()) {
            BenchmarkSettings bset;
            bset.sqp = sqp;
            bset.seed = seed;
            bset.density = density;
            if (app.count("--lambda")) bset.lambda = lambda;
            if (app.count("--kappa")) bset.kappa = kappa;
            const auto rows =
                run_benchmark(detail::parse_size_list(benchmark_spec, "--benchmark"), bset);
            out << benchmark_table(rows);
            if (!out_path.empty()) detail::write_text_file(out_path, benchmark_csv(rows));
            return 0;
        }

        const bool have_files = !sigma_path.empty() || !mu_path.empty() ||
                                !omega_path.empty() || !sex_path.empty();
        if (have_files && synthetic_n > 0)
            throw Error("--synthetic conflicts with explicit cohort files");
        if (!have_files && synthetic_n == 0)
            throw Error("no cohort given: pass --sigma/--mu/--omega/--sex or --synthetic");
        if (have_files &&
            (sigma_path.empty() || mu_path.empty() || omega_path.empty() || sex_path.empty()))
            throw Error("all four of --sigma, --mu, --omega, --sex are required");

        std::optional<CohortData> data;
        if (have_files) {
            data.emplace(load_cohort_files(sigma_path, mu_path, omega_path, sex_path));
        } else {
            SyntheticSpec spec;
            spec.n = synthetic_n;
            spec.seed = seed;
            spec.relationship_density = density;
            spec.ebv_scale = ebv_scale;
            data.emplace(generate_synthetic(spec));
        }

        if (!frontier_spec.empty()) {
            const auto lambdas = detail::parse_double_list(frontier_spec, "--frontier");
            std::vector<double> kappas;
            if (!kappa_list_spec.empty())
                kappas = detail::parse_double_list(kappa_list_spec, "--kappa-list");
            emit(frontier_csv(frontier_sweep(*data, lambdas, kappas, sqp)));
            return 0;
        }

        if (!app.count("--lambda")) throw Error("--lambda is required for a single solve");
        if (lambda < 0.0 || kappa < 0.0) throw Error("--lambda and --kappa must be >= 0");

        if (method == "conic-export") {
            emit(export_conic(build_conic_model(*data, lambda, kappa)));
            return 0;
        }
        if (method == "standard") {
            emit(write_solution(solve_standard_ocs(*data, lambda, sqp.qp)));
            return 0;
        }
        // robust
        SqpResult res = solve_robust_sqp(*data, lambda, kappa, sqp);
        emit(write_solution(res.solution));
        if (res.trace.status == SqpStatus::TimeLimit) {
            err << "error: time limit reached; best iterate written\n";
            return 2;
        }
        if (res.trace.status == SqpStatus::MaxCutsExceeded) {
            err << "error: cut budget exhausted; best iterate written\n";
            return 1;
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ocs
