#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "ocs/conic.hpp"
#include "ocs/synthetic.hpp"
#include "support/helpers.hpp"

using namespace ocs;
using testsupport::Rng;
using testsupport::toy_cohort;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Omega rebuilt entrywise from the cone tail rows; the head row is excluded.
testsupport::Mat reconstruct_omega(const ConicModel& m) {
    testsupport::Mat full(m.n, Vec(m.n, 0.0));
    std::vector<Vec> rows(m.cone_rows.size(), Vec(m.num_vars(), 0.0));
    std::vector<std::size_t> pos(m.cone_rows.size());
    for (std::size_t i = 0; i < m.cone_rows.size(); ++i) pos[m.cone_rows[i]] = i;
    for (const Triplet& t : m.cone) rows[pos[t.row]][t.col] += t.value;
    for (std::size_t r = 1; r < rows.size(); ++r)
        for (std::size_t i = 0; i < m.n; ++i)
            for (std::size_t j = 0; j < m.n; ++j) full[i][j] += rows[r][i] * rows[r][j];
    return full;
}

}  // namespace

TEST_CASE("toy conic model has the expected shape", "[conic]") {
    const CohortData data = toy_cohort();
    const ConicModel m = build_conic_model(data, 0.1, 1.0);
    REQUIRE(m.num_vars() == 4);
    REQUIRE(m.eq_rhs.size() == 2);
    REQUIRE(m.cone_rows.size() == 4);
    REQUIRE(m.obj_lin == Vec{1.0, 2.0, 1.0, -1.0});
    REQUIRE(m.lower == Vec{0.0, 0.0, 0.0, 0.0});
    REQUIRE(m.upper[3] == std::numeric_limits<double>::infinity());

    // diagonal covariance: rows are (z, w1/3, 2 w2, w3)
    const Vec x{0.9, 0.7, 0.3, 2.0};
    const Vec rows = cone_row_values(m, x);
    REQUIRE_THAT(rows[0], WithinRel(2.0, 1e-15));
    REQUIRE_THAT(rows[1], WithinRel(0.9 / 3.0, 1e-14));
    REQUIRE_THAT(rows[2], WithinRel(2.0 * 0.7, 1e-14));
    REQUIRE_THAT(rows[3], WithinRel(0.3, 1e-14));
}

TEST_CASE("kappa zero still emits the cone", "[conic]") {
    const ConicModel m = build_conic_model(toy_cohort(), 0.1, 0.0);
    REQUIRE(m.cone_rows.size() == 4);
    REQUIRE(m.obj_lin[3] == 0.0);
}

TEST_CASE("z only enters the objective and the cone head", "[conic]") {
    const ConicModel m = build_conic_model(toy_cohort(), 0.1, 1.0);
    const std::size_t z = m.n;
    for (const Triplet& t : m.eq) REQUIRE(t.col != z);
    for (const Triplet& t : m.obj_quad) REQUIRE(t.col != z);
    for (const Triplet& t : m.cone)
        if (t.col == z) REQUIRE(t.row == 0);
    REQUIRE(m.obj_lin[z] == -1.0);
}

TEST_CASE("cone factor reproduces omega", "[conic]") {
    Rng rng(307);
    for (int rep = 0; rep < 10; ++rep) {
        SyntheticSpec spec;
        spec.n = 4 + rng.index(12);
        spec.seed = 1000 + std::uint64_t(rep);
        const CohortData data = generate_synthetic(spec);
        const ConicModel m = build_conic_model(data, 0.3, 0.7);
        const auto full = reconstruct_omega(m);
        double scale = 0.0;
        data.omega().for_each_entry([&](std::size_t, std::size_t, double v) {
            scale = std::max(scale, std::abs(v));
        });
        testsupport::Mat dense(data.n(), Vec(data.n(), 0.0));
        data.omega().for_each_entry([&](std::size_t r, std::size_t c, double v) {
            dense[r][c] = dense[c][r] = v;
        });
        for (std::size_t i = 0; i < data.n(); ++i)
            for (std::size_t j = 0; j < data.n(); ++j)
                REQUIRE(std::abs(full[i][j] - dense[i][j]) <= 1e-10 * scale);
    }
}

TEST_CASE("export is deterministic and ordered", "[conic]") {
    const ConicModel m = build_conic_model(toy_cohort(), 0.1, 1.0);
    const std::string a = export_conic(m);
    const std::string b = export_conic(m);
    REQUIRE(a == b);

    // section headers appear in the fixed order
    std::size_t at = 0;
    for (const char* kw : {"\nVER ", "\nOBJSENSE ", "\nVAR ", "\nCON ", "\nOBJ.Q ",
                           "\nOBJ.L ", "\nEQ ", "\nCONE ", "\nBOUNDS "}) {
        const std::size_t found = a.find(kw, at);
        REQUIRE(found != std::string::npos);
        at = found;
    }
}

TEST_CASE("export round-trips through the parser", "[conic]") {
    Rng rng(311);
    const ConicModel toy = build_conic_model(toy_cohort(), 0.1, 1.0);
    REQUIRE(parse_conic(export_conic(toy)) == toy);

    SyntheticSpec spec;
    spec.n = 9;
    spec.seed = 77;
    const CohortData data = generate_synthetic(spec);
    for (double kappa : {0.0, 0.5, 2.0}) {
        const ConicModel m = build_conic_model(data, rng.uniform(0.0, 2.0), kappa);
        REQUIRE(parse_conic(export_conic(m)) == m);
    }
}

TEST_CASE("parser rejects malformed documents", "[conic]") {
    const std::string good = export_conic(build_conic_model(toy_cohort(), 0.1, 1.0));
    REQUIRE_THROWS_AS(parse_conic(""), ParseError);
    REQUIRE_THROWS_AS(parse_conic("VER 2\n"), ParseError);
    std::string truncated = good.substr(0, good.size() / 2);
    REQUIRE_THROWS_AS(parse_conic(truncated), ParseError);
}

TEST_CASE("cone rows agree with the sqrt test on sampled points", "[conic]") {
    Rng rng(313);
    const CohortData data = toy_cohort();
    const ConicModel m = parse_conic(export_conic(build_conic_model(data, 0.1, 1.0)));
    for (int rep = 0; rep < 1000; ++rep) {
        const Vec w = testsupport::random_feasible_w(rng, data);
        const double alpha = std::sqrt(quad_form(data.omega(), w));
        // feasible points satisfy the exported cone rows
        double z = alpha * (1.0 + rng.uniform(0.0, 2.0));
        if (rep % 3 == 0) z = alpha;  // boundary
        Vec x = w;
        x.push_back(z);
        const Vec rows = cone_row_values(m, x);
        double tail = 0.0;
        for (std::size_t r = 1; r < rows.size(); ++r) tail += rows[r] * rows[r];
        tail = std::sqrt(tail);
        REQUIRE(tail <= rows[0] + 1e-10);
        // and infeasible points fail it
        const double z_bad = alpha * (1.0 - 1e-6 - rng.uniform(0.0, 0.9));
        x[3] = z_bad;
        const Vec bad_rows = cone_row_values(m, x);
        REQUIRE(tail > bad_rows[0] + alpha * 1e-7);
    }
}

TEST_CASE("exported objective equals the robust objective with z in place of the root",
          "[conic]") {
    Rng rng(317);
    const CohortData data = toy_cohort();
    const double lambda = 0.1, kappa = 1.0;
    const ConicModel m = parse_conic(export_conic(build_conic_model(data, lambda, kappa)));
    for (int rep = 0; rep < 200; ++rep) {
        const Vec w = testsupport::random_feasible_w(rng, data);
        const double z = rng.uniform(0.0, 3.0);
        Vec x = w;
        x.push_back(z);
        const double via_model = conic_objective_value(m, x);
        const double alpha = std::sqrt(quad_form(data.omega(), w));
        const double direct =
            evaluate_robust_objective(w, data, lambda, kappa) + kappa * alpha - kappa * z;
        REQUIRE_THAT(via_model, WithinRel(direct, 1e-12) || WithinAbs(direct, 1e-13));
    }
}
