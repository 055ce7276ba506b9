#include <doctest.h>

#include <cmath>

#include "mqreg/fit.hpp"
#include "mqreg/influence.hpp"
#include "mqreg/normal.hpp"
#include "mqreg/simlab.hpp"
#include "mqreg/tuning.hpp"
#include "oracles.hpp"

using namespace mqreg;

namespace {

// Independent oracle for the inverse M-quantile function: the order q solving
// E_F[psi_q((Y - x)/sigma_q)] = 0 can be written from the two one-sided Huber
// expectations, q = -E^- / (E^+ - E^-). Computed here by adaptive quadrature.
double inverse_mq_by_quadrature(double x, double mean, double sd, double sigma_q, double c) {
    auto dens = [&](double y) { return normal_pdf((y - mean) / sd) / sd; };
    auto lower = [&](double y) { return psi_huber((y - x) / sigma_q, c) * dens(y); };
    double lo = mean - 12.0 * sd, hi = mean + 12.0 * sd;
    double e_minus = oracles::integrate_piecewise(lower, {lo, x - c * sigma_q, x});
    double e_plus = oracles::integrate_piecewise(lower, {x, x + c * sigma_q, hi});
    return -e_minus / (e_plus - e_minus);
}

}  // namespace

TEST_CASE("CGrid values are inclusive and validated") {
    CGrid g{0.5, 4.0, 0.5};
    auto v = g.values();
    REQUIRE(v.size() == 8);
    CHECK(v.front() == doctest::Approx(0.5));
    CHECK(v.back() == doctest::Approx(4.0));
    CHECK_THROWS(CGrid{2.0, 1.0, 0.1}.validate());
    CHECK_THROWS(CGrid{0.5, 4.0, 0.0}.validate());
}

TEST_CASE("partial expectation of a normal") {
    // Standard normal: H(t) = -phi(t).
    for (double t : {-2.0, -0.3, 0.0, 1.0, 4.0}) {
        CHECK(partial_expectation_normal(t, 0.0, 1.0) ==
              doctest::Approx(-normal_pdf(t)).epsilon(1e-13));
    }
    // General case against quadrature.
    double mean = 1.7, sd = 2.3;
    for (double t : {-3.0, 0.0, 2.0, 9.0}) {
        double numeric = oracles::adaptive_simpson(
            [&](double y) { return y * normal_pdf((y - mean) / sd) / sd; }, mean - 14.0 * sd, t);
        CHECK(partial_expectation_normal(t, mean, sd) == doctest::Approx(numeric).epsilon(1e-9));
    }
    // Whole-line integral recovers the mean.
    CHECK(partial_expectation_normal(mean + 14.0 * sd, mean, sd) ==
          doctest::Approx(mean).epsilon(1e-12));
}

TEST_CASE("inverse_mq against the quadrature oracle") {
    for (double c : {1.0, 1.345, 4.0}) {
        for (double sigma_q : {0.7, 1.0, 1.8}) {
            for (double x : {-2.0, -0.5, 0.0, 0.6, 2.5}) {
                InverseMqResult g = inverse_mq(x, 0.0, 1.0, sigma_q, c);
                CHECK_FALSE(g.clamped);
                CHECK(g.value ==
                      doctest::Approx(inverse_mq_by_quadrature(x, 0.0, 1.0, sigma_q, c))
                          .epsilon(1e-8));
            }
        }
    }
    // Shifted/scaled reference distribution.
    InverseMqResult g = inverse_mq(2.0, 1.5, 0.8, 1.0, 4.0);
    CHECK(g.value == doctest::Approx(inverse_mq_by_quadrature(2.0, 1.5, 0.8, 1.0, 4.0))
                         .epsilon(1e-8));
}

TEST_CASE("inverse_mq is increasing with range (0,1) and symmetric center") {
    double prev = -1.0;
    for (double x = -4.0; x <= 4.0; x += 0.25) {
        InverseMqResult g = inverse_mq(x, 0.0, 1.0, 1.0, 4.0);
        CHECK(g.value > 0.0);
        CHECK(g.value < 1.0);
        CHECK(g.value > prev);
        prev = g.value;
    }
    CHECK(inverse_mq(0.0, 0.0, 1.0, 1.0, 4.0).value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("default_q_grid spans 0.01..0.99") {
    auto g = default_q_grid();
    REQUIRE(g.size() == 99);
    CHECK(g.front() == doctest::Approx(0.01));
    CHECK(g[49] == doctest::Approx(0.50));
    CHECK(g.back() == doctest::Approx(0.99));
}

TEST_CASE("select_c_av prefers large c on clean data, small c on heavy tails") {
    ScenarioSpec clean;
    clean.family = Family::normal;
    clean.n = 2000;
    clean.seed = 101;
    CGrid grid{0.5, 4.0, 0.1};
    TuningResult r = select_c_av(generate(clean, 0), 0.5, grid);
    CHECK(r.converged);
    CHECK(r.c_opt > 1.345);
    CHECK(r.trace.size() == grid.values().size());

    ScenarioSpec heavy;
    heavy.family = Family::cauchy;
    heavy.n = 2000;
    heavy.seed = 101;
    TuningResult rc = select_c_av(generate(heavy, 0), 0.5, grid);
    CHECK(rc.converged);
    CHECK(rc.c_opt < r.c_opt);
    CHECK(rc.c_opt <= 1.0);
}

TEST_CASE("select_c_av is deterministic and reports the criterion trace") {
    ScenarioSpec spec;
    spec.family = Family::contaminated_normal;
    spec.alpha = 0.1;
    spec.n = 1000;
    spec.seed = 55;
    Dataset d = generate(spec, 3);
    CGrid grid{0.5, 4.0, 0.1};
    TuningResult a = select_c_av(d, 0.5, grid);
    TuningResult b = select_c_av(d, 0.5, grid);
    CHECK(a.c_opt == b.c_opt);
    CHECK(a.iterations == b.iterations);
    // The reported optimum maximizes the reported trace.
    double best = -1.0;
    for (const auto& [c, crit] : a.trace) best = std::max(best, crit);
    for (const auto& [c, crit] : a.trace) {
        if (c == a.c_opt) CHECK(crit == doctest::Approx(best));
    }
}

TEST_CASE("select_c_inv separates clean from contaminated data") {
    std::vector<double> q_grid = {0.1, 0.25, 0.5, 0.75, 0.9};
    CGrid grid{0.5, 4.0, 0.5};

    ScenarioSpec clean;
    clean.family = Family::contaminated_normal;
    clean.alpha = 0.0;
    clean.n = 1000;
    clean.seed = 7;
    TuningResult r0 = select_c_inv(generate(clean, 0), q_grid, grid);
    CHECK(r0.converged);
    CHECK(r0.failed_fits == 0);
    CHECK(r0.trace.size() == grid.values().size());

    ScenarioSpec dirty = clean;
    dirty.alpha = 0.20;
    TuningResult r20 = select_c_inv(generate(dirty, 0), q_grid, grid);
    CHECK(r20.converged);
    CHECK(r0.c_opt > r20.c_opt);
}

TEST_CASE("select_c_inv picks the trace minimizer") {
    ScenarioSpec spec;
    spec.family = Family::t3;
    spec.n = 600;
    spec.seed = 9;
    TuningResult r = select_c_inv(generate(spec, 1), {0.25, 0.5, 0.75}, CGrid{0.5, 4.0, 0.5});
    double best = 1e300;
    double arg = 0.0;
    for (const auto& [c, crit] : r.trace) {
        if (crit < best) {
            best = crit;
            arg = c;
        }
    }
    CHECK(r.c_opt == doctest::Approx(arg));
}
