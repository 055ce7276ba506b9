#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mqreg/normal.hpp"

using namespace mqreg;

namespace {

// Bisection oracle on normal_cdf, independent of the rational approximation.
double quantile_by_bisection(double p) {
    double lo = -10.0, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (normal_cdf(mid) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("normal cdf/pdf spot values") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(normal_pdf(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 * 3.14159265358979323846)));
    CHECK(normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-12));
}

TEST_CASE("normal_quantile against the bisection oracle") {
    CHECK(std::abs(normal_quantile(0.75) - 0.6744897501960817) < 1e-9);
    for (double p : {1e-8, 0.001, 0.025, 0.25, 0.5, 0.75, 0.975, 0.999, 1.0 - 1e-8}) {
        CHECK(std::abs(normal_quantile(p) - quantile_by_bisection(p)) < 1e-9);
    }
}

TEST_CASE("quantile-cdf roundtrip on [-6, 6]") {
    for (double x = -6.0; x <= 6.0; x += 0.05) {
        CHECK(std::abs(normal_quantile(normal_cdf(x)) - x) < 1e-8);
    }
}

TEST_CASE("normal_quantile rejects p outside (0,1)") {
    CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
    CHECK_THROWS_AS(normal_quantile(-0.2), std::domain_error);
}

TEST_CASE("MAD consistency constant") {
    CHECK(normal_quantile(0.75) == doctest::Approx(kMadConsistency).epsilon(1e-12));
}
