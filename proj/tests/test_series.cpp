#include "doctest.h"

#include <cmath>

#include "sfcy/series.hpp"

using sfcy::cplx;
using sfcy::Series;

TEST_CASE("reciprocal of 1 - z is the geometric series") {
    Series s(std::vector<cplx>{1.0, -1.0, 0.0, 0.0, 0.0, 0.0});
    const Series r = s.reciprocal();
    for (std::size_t k = 0; k < r.size(); ++k) CHECK(std::abs(r[k] - 1.0) < 1e-15);
}

TEST_CASE("pow_unit matches the binomial series") {
    Series s(std::vector<cplx>{1.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0});
    const double p = 1.0 / 3.0;
    const Series r = s.pow_unit(p);
    double binom = 1.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
        CHECK(std::abs(r[k] - binom) < 1e-14);
        binom *= (p - double(k)) / double(k + 1);
    }
    // (1+z)^{1/3} cubed is 1+z again.
    const Series cube = r * r * r;
    CHECK(std::abs(cube[1] - 1.0) < 1e-14);
    for (std::size_t k = 2; k < cube.size(); ++k) CHECK(std::abs(cube[k]) < 1e-14);
}

TEST_CASE("reversion inverts exp(z) - 1 into log(1 + w)") {
    const std::size_t n = 14;
    Series e(n);
    double f = 1.0;
    for (std::size_t k = 1; k < n; ++k) {
        f *= double(k);
        e[k] = 1.0 / f;
    }
    const Series l = e.reversion();
    for (std::size_t k = 1; k < n; ++k) CHECK(std::abs(l[k] - (k % 2 ? 1.0 : -1.0) / double(k)) < 1e-12);
    const Series id = e.compose(l);
    CHECK(std::abs(id[1] - 1.0) < 1e-12);
    for (std::size_t k = 2; k < n; ++k) CHECK(std::abs(id[k]) < 1e-12);
}

TEST_CASE("radius estimate of a geometric series") {
    Series s(32);
    for (std::size_t k = 0; k < 32; ++k) s[k] = std::pow(2.0, double(k));
    CHECK(s.radius_estimate() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("derivative and integral are inverse up to the constant") {
    Series s(std::vector<cplx>{3.0, 1.0, cplx(0, 2), -4.0, 0.0});
    const Series d = s.integral().derivative();
    for (std::size_t k = 0; k + 1 < s.size(); ++k) CHECK(std::abs(d[k] - s[k]) < 1e-15);
    CHECK(std::abs(s.derivative_at(0.5) - (1.0 + cplx(0, 4) * 0.5 - 12.0 * 0.25)) < 1e-14);
}
