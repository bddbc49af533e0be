#include "doctest.h"

#include <cmath>
#include <numbers>

#include "sfcy/cubic_diff.hpp"
#include "sfcy/errors.hpp"

using namespace sfcy;

namespace {
RationalCubicDifferential six_poles() { return RationalCubicDifferential({1.0}, {-1.0, 0, 0, 0, 0, 0, 1.0}); }
}  // namespace

TEST_CASE("evaluate") {
    RationalCubicDifferential inv_z({1.0}, {0.0, 1.0});
    CHECK(std::abs(evaluate(inv_z, 2.0) - 0.5) < 1e-15);
    CHECK(std::abs(evaluate(six_poles(), 0.0) + 1.0) < 1e-15);
    CHECK_THROWS_AS(evaluate(inv_z, 0.0), PoleEvaluation);
}

TEST_CASE("identically zero section is rejected") {
    CHECK_THROWS_AS(RationalCubicDifferential({0.0}, {1.0}), InvalidDifferential);
}

TEST_CASE("poles of 1/(z^6-1)") {
    const auto poles = find_poles(six_poles());
    REQUIRE(poles.size() == 6);
    bool found = false;
    for (const auto& p : poles) {
        CHECK(!p.location.infinity);
        CHECK(std::abs(std::abs(p.location.z) - 1.0) < 1e-13);
        // residue 1/(6 p^5)
        CHECK(std::abs(p.residue - 1.0 / (6.0 * std::pow(p.location.z, 5))) < 1e-13);
        if (std::abs(p.location.z - 1.0) < 1e-10) {
            found = true;
            CHECK(std::abs(p.residue - 1.0 / 6.0) < 1e-13);
        }
    }
    CHECK(found);
}

TEST_CASE("2/z has a simple pole at 0 with residue 2 and the rest sits at infinity") {
    RationalCubicDifferential U({2.0}, {0.0, 1.0});
    // order at infinity is 1 - 0 - 6 = -5: rejected
    CHECK_THROWS_AS(find_poles(U), HigherOrderPole);
    const auto s = U.in_south_chart();
    CHECK(s.order_at_infinity() == -1);  // the simple pole at z = 0
}

TEST_CASE("double poles are rejected") {
    CHECK_THROWS_AS(find_poles(RationalCubicDifferential({1.0}, {0.0, 0.0, 1.0})), HigherOrderPole);
}

TEST_CASE("validate_divisor") {
    const auto c = validate_divisor(six_poles());
    CHECK(c.pole_count == 6);
    CHECK(c.zero_count == 0);

    RationalCubicDifferential seven({0.0, 1.0}, {-1.0, 0, 0, 0, 0, 0, 0, 1.0});
    const auto c7 = validate_divisor(seven);
    CHECK(c7.pole_count == 7);
    CHECK(c7.zero_count == 1);

    std::vector<ExtPoint> five;
    for (int k = 0; k < 5; ++k) five.push_back(ExtPoint::at(std::polar(1.0, 2.0 * std::numbers::pi * k / 5.0)));
    CHECK_THROWS_AS(validate_divisor(RationalCubicDifferential::from_divisor(five, {})), DegreeMismatch);
}

TEST_CASE("pole at infinity and chart change") {
    // 1/(z^5 - 1): five finite poles and one at infinity.
    RationalCubicDifferential U({1.0}, {-1.0, 0, 0, 0, 0, 1.0});
    const auto poles = find_poles(U);
    REQUIRE(poles.size() == 6);
    CHECK(poles.back().location.infinity);
    // In w = 1/z: U = -w/(1 - w^5) dw^3 / w^2... residue at w = 0 is -1.
    CHECK(std::abs(poles.back().residue + 1.0) < 1e-14);
    const auto south = find_poles(U.in_south_chart());
    REQUIRE(south.size() == 6);
    int at_origin = 0;
    for (const auto& p : south)
        if (!p.location.infinity && std::abs(p.location.z) < 1e-12) {
            ++at_origin;
            CHECK(std::abs(p.residue + 1.0) < 1e-13);
        }
    CHECK(at_origin == 1);
}

TEST_CASE("canonical chart of 1/z is the identity") {
    // 1/z dz^3 alone has a fifth-order pole at infinity; 1/(z(1 - z^5)) is a
    // valid section equal to 1/z + O(z^4) near the origin.
    RationalCubicDifferential U({1.0}, {0.0, 1.0, 0, 0, 0, 0, -1.0});
    const auto poles = find_poles(U);
    const Pole* origin = nullptr;
    for (const auto& p : poles)
        if (!p.location.infinity && std::abs(p.location.z) < 1e-12) origin = &p;
    REQUIRE(origin);
    const auto chart = canonical_chart(U, *origin, 4);
    CHECK(std::abs(chart.scale - 1.0) < 1e-14);
    for (std::size_t k = 2; k < chart.forward.size(); ++k) CHECK(std::abs(chart.forward[k]) < 1e-14);
}

TEST_CASE("canonical chart scale for residue 2") {
    RationalCubicDifferential U({2.0}, {0.0, 1.0, 0, 0, 0, 0, -1.0});
    const auto poles = find_poles(U);
    for (const auto& p : poles) {
        if (p.location.infinity || std::abs(p.location.z) > 1e-12) continue;
        const auto chart = canonical_chart(U, p, 12);
        CHECK(std::abs(chart.scale - std::sqrt(2.0)) < 1e-14);
        const auto alt = canonical_chart(U, p, 12, true);
        CHECK(std::abs(alt.scale + std::sqrt(2.0)) < 1e-14);
    }
}

TEST_CASE("canonical chart at z = 1 for 1/(z^6-1)") {
    const auto U = six_poles();
    for (const auto& p : find_poles(U)) {
        const auto chart = canonical_chart(U, p, 40);
        CHECK(std::abs(chart.scale * chart.scale - p.residue) < 1e-14);
        CHECK(chart.pullback_error < 1e-8);
        // inverse really inverts
        const cplx zeta(0.1, 0.05);
        CHECK(std::abs(chart.inverse(chart.forward(zeta)) - zeta) < 1e-12);
        if (std::abs(p.location.z - 1.0) < 1e-10) CHECK(std::abs(chart.scale * chart.scale - 1.0 / 6.0) < 1e-14);
    }
}

TEST_CASE("canonical chart at infinity") {
    RationalCubicDifferential U({1.0}, {-1.0, 0, 0, 0, 0, 1.0});
    const auto poles = find_poles(U);
    const auto chart = canonical_chart(U, poles.back(), 40);
    CHECK(chart.pullback_error < 1e-8);
}

TEST_CASE("too low truncation order") {
    const auto U = six_poles();
    CHECK_THROWS_AS(canonical_chart(U, find_poles(U)[0], 1), SeriesDivergence);
}
