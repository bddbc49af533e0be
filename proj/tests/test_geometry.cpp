#include "doctest.h"

#include <cmath>
#include <numbers>

#include "sfcy/errors.hpp"
#include "sfcy/geometry.hpp"

using namespace sfcy;

namespace {

RationalCubicDifferential six_poles() { return RationalCubicDifferential({1.0}, {-1.0, 0, 0, 0, 0, 0, 1.0}); }

// Pure model on a log-polar annulus: λ = |log|w|²| in the coordinate w.
MetricField model_metric(std::shared_ptr<const CompositeGrid> g) {
    MetricField m{g, std::vector<double>(g->size())};
    for (std::size_t n = 0; n < g->size(); ++n) m.lambda[n] = 2.0 * std::abs(g->log_radius(int(n)));
    return m;
}

// max |κ - e^{-2T}/(4|T|^3)| over the interior rows, relative.
double model_curvature_error(int rows) {
    auto g = CompositeGrid::polar_annulus(-1.0, -4.0, rows, 16);
    const auto k = gauss_curvature(model_metric(g));
    double err = 0.0;
    for (std::size_t n = 0; n < g->size(); ++n) {
        if (g->nodes()[n].role != NodeRole::Interior) continue;
        const double T = g->log_radius(int(n));
        const double exact = std::exp(-2.0 * T) / (4.0 * std::pow(std::abs(T), 3));
        err = std::max(err, std::abs(k[n] / exact - 1.0));
    }
    return err;
}

}  // namespace

TEST_CASE("model curvature at |z| = 1/e") {
    // rows chosen so that T = -1 is a grid row
    auto g = CompositeGrid::polar_annulus(-0.5, -3.0, 201, 16);
    const auto k = gauss_curvature(model_metric(g));
    const RationalCubicDifferential inv_z({1.0}, {0.0, 1.0});
    const auto q = norm_U_squared(inv_z, model_metric(g));
    const int row = 40;  // T = -0.5 - 40 * 2.5/200 = -1
    const int n = g->components()[0].index(row, 3);
    REQUIRE(g->log_radius(n) == doctest::Approx(-1.0));
    CHECK(k[n] == doctest::Approx(std::exp(2.0) / 4.0).epsilon(1e-4));
    CHECK(q[n] == doctest::Approx(std::exp(2.0) / 8.0).epsilon(1e-12));
    // model identity 4|U|^2 = 2κ
    CHECK(4.0 * q[n] == doctest::Approx(2.0 * k[n]).epsilon(1e-4));
}

TEST_CASE("model curvature converges at second order") {
    const double e1 = model_curvature_error(61), e2 = model_curvature_error(121), e3 = model_curvature_error(241);
    CHECK(std::log2(e1 / e2) > 1.9);
    CHECK(std::log2(e2 / e3) > 1.9);
}

TEST_CASE("flat and round factors") {
    auto g = CompositeGrid::cartesian(40, 1.0);
    MetricField flat{g, std::vector<double>(g->size(), 1.0)};
    for (double v : gauss_curvature(flat).values) CHECK(v == 0.0);

    double prev = 0.0;
    for (int n : {20, 40, 80}) {
        auto gr = CompositeGrid::cartesian(n, 1.0);
        MetricField round{gr, std::vector<double>(gr->size())};
        for (std::size_t i = 0; i < gr->size(); ++i) round.lambda[i] = round_factor(gr->nodes()[i].native);
        const auto k = gauss_curvature(round);
        double err = 0.0;
        for (std::size_t i = 0; i < gr->size(); ++i)
            if (gr->nodes()[i].role == NodeRole::Interior) err = std::max(err, std::abs(k[i] - 1.0));
        CHECK(err < 0.05);
        if (prev > 0.0) CHECK(std::log2(prev / err) > 1.8);
        prev = err;
    }
}

TEST_CASE("norm_U_squared homogeneity") {
    auto g = CompositeGrid::cartesian(8, 0.5, cplx(2.0, 0.0));
    MetricField m{g, std::vector<double>(g->size(), 1.5)};
    MetricField m2{g, std::vector<double>(g->size(), 3.0)};
    const RationalCubicDifferential U({1.0}, {0.0, 1.0});
    const auto a = norm_U_squared(U, m);
    const auto b = norm_U_squared(U.scaled(2.0), m);
    const auto c = norm_U_squared(U, m2);
    for (std::size_t i = 0; i < g->size(); ++i) {
        CHECK(b[i] == doctest::Approx(4.0 * a[i]).epsilon(1e-14));
        CHECK(c[i] == doctest::Approx(a[i] / 8.0).epsilon(1e-14));
    }
}

TEST_CASE("flat Laplacian examples") {
    auto g = CompositeGrid::cartesian(16, 1.0);
    MetricField flat{g, std::vector<double>(g->size(), 1.0)};
    ScalarField re(g), sq(g);
    for (std::size_t i = 0; i < g->size(); ++i) {
        re[i] = g->nodes()[i].native.real();
        sq[i] = std::norm(g->nodes()[i].native);
    }
    const auto l1 = laplacian(flat, re), l2 = laplacian(flat, sq);
    for (std::size_t i = 0; i < g->size(); ++i) {
        CHECK(std::abs(l1[i]) < 1e-10);
        CHECK(l2[i] == doctest::Approx(4.0));
    }
}

TEST_CASE("background metric on the six-pole sphere") {
    GridParams p;
    p.cartesian_n = 128;
    p.ntheta = 48;
    const auto atlas = ChartAtlas::build(six_poles(), p);

    SUBCASE("round factor away from the poles") {
        CHECK(background_factor(atlas, ChartKind::North, 0.0) == 4.0);
        CHECK(background_factor(atlas, ChartKind::South, 0.0) == 4.0);
    }

    SUBCASE("model value at canonical radius e^-5") {
        for (const auto& pc : atlas.poles()) {
            const cplx w = std::polar(std::exp(-5.0), 0.7);
            const cplx zeta = pc.chart.inverse(w);
            const double lam = background_factor(atlas, ChartKind::North, pc.pole.location.z + zeta) /
                               std::norm(pc.chart.forward.derivative_at(zeta));
            CHECK(lam == doctest::Approx(10.0).epsilon(1e-12));
        }
    }

    SUBCASE("chart change round trip") {
        for (cplx z : {cplx(0.9, 0.3), cplx(1.2, -0.4), cplx(0.3, 0.95)}) {
            const double ln = background_factor(atlas, ChartKind::North, z);
            const double ls = background_factor(atlas, ChartKind::South, 1.0 / z);
            CHECK(chart_transfer(ln, z) == doctest::Approx(ls).epsilon(1e-12));
            CHECK(std::abs(chart_transfer(chart_transfer(ln, z), 1.0 / z) - ln) < 1e-10 * ln);
        }
    }

    SUBCASE("model identity inside the blend disks") {
        auto g = CompositeGrid::build(atlas, -40.0);
        const auto m = build_background_metric(g);
        const auto k = gauss_curvature(m);
        const auto q = norm_U_squared(atlas.cubic(), m);
        double worst = 0.0;
        for (std::size_t n = 0; n < g->size(); ++n) {
            const Component& c = g->component_of(int(n));
            if (c.kind != ChartKind::Polar || g->nodes()[n].role != NodeRole::Interior) continue;
            const double T = g->log_radius(int(n));
            if (std::exp(T) > 0.5 * atlas.poles()[c.pole].blend_radius || T < -30.0) continue;
            worst = std::max(worst, std::abs(4.0 * q[n] - 2.0 * k[n]) / (2.0 * k[n]));
        }
        CHECK(worst < 5e-3);  // second-order FD error at this resolution
        for (std::size_t n = 0; n < g->size(); ++n)
            if (g->nodes()[n].role != NodeRole::Unused) {
                CHECK(m.lambda[n] > 0.0);
                CHECK(std::isfinite(k[n]));
            }
    }
}
