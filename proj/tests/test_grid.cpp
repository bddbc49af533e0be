#include "doctest.h"

#include <cmath>
#include <numbers>

#include "sfcy/errors.hpp"
#include "sfcy/grid.hpp"

using namespace sfcy;

namespace {

double dot_row(const SparseRow& row, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t q = 0; q < row.idx.size(); ++q) s += row.w[q] * v[row.idx[q]];
    return s;
}

RationalCubicDifferential six_poles() { return RationalCubicDifferential({1.0}, {-1.0, 0, 0, 0, 0, 0, 1.0}); }

// Round area density 4/(1+|z|^2)^2 of a node expressed in its native chart.
double round_density(const CompositeGrid& g, int n) {
    const Node& nd = g.nodes()[n];
    const Component& c = g.component_of(n);
    if (c.kind != ChartKind::Polar) return 4.0 / std::pow(1.0 + std::norm(nd.native), 2);
    const PoleChart& pc = g.atlas()->poles()[c.pole];
    const cplx zeta = pc.chart.inverse(nd.native);
    const double dz = std::norm(pc.chart.inverse.derivative_at(nd.native));
    const double r2 = nd.point.infinity ? 0.0 : std::norm(nd.point.z);
    if (pc.pole.location.infinity) return 4.0 / std::pow(1.0 + std::norm(zeta), 2) * dz;
    return 4.0 / std::pow(1.0 + r2, 2) * dz;
}

}  // namespace

TEST_CASE("fd weights") {
    const double x[3] = {-1.0, 0.0, 1.0};
    const auto w = fd_weights(0.0, x, 2);
    CHECK(w[0] == doctest::Approx(1.0));
    CHECK(w[1] == doctest::Approx(-2.0));
    CHECK(w[2] == doctest::Approx(1.0));
    const double y[4] = {0.0, 0.3, 1.0, 1.7};
    const auto d = fd_weights(0.5, y, 0);
    double s = 0.0, cub = 0.0;
    for (int i = 0; i < 4; ++i) s += d[i], cub += d[i] * y[i] * y[i] * y[i];
    CHECK(s == doctest::Approx(1.0));
    CHECK(cub == doctest::Approx(0.125));
}

TEST_CASE("smooth step") {
    CHECK(smooth_step_down(-1.0) == 1.0);
    CHECK(smooth_step_down(2.0) == 0.0);
    CHECK(smooth_step_down(0.5) == doctest::Approx(0.5));
    CHECK(smooth_step_down(0.3) + smooth_step_down(0.7) == doctest::Approx(1.0));
}

TEST_CASE("Cartesian Laplacian of quadratics and linear functions") {
    auto g = CompositeGrid::cartesian(20, 1.0, cplx(0.3, -0.2));
    std::vector<double> quad(g->size()), lin(g->size());
    for (std::size_t n = 0; n < g->size(); ++n) {
        const cplx z = g->nodes()[n].native;
        quad[n] = std::norm(z);
        lin[n] = 3.0 * z.real() - 2.0 * z.imag() + 1.0;
    }
    for (std::size_t n = 0; n < g->size(); ++n) {
        CHECK(dot_row(g->flat_laplacian(int(n)), quad) == doctest::Approx(4.0).epsilon(1e-9));
        CHECK(std::abs(dot_row(g->flat_laplacian(int(n)), lin)) < 1e-9);
    }
}

TEST_CASE("polar annulus Laplacian in (T, theta)") {
    auto g = CompositeGrid::polar_annulus(-1.0, -4.0, 31, 32);
    std::vector<double> f(g->size());
    for (std::size_t n = 0; n < g->size(); ++n) {
        const double T = g->log_radius(int(n));
        f[n] = T * T + std::cos(2.0 * std::arg(g->nodes()[n].native));
    }
    for (std::size_t n = 0; n < g->size(); ++n) {
        const double theta = std::arg(g->nodes()[n].native);
        const double exact = 2.0 - 4.0 * std::cos(2.0 * theta);
        CHECK(dot_row(g->flat_laplacian(int(n)), f) == doctest::Approx(exact).epsilon(2e-2));
    }
    CHECK(g->jacobian(0) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("six-pole composite grid") {
    GridParams p;
    p.cartesian_n = 192;
    p.ntheta = 64;
    const auto atlas = ChartAtlas::build(six_poles(), p);
    REQUIRE(atlas.poles().size() == 6);
    auto g = CompositeGrid::build(atlas, -40.0);
    REQUIRE(g->components().size() == 8);

    int receivers = 0;
    for (std::size_t n = 0; n < g->size(); ++n)
        if (g->nodes()[n].role == NodeRole::Receiver) {
            ++receivers;
            const auto& d = g->donors(int(n));
            REQUIRE(d.idx.size() == 16);
            double s = 0.0;
            for (double w : d.w) s += w;
            CHECK(s == doctest::Approx(1.0));
        }
    CHECK(receivers > 0);
    for (int j = 0; j < 6; ++j) CHECK(g->inner_log_radius(j) <= -40.0);

    SUBCASE("partition-of-unity quadrature integrates the round sphere") {
        double area = 0.0;
        for (std::size_t n = 0; n < g->size(); ++n)
            if (g->quadrature_weight(int(n)) > 0.0) area += g->quadrature_weight(int(n)) * round_density(*g, int(n));
        CHECK(area == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-4));
    }

    SUBCASE("interpolation of a smooth sphere function") {
        // X coordinate of the unit sphere under stereographic projection.
        auto X = [](const ExtPoint& P) { return P.infinity ? 0.0 : 2.0 * P.z.real() / (1.0 + std::norm(P.z)); };
        std::vector<double> v(g->size());
        for (std::size_t n = 0; n < g->size(); ++n) v[n] = X(g->nodes()[n].point);
        double err = 0.0;
        for (cplx z : {cplx(0.2, 0.1), cplx(1.05, 0.02), cplx(-3.0, 1.0), cplx(0.97, 0.1), cplx(0.5, 0.866)})
            err = std::max(err, std::abs(g->interpolate(v, ExtPoint::at(z)) - X(ExtPoint::at(z))));
        CHECK(err < 1e-5);
    }
}

TEST_CASE("blend radius too large") {
    GridParams p;
    p.cartesian_n = 64;
    const auto atlas = ChartAtlas::build(six_poles(), p);
    CHECK_THROWS_AS(atlas.with_blend_fraction(3.0), BlendFailure);
}
