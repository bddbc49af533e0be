#include "doctest.h"

#include <cmath>
#include <numbers>

#include "sfcy/errors.hpp"
#include "sfcy/greens.hpp"

using namespace sfcy;

namespace {
constexpr double kPi = std::numbers::pi;
RationalCubicDifferential six_poles() { return RationalCubicDifferential({1.0}, {-1.0, 0, 0, 0, 0, 0, 1.0}); }

PoissonSolution barrier_potential(int n, int ntheta) {
    GridParams p;
    p.cartesian_n = n;
    p.ntheta = ntheta;
    auto g = CompositeGrid::build(ChartAtlas::build(six_poles(), p), -12.0);
    return solve_poisson(barrier_poisson_problem(g));
}
}  // namespace

TEST_CASE("kappa_tilde closed form") {
    CHECK(kappa_tilde(std::exp(-1.0)) == doctest::Approx(std::exp(2.0) / 4.0));
    CHECK(kappa_tilde(std::exp(-2.0)) == doctest::Approx(std::exp(4.0) / 16.0));
}

TEST_CASE("finite-difference curvature of log|log|z|^2| against kappa_tilde") {
    // −½Δ log|log|z|²| on the flat metric; the stencil value is twice the
    // displayed closed form.
    auto g = CompositeGrid::polar_annulus(-0.5, -3.0, 401, 8);
    MetricField flat{g, std::vector<double>(g->size(), 1.0)};
    ScalarField phi(g);
    for (std::size_t n = 0; n < g->size(); ++n) phi[n] = std::log(2.0 * std::abs(g->log_radius(int(n))));
    const auto lap = laplacian(flat, phi);
    const int n = g->components()[0].index(80, 0);  // T = -1
    REQUIRE(g->log_radius(n) == doctest::Approx(-1.0));
    CHECK(-0.5 * lap[n] == doctest::Approx(2.0 * kappa_tilde(std::exp(-1.0))).epsilon(1e-4));
}

TEST_CASE("inner integral") {
    CHECK(inner_integral(2.0, 1.0).numeric == doctest::Approx(2.0 * kPi).epsilon(1e-12));
    CHECK(std::abs(inner_integral(1.0, 2.0).numeric) < 1e-6);
    CHECK_THROWS_AS(inner_integral(1.0, 1.0), OnDiagonal);
    int checked = 0;
    for (double r : {0.01, 0.1, 0.5, 1.0, 3.0})
        for (double rho : {0.02, 0.2, 0.7, 2.0}) {
            const auto q = inner_integral(r, rho);
            CHECK(q.error() < 1e-6);
            ++checked;
        }
    CHECK(checked == 20);
}

TEST_CASE("g prime") {
    const auto a = g_prime(std::exp(-2.0));
    CHECK(a.closed_form == doctest::Approx(-std::exp(2.0) / 2.0));
    CHECK(a.error() < 1e-6);
    const auto b = g_prime(std::exp(-1.0));
    CHECK(b.closed_form == doctest::Approx(-std::exp(1.0)));
    CHECK(b.error() < 1e-6);
    // derivative of the closed-form antiderivative
    const double r = 0.05, h = 1e-5;
    CHECK((g_potential(r + h) - g_potential(r - h)) / (2 * h) == doctest::Approx(g_prime(r).closed_form).epsilon(1e-7));
}

TEST_CASE("disk potential derivative is half of the displayed g prime") {
    const double delta = 0.2;
    for (double r : {0.01, 0.05}) {
        const double h = 1e-3 * r;
        const double fd = (disk_potential(r + h, delta) - disk_potential(r - h, delta)) / (2 * h);
        CHECK(fd == doctest::Approx(0.5 * g_prime(r).closed_form).epsilon(1e-4));
    }
}

TEST_CASE("Poisson: zero source gives zero") {
    GridParams p;
    p.cartesian_n = 64;
    p.ntheta = 24;
    auto g = CompositeGrid::build(ChartAtlas::build(six_poles(), p), -8.0);
    PoissonProblem pb;
    pb.k = build_background_metric(g, PoleModel::Flat);
    pb.source.assign(g->size(), 0.0);
    pb.inner_flux.assign(6, 0.0);
    pb.disk_integral.assign(6, 0.0);
    const auto sol = solve_poisson(pb);
    for (double v : sol.f.values) CHECK(std::abs(v) < 1e-12);

    pb.source.assign(g->size(), 1.0);
    CHECK_THROWS_AS(solve_poisson(pb), UnbalancedSource);
}

TEST_CASE("Poisson: barrier potential follows log|log r^2|") {
    const auto a = barrier_potential(96, 32);
    const auto b = barrier_potential(160, 48);
    CHECK(a.imbalance < 1e-10);
    REQUIRE(a.asymptote.size() == b.asymptote.size());
    REQUIRE(!a.asymptote.empty());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.asymptote.size(); ++i) {
        CHECK(std::isfinite(a.asymptote[i].sup_deviation));
        worst = std::max(worst, std::abs(a.asymptote[i].sup_deviation - b.asymptote[i].sup_deviation));
    }
    MESSAGE("max resolution change of the asymptote constant: " << worst);
    CHECK(worst < 0.05);
}
