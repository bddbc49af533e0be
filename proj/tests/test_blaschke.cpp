#include "doctest.h"

#include <cmath>
#include <numbers>

#include "sfcy/blaschke.hpp"
#include "sfcy/errors.hpp"

using namespace sfcy;

namespace {

constexpr double pi = std::numbers::pi;

Series poly(std::initializer_list<cplx> c) { return Series(std::vector<cplx>(c)); }

// Quadratic graph φ = ½αᵀHα sampled in a conformal parameter of its Hessian
// metric; H = diag(h1, h2).
ImmersionPatch diagonal_quadratic(double h1, double h2, int n = 9) {
    ImmersionPatch p = ImmersionPatch::sized(n, n, -1.0, -1.0, 2.0 / (n - 1), 2.0 / (n - 1));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const int q = p.index(i, j);
            const double x = p.x0 + i * p.dx, y = p.y0 + j * p.dy;
            p.a1[q] = x / std::sqrt(h1);
            p.a2[q] = y / std::sqrt(h2);
            p.phi[q] = 0.5 * (h1 * p.a1[q] * p.a1[q] + h2 * p.a2[q] * p.a2[q]);
            p.b1[q] = h1 * p.a1[q];
            p.b2[q] = h2 * p.a2[q];
        }
    return p;
}

// The dual graph (β, χ) as a patch in the same parameter.
ImmersionPatch dual_patch(const ImmersionPatch& p) {
    const LegendreData L = legendre(p);
    ImmersionPatch d = p;
    d.a1 = L.beta1, d.a2 = L.beta2, d.phi = L.chi, d.b1 = p.a1, d.b2 = p.a2;
    return d;
}

}  // namespace

TEST_CASE("metric and cubic of polynomial pairs") {
    const cplx z(0.3, -0.2);
    CHECK(metric_from_fg(HoloPair::polynomial(poly({0.0}), poly({0.0, 2.0})), z) == doctest::Approx(1.0));
    CHECK(metric_from_fg(HoloPair::polynomial(poly({0.0, 1.0}), poly({0.0, 2.0})), z) == doctest::Approx(0.75));
    CHECK_THROWS_AS(metric_from_fg(HoloPair::polynomial(poly({0.0, 2.0}), poly({0.0, 1.0})), z), MetricDegenerate);
    const cplx U = cubic_from_fg(HoloPair::polynomial(poly({0.0, 0.0, 1.0}), poly({0.0, 2.0})), z);
    CHECK(U.real() == doctest::Approx(1.0));
    CHECK(U.imag() == doctest::Approx(0.0));
    CHECK(std::abs(cubic_from_fg(HoloPair::polynomial(poly({0.0}), poly({0.0, 1.0, 0.5, 0.25})), z)) == 0.0);
}

TEST_CASE("model pair with constant j and k = 0") {
    const ModelData data = ModelData::standard();
    CHECK(data.constraint_residual() < 1e-12);
    const HoloPair p = model_fg(data);
    for (double r : {1e-3, 1e-5, 1e-9})
        for (double th : {0.0, 1.0, 2.5, -2.0}) {
            const cplx z = std::polar(r, th);
            const double closed = std::abs(std::log(r * r)) - 4.0 * pi;
            CHECK(std::abs(metric_from_fg(p, z) - closed) < 1e-10);
            CHECK(std::abs(cubic_from_fg(p, z) * z - 1.0) < 1e-12);
        }
    // valid only below |z| = e^{-2π}
    CHECK_THROWS_AS(metric_from_fg(p, cplx(0.01, 0.0)), MetricDegenerate);
    // F, G → 0 along radial paths
    const double r = 1e-12;
    CHECK(std::abs(p.G.value(r, std::log(r))) < 1e-9);
    CHECK(std::abs(p.F.value(r, std::log(r))) < 1e-9);
}

TEST_CASE("sampler solves the constraint for non-constant j") {
    const cplx j0(0.0, 4.0 * std::sqrt(pi));
    Series j(12);
    j[0] = j0, j[1] = 0.3 * j0, j[2] = cplx(0.1, -0.2) * j0, j[3] = 0.05;
    const ModelData data = ModelData::from_j(j, 0.7);
    CHECK(data.constraint_residual() < 1e-12);
    CHECK(data.k()[0] == cplx(0.7));
    const HoloPair p = model_fg(data);
    for (double r : {1e-2, 1e-3}) {
        const cplx z = std::polar(r, 0.4);
        // 1/z + O(z^{10})
        CHECK(std::abs(cubic_from_fg(p, z) * z - 1.0) < 1e-12);
    }
    CHECK_THROWS_AS(ModelData(Series::constant(1.0, 12), Series(12)), ConstraintViolated);
    CHECK_THROWS_AS(ModelData::from_j(Series::constant(1.0, 12)), ConstraintViolated);
}

TEST_CASE("growth bounds of the model metric") {
    const HoloPair p = model_fg(ModelData::standard(12, -2.0));
    double lo = INFINITY, hi = 0.0;
    for (double T = -10.0; T > -60.0; T -= 0.5)
        for (double th = 0.0; th < 2.0 * pi; th += 0.3) {
            const cplx z = std::polar(std::exp(T), th);
            const double ratio = metric_from_fg(p, z) / std::abs(std::log(std::norm(z)));
            lo = std::min(lo, ratio), hi = std::max(hi, ratio);
        }
    CHECK(lo > 0.0);
    CHECK(hi < 2.0);
    CHECK(lo > 0.5);
}

TEST_CASE("continuation once around the pole shears the affine coordinates") {
    Series j(12);
    const cplx j0(0.0, 4.0 * std::sqrt(pi));
    j[0] = j0, j[1] = 0.2 * j0;
    const HoloPair p = model_fg(ModelData::from_j(j));
    for (double th : {0.3, 2.0, -1.2}) {
        const cplx z = std::polar(1e-3, th);
        const AffinePoint a = affine_point(p, z, log_on_sheet(z, 0));
        const AffinePoint b = affine_point(p, z, log_on_sheet(z, 1));
        CHECK(b.a1 == doctest::Approx(a.a1 + a.a2).epsilon(1e-12));
        CHECK(b.a2 == doctest::Approx(a.a2).epsilon(1e-12));
    }
}

TEST_CASE("mirror") {
    Series j(12);
    const cplx j0(0.0, 4.0 * std::sqrt(pi));
    j[0] = j0, j[2] = -0.1 * j0;
    const HoloPair p = model_fg(ModelData::from_j(j));
    const HoloPair m = mirror(p);
    for (double th : {0.1, 1.7, 3.0}) {
        const cplx z = std::polar(1e-4, th);
        CHECK(metric_from_fg(m, z) == metric_from_fg(p, z));
        CHECK(cubic_from_fg(m, z) == -cubic_from_fg(p, z));
    }
    const HoloPair mm = mirror(m);
    CHECK(mm.F.plain.coeffs() == p.F.plain.coeffs());
    CHECK(mm.F.log_part.coeffs() == p.F.log_part.coeffs());
    CHECK(mm.G.plain.coeffs() == p.G.plain.coeffs());
}

TEST_CASE("holomorphic pair of a quadratic graph") {
    const auto round = diagonal_quadratic(1.0, 1.0);
    const FGSamples fg = fg_from_immersion(round);
    for (std::size_t q = 0; q < round.size(); ++q) {
        const cplx z(round.a1[q], round.a2[q]);
        CHECK(std::abs(fg.G[q] - 2.0 * z) < 1e-14);
        CHECK(std::abs(fg.F[q]) < 1e-14);
    }
    // Hessian diag(2, 1/2): G = (3/√2) z, F = −z/√2 in the conformal parameter
    const auto sheared = diagonal_quadratic(2.0, 0.5);
    const FGSamples fg2 = fg_from_immersion(sheared);
    for (int j = 0; j < sheared.ny; ++j)
        for (int i = 0; i < sheared.nx; ++i) {
            const int q = sheared.index(i, j);
            const cplx z(sheared.x0 + i * sheared.dx, sheared.y0 + j * sheared.dy);
            CHECK(std::abs(fg2.G[q] - 3.0 / std::sqrt(2.0) * z) < 1e-13);
            CHECK(std::abs(fg2.F[q] + z / std::sqrt(2.0)) < 1e-13);
        }
    CHECK(legendre_fg_mismatch(sheared, fg2) < 1e-14);
    // saddle: not holomorphic
    const auto saddle = sample_graph(
        9, 9, -1, -1, 0.25, 0.25, [](double x, double y) { return 0.5 * (x * x - y * y); },
        [](double x, double y) { return std::array<double, 2>{x, -y}; });
    CHECK_THROWS_AS(fg_from_immersion(saddle), NotHolomorphic);
    CHECK_THROWS_AS(legendre(saddle), ConvexityFailure);
}

TEST_CASE("Legendre transform") {
    const auto round = diagonal_quadratic(1.0, 1.0);
    const LegendreData L = legendre(round);
    for (std::size_t q = 0; q < round.size(); ++q) {
        CHECK(L.beta1[q] == round.a1[q]);
        CHECK(L.beta2[q] == round.a2[q]);
        CHECK(L.chi[q] == doctest::Approx(0.5 * (L.beta1[q] * L.beta1[q] + L.beta2[q] * L.beta2[q])));
    }
    // Hessian H = diag(4, 1/4): χ has Hessian H⁻¹ and determinant one
    const auto p = diagonal_quadratic(4.0, 0.25, 11);
    const LegendreData D = legendre(p);
    for (std::size_t q = 0; q < p.size(); ++q)
        CHECK(D.chi[q] == doctest::Approx(0.5 * (D.beta1[q] * D.beta1[q] / 4.0 + 4.0 * D.beta2[q] * D.beta2[q])));
    CHECK(hessian_determinant_check(dual_patch(p)).max_residual < 1e-12);
}

TEST_CASE("gauge action") {
    const auto p = diagonal_quadratic(2.0, 0.5);
    const ImmersionPatch same = gauge_action(p, GaugeElement{});
    CHECK(same.a1 == p.a1);
    CHECK(same.phi == p.phi);
    CHECK(same.b2 == p.b2);

    GaugeElement shear;
    shear.A = {{{1.0, 1.0}, {0.0, 1.0}}};
    const ImmersionPatch s = gauge_action(p, shear);
    for (std::size_t q = 0; q < p.size(); ++q) {
        // A⁻¹ = [[1, −1], [0, 1]]
        CHECK(s.b1[q] == doctest::Approx(p.b1[q] - p.b2[q]));
        CHECK(s.b2[q] == doctest::Approx(p.b2[q]));
    }
    CHECK(gauge_law_residual(p, shear) < 1e-13);

    // tilt on the paraboloid: β̃ = A⁻¹β + A⁻¹c
    const auto round = diagonal_quadratic(1.0, 1.0);
    GaugeElement tilt;
    tilt.A = {{{2.0, 1.0}, {1.0, 1.0}}};
    tilt.b = {0.3, -0.2};
    tilt.c = {0.5, 1.5};
    tilt.d = 0.7;
    const ImmersionPatch t = gauge_action(round, tilt);
    for (std::size_t q = 0; q < round.size(); ++q) {
        const double b1 = round.a1[q] + 0.5, b2 = round.a2[q] + 1.5;
        CHECK(t.b1[q] == doctest::Approx(b1 - b2));
        CHECK(t.b2[q] == doctest::Approx(-b1 + 2.0 * b2));
    }
    CHECK(gauge_law_residual(round, tilt) < 1e-13);
    CHECK(hessian_determinant_check(t).max_residual < 1e-12);
}

TEST_CASE("Monge-Ampere on the model graph") {
    const HoloPair p = model_fg(ModelData::standard());
    auto residual = [&](int n) {
        const ImmersionPatch patch = patch_from_fg(p, n, n, 0.0, 8.0, 1.0 / (n - 1), 1.0 / (n - 1));
        return hessian_determinant_check(patch).max_residual;
    };
    const double a = residual(21), b = residual(41);
    CHECK(b < 1e-5);
    CHECK(a / b > 10.0);  // fourth-order differences
    // the dual graph is again a parabolic affine sphere
    const ImmersionPatch patch = patch_from_fg(p, 41, 41, 0.0, 8.0, 0.025, 0.025);
    CHECK(hessian_determinant_check(dual_patch(patch)).max_residual < 1e-5);
    // its holomorphic pair is the mirror
    const FGSamples fg = fg_from_immersion(patch, 1e-2);
    CHECK(legendre_fg_mismatch(patch, fg) < 1e-14);
}
