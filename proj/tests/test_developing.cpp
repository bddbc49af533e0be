#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "sfcy/developing.hpp"
#include "sfcy/errors.hpp"

using namespace sfcy;

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

Eigen::Vector2d xy(const Eigen::Vector3d& v) { return {v[0], v[1]}; }

// Closed-form affine coordinates of a pair and their derivatives in the log
// chart s = x + iy (z = e^{is}, log z = is).
struct ClosedForm {
    Eigen::Vector2d alpha;
    Eigen::Matrix2d frame;  // columns ∂x α, ∂y α
};

ClosedForm closed_form(const HoloPair& p, cplx s) {
    const cplx z = std::exp(I * s), L = I * s;
    const AffinePoint a = affine_point(p, z, L);
    const cplx Gs = p.G.d1(z, L) * I * z, Fs = p.F.d1(z, L) * I * z;
    ClosedForm c;
    c.alpha = {a.a1, a.a2};
    // ∂x = ∂s and ∂y = i∂s on holomorphic functions
    c.frame << 0.5 * std::real(Gs + Fs), 0.5 * std::real(I * (Gs + Fs)), 0.5 * std::imag(Gs - Fs),
        0.5 * std::imag(I * (Gs - Fs));
    return c;
}

// Normalized coordinates at the base → closed-form coordinates.
AffineMap2 to_closed_form(const HoloPair& p, cplx base) {
    const ClosedForm c = closed_form(p, base);
    return {c.frame, c.alpha};
}

HoloPair standard_model(double k0) { return model_fg(ModelData::standard(16, k0)); }

}  // namespace

TEST_CASE("initial frame") {
    const double psi = 0.7;
    const FrameState f = init_frame(psi);
    CHECK(f.det_drift(psi) < 1e-15);
    CHECK(f.f.norm() == 0.0);
    // seed (a, −ia, 0)/√2 with |a|² = e^ψ/2 already satisfies the condition
    const cplx a = std::polar(std::sqrt(std::exp(psi) / 2.0), 0.4);
    const Vector3c seed = Vector3c(a, -I * a, 0.0) / std::sqrt(2.0);
    const FrameState g = init_frame(psi, seed);
    CHECK((g.fz - seed).norm() < 1e-15);
    CHECK(std::abs(seed[0] * std::conj(seed[1]) * 2.0 * I - std::conj(seed[0]) * seed[1] * 2.0 * I) > 0.0);
    // phase rotations of a valid seed stay valid
    for (double th : {0.3, 1.9, -2.5}) {
        const FrameState h = init_frame(psi, Vector3c(seed * std::polar(1.0, th)));
        CHECK(h.det_drift(psi) < 1e-14);
    }
    CHECK_THROWS_AS(init_frame(psi, Vector3c(1.0, 2.0, 0.5)), DegenerateSeed);
    CHECK_THROWS_AS(init_frame(psi, Vector3c(1.0, I, 0.0)), DegenerateSeed);  // orientation-reversing
    CHECK_THROWS_AS(init_frame(NAN), DegenerateSeed);
}

TEST_CASE("flat transport develops the paraboloid") {
    const FlatData flat;
    const cplx end(0.8, -0.5);
    const TransportResult r = transport(init_frame(0.0), segment(0.0, end), flat);
    CHECK(r.end.f[0] == doctest::Approx(end.real()).epsilon(1e-13));
    CHECK(r.end.f[1] == doctest::Approx(end.imag()).epsilon(1e-13));
    CHECK(r.end.f[2] == doctest::Approx(0.5 * std::norm(end)).epsilon(1e-13));
    CHECK(std::abs(r.end.fz[0] - 0.5) < 1e-14);
    CHECK(r.max_det_drift < 1e-14);

    const HolonomyResult h = loop_holonomy(flat, circle(0.3, 0.7));
    CHECK((h.map.linear - Eigen::Matrix2d::Identity()).norm() < 1e-8);
    CHECK(h.map.translation.norm() < 1e-8);
    CHECK((h.loop.end.fz - h.base.fz).norm() < 1e-8);
    CHECK(flat_noise_floor() < 1e-12);
    CHECK(classify(h.map, calibrated_thresholds(flat_noise_floor())).tag == HolonomyTag::Identity);
}

TEST_CASE("transport matrix of the model") {
    const ModelLogChart m;
    const double x = 0.7;
    for (double y : {3.0, 10.0}) {
        const Eigen::Matrix3d A = transport_matrix(m, cplx(x, y), 1.0);
        const double c = std::cos(2 * x) / (2 * y), s = std::sin(2 * x) / (2 * y);
        CHECK(A(2, 0) == 0.0);
        CHECK(A(2, 1) == doctest::Approx(1.0 / (2 * y) - 1.0 + c).epsilon(1e-13));
        CHECK(A(2, 2) == doctest::Approx(-s).epsilon(1e-13));
        CHECK(A(1, 1) == doctest::Approx(s).epsilon(1e-13));
        CHECK(A(1, 2) == doctest::Approx(1.0 - 1.0 / (2 * y) + c).epsilon(1e-13));
        const Eigen::Matrix3d B = transport_matrix(m, cplx(x, y), I);
        CHECK(B(1, 1) == doctest::Approx(1.0 / (2 * y) - 1.0 + c).epsilon(1e-13));
        CHECK(B(1, 2) == doctest::Approx(-s).epsilon(1e-13));
        CHECK(B(2, 0) == doctest::Approx(std::exp(m.psi(cplx(x, y)))).epsilon(1e-13));
    }
    // the tangent block tends to the rotation generator
    Eigen::Matrix2d rot;
    rot << 0, 1, -1, 0;
    double prev = INFINITY;
    for (double y : {5.0, 50.0, 150.0}) {
        const Eigen::Matrix2d blk = transport_matrix(m, cplx(x, y), 1.0).bottomRightCorner<2, 2>();
        const double d = (blk - rot).norm();
        CHECK(d < 1.5 / y);
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("model holonomy is parabolic with winding +1") {
    const ModelLogChart m;
    double prev = INFINITY;
    for (double y : {6.0, 8.0, 10.0}) {
        const LoopReport r = analyze_loop(m, y, 0.0, flat_noise_floor());
        const AffineMap2& h = r.holonomy.map;
        CHECK(h.linear.determinant() == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(r.holonomy.det_drift < 1e-10);
        CHECK(r.cls.tag == HolonomyTag::ParabolicWithFixedPoint);
        CHECK(r.cls.eig_deviation < 1e-3);
        CHECK(r.cls.eig_deviation < prev);
        prev = r.cls.eig_deviation;
        CHECK(r.cls.nilpotent_norm == doctest::Approx(2 * pi / y).epsilon(1e-6));
        CHECK(r.fixed_point_residual < 1e-8);
        CHECK((*r.cls.fixed_point - r.dev_inf.point).norm() < 1e-6);
        CHECK(r.winding.winding == 1);
        CHECK(std::abs(r.winding.raw - 1.0) < 1e-6);
    }
    // starting one turn later gives the same winding
    const HolonomyResult h = holonomy(m, 7.0, 2 * pi);
    const DevInfinity d = dev_infinity(m, 2 * pi, 7.0);
    CHECK(winding_number(h, d.point).winding == 1);
    CHECK(homotopy_discrepancy(m, 7.0, 0.0) < 1e-8);
}

TEST_CASE("base point change conjugates the holonomy") {
    const ModelLogChart m;
    const double y = 7.0, x1 = 1.3;
    const HolonomyResult h0 = holonomy(m, y, 0.0), h1 = holonomy(m, y, x1);
    const TransportResult moved = transport(h0.base, segment(cplx(0.0, y), cplx(x1, y)), m);
    Eigen::Matrix2d E0, E1;
    E0 << xy(h0.base.fx()), xy(h0.base.fy());
    E1 << xy(moved.end.fx()), xy(moved.end.fy());
    AffineMap2 C;  // base-0 normalized coordinates → base-1 normalized coordinates
    C.linear = E1.inverse() * E0;
    C.translation = -E1.inverse() * xy(moved.end.f - h0.base.f);
    const AffineMap2 pred = h0.map.conjugated_by(C);
    CHECK((pred.linear - h1.map.linear).norm() < 1e-8);
    CHECK((pred.translation - h1.map.translation).norm() < 1e-8);
    CHECK(classify(h1.map).tag == classify(h0.map).tag);
}

TEST_CASE("classification of the four unipotent classes") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    Eigen::Matrix2d J;
    J << 1, 1, 0, 1;
    const struct {
        Eigen::Matrix2d P;
        Eigen::Vector2d t;
        HolonomyTag tag;
    } reps[] = {{Eigen::Matrix2d::Identity(), {0, 0}, HolonomyTag::Identity},
                {Eigen::Matrix2d::Identity(), {1, 0}, HolonomyTag::PureTranslation},
                {J, {0, 0}, HolonomyTag::ParabolicWithFixedPoint},
                {J, {0, 1}, HolonomyTag::ParabolicNoFixedPoint}};
    for (const auto& r : reps) {
        CHECK(classify({r.P, r.t}).tag == r.tag);
        for (int trial = 0; trial < 20; ++trial) {
            AffineMap2 g;
            do g.linear << U(rng), U(rng), U(rng), U(rng);
            while (std::abs(g.linear.determinant()) < 0.3);
            g.translation << U(rng), U(rng);
            const AffineMap2 m = AffineMap2{r.P, r.t}.conjugated_by(g);
            const HolonomyClass c = classify(m);
            CHECK(c.tag == r.tag);
            if (c.tag == HolonomyTag::ParabolicWithFixedPoint)
                CHECK((m(*c.fixed_point) - *c.fixed_point).norm() < 1e-10);
        }
    }
    Eigen::Matrix2d hyp;
    hyp << 2.0, 0.0, 0.0, 0.5;
    CHECK_THROWS_AS(classify({hyp, {0, 0}}), NotUnipotent);
    CHECK(to_string(HolonomyTag::ParabolicNoFixedPoint) == "ParabolicNoFixedPoint");
}

TEST_CASE("winding numbers of planar curves") {
    std::vector<Eigen::Vector2d> ccw, cw;
    for (int k = 0; k < 64; ++k) {
        const double a = 2 * pi * k / 64;
        ccw.push_back({2 + std::cos(a), std::sin(a)});
        cw.push_back({2 + std::cos(a), -std::sin(a)});
    }
    CHECK(winding_of_polyline(ccw, {2, 0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(winding_of_polyline(cw, {2, 0}) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(winding_of_polyline(ccw, {0, 0})) < 1e-12);
    // leading-order developed loop near a pole, either sign of the constant
    for (double c : {4 * std::sqrt(pi), -4 * std::sqrt(pi)}) {
        const double r = 1e-3, b2 = 0.7;
        std::vector<Eigen::Vector2d> curve;
        for (int k = 0; k < 200; ++k) {
            const double th = 2 * pi * k / 200;
            curve.push_back({c * r / (4 * pi) * (std::log(r) - b2) * std::sin(th), c * r / 2 * std::cos(th)});
        }
        CHECK(std::lround(winding_of_polyline(curve)) == 1);
    }
}

TEST_CASE("decay of the developing map") {
    const DecayFit m = decay_rate(ModelLogChart(), 0.0, 5.0, 10.0);
    CHECK(m.slope >= -1.1);
    CHECK(m.slope <= -0.9);
    // |dev_y| ~ sqrt(2y − 4π)e^{−y} for k = 0: the local slope is −1 + 1/(2(y − 2π))
    const DecayFit b = decay_rate(BlaschkeLogChart(standard_model(0.0)), 0.4, 20.0, 40.0);
    CHECK(b.slope == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(b.slope > -1.0);
}

TEST_CASE("Blaschke model: transport matches the closed form") {
    // k ≡ −2π reproduces the model metric exactly
    const BlaschkeLogChart shifted(standard_model(-2 * pi));
    const ModelLogChart m;
    for (double y : {1.0, 4.0})
        for (double x : {0.0, 2.0}) {
            const cplx s(x, y);
            CHECK(shifted.psi(s) == doctest::Approx(m.psi(s)).epsilon(1e-12));
            CHECK(std::abs(shifted.psi_s(s) - m.psi_s(s)) < 1e-12);
            CHECK(std::abs(shifted.cubic(s) - m.cubic(s)) < 1e-12);
        }

    const HoloPair pair = standard_model(0.0);
    const BlaschkeLogChart b(pair);
    Eigen::Matrix2d shear;
    shear << 1, 1, 0, 1;
    for (double y : {8.0, 10.0, 12.0}) {
        const LoopReport r = analyze_loop(b, y, 0.0, flat_noise_floor());
        CHECK(r.holonomy.det_drift < 1e-6);
        CHECK(r.cls.tag == HolonomyTag::ParabolicWithFixedPoint);
        CHECK(r.cls.eig_deviation < 1e-2);
        CHECK(r.winding.winding == 1);
        // conjugated into closed-form coordinates the holonomy is the shear α¹ ↦ α¹ + α²
        const AffineMap2 C = to_closed_form(pair, cplx(0.0, y));
        const AffineMap2 hc = r.holonomy.map.conjugated_by(C);
        const double scale = C.translation.norm();
        CHECK((hc.linear - shear).norm() < 1e-7);
        CHECK(hc.translation.norm() < 1e-7 * scale);
        // dev(∞) is the origin of the closed-form coordinates
        CHECK(C(r.dev_inf.point).norm() < 1e-7 * scale);
    }
}

TEST_CASE("Monge-Ampere on transported patches") {
    const MongeAmpereStats flat = monge_ampere_check(FlatData(), 21, -0.5, -0.5, 1.0);
    CHECK(flat.hessian.max_residual < 1e-10);
    const MongeAmpereStats m = monge_ampere_check(ModelLogChart(), 41, 0.0, 8.0, 1.0);
    CHECK(m.hessian.max_residual < 1e-6);
    CHECK(m.det_drift < 1e-6);
    const MongeAmpereStats b = monge_ampere_check(BlaschkeLogChart(standard_model(0.0)), 41, 0.0, 8.0, 1.0);
    CHECK(b.hessian.max_residual < 1e-6);
    // the Legendre dual of a transported patch solves the same equation
    const ImmersionPatch p = transported_patch(ModelLogChart(), 41, 41, 0.0, 8.0, 0.025, 0.025);
    const LegendreData L = legendre(p);
    ImmersionPatch dual = p;
    dual.a1 = L.beta1, dual.a2 = L.beta2, dual.phi = L.chi, dual.b1 = p.a1, dual.b2 = p.a2;
    CHECK(hessian_determinant_check(dual).max_residual < 1e-6);
}

TEST_CASE("transport errors") {
    CHECK_THROWS_AS(transport(init_frame(0.0), segment(cplx(0, 1), cplx(0, -1)), ModelLogChart()), StepUnderflow);
    HolonomyResult h;
    h.map.linear = Eigen::Matrix2d::Identity();
    CHECK_THROWS_AS(winding_number(h, {0, 0}), IllConditioned);
}
