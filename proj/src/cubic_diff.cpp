#include "sfcy/cubic_diff.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sfcy/errors.hpp"

namespace sfcy {

namespace {

std::vector<cplx> trim(std::vector<cplx> c) {
    double scale = 0.0;
    for (const auto& v : c) scale = std::max(scale, std::abs(v));
    while (!c.empty() && std::abs(c.back()) <= 1e-14 * scale) c.pop_back();
    return c;
}

double coeff_scale(const Polynomial& p) {
    double s = 0.0;
    for (const auto& v : p.coeffs()) s = std::max(s, std::abs(v));
    return s;
}

}  // namespace

Polynomial::Polynomial(std::vector<cplx> coeffs) : c_(trim(std::move(coeffs))) {}

cplx Polynomial::operator()(cplx z) const {
    cplx acc{};
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * z + c_[i];
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (c_.size() <= 1) return Polynomial(std::vector<cplx>{});
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * double(i);
    return Polynomial(std::move(d));
}

Polynomial Polynomial::shifted(cplx center) const {
    // Repeated synthetic division (Taylor shift).
    std::vector<cplx> a = c_;
    const std::size_t n = a.size();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = n - 1; i > k; --i) a[i - 1] += center * a[i];
    Polynomial p;
    p.c_ = a;  // keep full length: the constant term may legitimately be ~0
    return p;
}

Polynomial Polynomial::reversed() const {
    std::vector<cplx> r(c_.rbegin(), c_.rend());
    return Polynomial(std::move(r));
}

std::vector<cplx> Polynomial::roots() const {
    const int n = degree();
    if (n < 1) return {};
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) companion(i, n - 1) = -c_[i] / c_[n];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, false);
    std::vector<cplx> out(es.eigenvalues().data(), es.eigenvalues().data() + n);
    const Polynomial d = derivative();
    for (auto& r : out) {
        for (int it = 0; it < 5; ++it) {
            const cplx dp = d(r);
            if (std::abs(dp) < 1e-12 * coeff_scale(*this)) break;
            const cplx step = (*this)(r) / dp;
            r -= step;
            if (std::abs(step) < 1e-16 * (1.0 + std::abs(r))) break;
        }
    }
    return out;
}

RationalCubicDifferential::RationalCubicDifferential(std::vector<cplx> numerator, std::vector<cplx> denominator)
    : num_(std::move(numerator)), den_(std::move(denominator)) {
    if (num_.degree() < 0) throw InvalidDifferential("cubic differential is identically zero");
    if (den_.degree() < 0) throw InvalidDifferential("denominator is identically zero");
}

RationalCubicDifferential RationalCubicDifferential::from_divisor(const std::vector<ExtPoint>& poles,
                                                                  const std::vector<ExtPoint>& zeros, cplx scale) {
    std::vector<cplx> num{scale};
    std::vector<cplx> den{1.0};
    auto multiply = [](std::vector<cplx>& p, cplx root) {
        std::vector<cplx> r(p.size() + 1, cplx{});
        for (std::size_t i = 0; i < p.size(); ++i) {
            r[i + 1] += p[i];
            r[i] -= root * p[i];
        }
        p = std::move(r);
    };
    for (const auto& q : zeros)
        if (!q.infinity) multiply(num, q.z);
    for (const auto& p : poles)
        if (!p.infinity) multiply(den, p.z);
    RationalCubicDifferential U(num, den);
    U.declared_ = DivisorCounts{static_cast<int>(poles.size()), static_cast<int>(zeros.size())};
    return U;
}

int RationalCubicDifferential::order_at_infinity() const { return den_.degree() - num_.degree() - 6; }

RationalCubicDifferential RationalCubicDifferential::in_south_chart() const {
    // U(1/w) d(1/w)^3 = -N(1/w) / (D(1/w) w^6) dw^3
    //                 = -w^{dD-dN-6} Ñ(w)/D̃(w) dw^3
    const int m = order_at_infinity();
    std::vector<cplx> n = num_.reversed().coeffs();
    std::vector<cplx> d = den_.reversed().coeffs();
    for (auto& v : n) v = -v;
    if (m > 0) n.insert(n.begin(), static_cast<std::size_t>(m), cplx{});
    if (m < 0) d.insert(d.begin(), static_cast<std::size_t>(-m), cplx{});
    RationalCubicDifferential s(n, d);
    s.declared_ = declared_;
    return s;
}

RationalCubicDifferential RationalCubicDifferential::scaled(cplx factor) const {
    std::vector<cplx> n = num_.coeffs();
    for (auto& v : n) v *= factor;
    RationalCubicDifferential s(n, den_.coeffs());
    s.declared_ = declared_;
    return s;
}

cplx evaluate(const RationalCubicDifferential& U, cplx z) {
    const cplx d = U.denominator()(z);
    const double tol = 1e-14 * coeff_scale(U.denominator()) * std::max(1.0, std::pow(std::abs(z), U.denominator().degree()));
    if (std::abs(d) <= tol) throw PoleEvaluation("U evaluated at a pole");
    return U.numerator()(z) / d;
}

std::vector<Pole> find_poles(const RationalCubicDifferential& U) {
    std::vector<Pole> poles;
    const auto roots = U.denominator().roots();
    const Polynomial dprime = U.denominator().derivative();
    const double nscale = coeff_scale(U.numerator());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        for (std::size_t j = i + 1; j < roots.size(); ++j)
            if (std::abs(roots[i] - roots[j]) < 1e-6 * (1.0 + std::abs(roots[i])))
                throw HigherOrderPole("multiple denominator root near " + std::to_string(roots[i].real()) + "+" +
                                      std::to_string(roots[i].imag()) + "i");
        const cplx r = roots[i];
        const cplx nval = U.numerator()(r);
        if (std::abs(nval) < 1e-10 * nscale * std::max(1.0, std::pow(std::abs(r), U.numerator().degree())))
            throw InvalidDifferential("numerator and denominator share a root (removable singularity)");
        poles.push_back({ExtPoint::at(r), nval / dprime(r)});
    }
    const int m = U.order_at_infinity();
    if (m <= -2) throw HigherOrderPole("pole of order " + std::to_string(-m) + " at infinity");
    if (m == -1) poles.push_back({ExtPoint::inf(), -U.numerator().leading() / U.denominator().leading()});
    return poles;
}

std::vector<ExtPoint> find_zeros(const RationalCubicDifferential& U) {
    std::vector<ExtPoint> zeros;
    for (const auto& r : U.numerator().roots()) zeros.push_back(ExtPoint::at(r));
    for (int k = 0; k < U.order_at_infinity(); ++k) zeros.push_back(ExtPoint::inf());
    return zeros;
}

DivisorCounts validate_divisor(const RationalCubicDifferential& U) {
    if (const auto& d = U.declared(); d && d->pole_count - d->zero_count != 6)
        throw DegreeMismatch("declared divisor degree is " + std::to_string(d->zero_count - d->pole_count) +
                             ", expected -6 for K^3 on CP^1");
    DivisorCounts counts{static_cast<int>(find_poles(U).size()), static_cast<int>(find_zeros(U).size())};
    if (const auto& d = U.declared();
        d && (d->pole_count != counts.pole_count || d->zero_count != counts.zero_count))
        throw DegreeMismatch("declared divisor (" + std::to_string(d->pole_count) + " poles, " +
                             std::to_string(d->zero_count) + " zeros) disagrees with the section (" +
                             std::to_string(counts.pole_count) + ", " + std::to_string(counts.zero_count) + ")");
    if (counts.pole_count - counts.zero_count != 6)
        throw DegreeMismatch("divisor degree " + std::to_string(counts.zero_count - counts.pole_count) + " != -6");
    return counts;
}

namespace {

struct LocalForm {
    RationalCubicDifferential chart_u;
    cplx center;
};

LocalForm local_form(const RationalCubicDifferential& U, const Pole& p) {
    if (p.location.infinity) return {U.in_south_chart(), cplx{}};
    return {U, p.location.z};
}

}  // namespace

Series residue_series(const RationalCubicDifferential& U, const Pole& p, int order) {
    const LocalForm lf = local_form(U, p);
    const auto nsh = lf.chart_u.numerator().shifted(lf.center).coeffs();
    const auto dsh = lf.chart_u.denominator().shifted(lf.center).coeffs();
    const std::size_t n = static_cast<std::size_t>(order);
    Series num(n), den(n);
    for (std::size_t i = 0; i < n && i < nsh.size(); ++i) num[i] = nsh[i];
    for (std::size_t i = 0; i < n && i + 1 < dsh.size(); ++i) den[i] = dsh[i + 1];
    return num * den.reciprocal();
}

CanonicalChart canonical_chart(const RationalCubicDifferential& U, const Pole& p, int order, bool alternate_branch) {
    if (order < 2) throw SeriesDivergence("truncation order must be >= 2");
    const std::size_t n = static_cast<std::size_t>(order);
    const cplx a = p.residue;
    if (a == cplx{}) throw HigherOrderPole("zero residue");

    // g = ζU/a, K = (2/3)∫₀^ζ (a⁻¹U)^{1/3} / ζ^{2/3}, w = λ ζ K^{3/2}.
    const Series g = residue_series(U, p, order) * (1.0 / a);
    const Series cube_root = g.pow_unit(1.0 / 3.0);
    Series K(n);
    for (std::size_t k = 0; k < n; ++k) K[k] = cube_root[k] / (double(k) + 2.0 / 3.0) * (2.0 / 3.0);
    const Series K32 = K.pow_unit(1.5);

    CanonicalChart chart;
    chart.pole = p;
    chart.truncation_order = order;
    chart.alternate_branch = alternate_branch;
    chart.scale = std::sqrt(a) * (alternate_branch ? -1.0 : 1.0);
    chart.forward = Series(n + 1);
    for (std::size_t k = 0; k < n; ++k) chart.forward[k + 1] = chart.scale * K32[k];
    chart.inverse = chart.forward.reversion();

    // Nearest other pole/zero in the chart of the pole.
    const LocalForm lf = local_form(U, p);
    double dist = std::numeric_limits<double>::infinity();
    for (const auto& r : lf.chart_u.denominator().roots())
        if (std::abs(r - lf.center) > 1e-9) dist = std::min(dist, std::abs(r - lf.center));
    for (const auto& r : lf.chart_u.numerator().roots()) dist = std::min(dist, std::abs(r - lf.center));
    if (!std::isfinite(dist)) dist = 1.0;
    chart.neighbour_distance = dist;
    chart.radius_estimate = chart.forward.radius_estimate();
    if (chart.radius_estimate < 0.5 * dist)
        throw SeriesDivergence("canonical series radius " + std::to_string(chart.radius_estimate) +
                               " is inside the validation annulus (outer radius " + std::to_string(0.5 * dist) + ")");

    double err = 0.0;
    const double rho = 0.3 * dist;
    for (int k = 0; k < 64; ++k) {
        const cplx zeta = std::polar(rho, 2.0 * std::numbers::pi * k / 64.0);
        const cplx w = chart.forward(zeta);
        const cplx wp = chart.forward.derivative_at(zeta);
        const cplx u = evaluate(lf.chart_u, lf.center + zeta);
        err = std::max(err, std::abs(wp * wp * wp / (w * u) - 1.0));
    }
    chart.pullback_error = err;
    return chart;
}

}  // namespace sfcy
