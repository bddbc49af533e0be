#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "sfcy/series.hpp"

namespace sfcy {

/// Dense complex polynomial, coefficients in ascending degree.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<cplx> coeffs);

    const std::vector<cplx>& coeffs() const { return c_; }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    cplx leading() const { return c_.back(); }

    cplx operator()(cplx z) const;
    Polynomial derivative() const;
    /// Coefficients of p(center + t) in t.
    Polynomial shifted(cplx center) const;
    /// Reversed coefficient list: t^deg p(1/t).
    Polynomial reversed() const;
    /// All roots (companion matrix eigenvalues, polished by Newton).
    std::vector<cplx> roots() const;

private:
    std::vector<cplx> c_;  // trimmed so the leading coefficient is nonzero
};

/// A point of the Riemann sphere.
struct ExtPoint {
    bool infinity = false;
    cplx z{};

    static ExtPoint at(cplx z) { return {false, z}; }
    static ExtPoint inf() { return {true, {}}; }
};

struct Pole {
    ExtPoint location;
    /// Coefficient a in U = (a/ζ + holomorphic) dζ³, with ζ = z − p for finite
    /// poles and ζ = 1/z for the pole at infinity.
    cplx residue;
};

struct DivisorCounts {
    int pole_count = 0;
    int zero_count = 0;  // with multiplicity
};

/// Meromorphic cubic differential U = N(z)/D(z) dz³ on CP¹ in the affine
/// chart z; the south chart is w = 1/z.
class RationalCubicDifferential {
public:
    RationalCubicDifferential(std::vector<cplx> numerator, std::vector<cplx> denominator);

    /// U = scale · Π(z − q_k) / Π(z − p_j) dz³ built from a declared divisor.
    /// Entries at infinity are recorded but contribute no finite factor; the
    /// declaration is checked against the actual divisor by validate_divisor.
    static RationalCubicDifferential from_divisor(const std::vector<ExtPoint>& poles,
                                                  const std::vector<ExtPoint>& zeros, cplx scale = 1.0);

    const Polynomial& numerator() const { return num_; }
    const Polynomial& denominator() const { return den_; }
    const std::optional<DivisorCounts>& declared() const { return declared_; }

    /// Order of vanishing of U at z = ∞ (negative for a pole).
    int order_at_infinity() const;
    /// The same section written in the south chart w = 1/z.
    RationalCubicDifferential in_south_chart() const;
    /// U scaled by a constant factor.
    RationalCubicDifferential scaled(cplx factor) const;

private:
    Polynomial num_;
    Polynomial den_;
    std::optional<DivisorCounts> declared_;
};

/// dz³-coefficient of U at z. Throws PoleEvaluation at a pole.
cplx evaluate(const RationalCubicDifferential& U, cplx z);

/// All poles, including ∞, with residues. Throws HigherOrderPole.
std::vector<Pole> find_poles(const RationalCubicDifferential& U);

/// Finite and infinite zeros, repeated by multiplicity.
std::vector<ExtPoint> find_zeros(const RationalCubicDifferential& U);

/// Pole and zero counts; throws DegreeMismatch unless poles − zeros = 6.
DivisorCounts validate_divisor(const RationalCubicDifferential& U);

struct CanonicalChart {
    Pole pole;
    /// w(ζ) = λζ + c₂ζ² + … in the local coordinate ζ centred at the pole
    /// (ζ = z − p, or ζ = 1/z for the pole at infinity).
    Series forward;
    /// ζ(w), the compositional inverse of `forward`.
    Series inverse;
    int truncation_order = 0;
    cplx scale;  ///< λ, with λ² = residue
    bool alternate_branch = false;
    /// Distance from the pole to the nearest other pole or zero, in ζ.
    double neighbour_distance = 0.0;
    double radius_estimate = 0.0;
    /// max |w'³/(w U) − 1| on |ζ| = 0.3·neighbour_distance.
    double pullback_error = 0.0;

    cplx to_canonical(cplx zeta) const { return forward(zeta); }
    cplx from_canonical(cplx w) const { return inverse(w); }
};

/// Builds the coordinate w with U = dw³/w near the pole to the given series
/// order. Throws SeriesDivergence if the coefficients indicate a radius of
/// convergence inside the validation annulus.
CanonicalChart canonical_chart(const RationalCubicDifferential& U, const Pole& p, int order,
                               bool alternate_branch = false);

/// Local expansion ζ·U(ζ) around a pole, as a series in ζ.
Series residue_series(const RationalCubicDifferential& U, const Pole& p, int order);

}  // namespace sfcy
