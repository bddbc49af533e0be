#pragma once

#include <array>
#include <vector>

#include "sfcy/series.hpp"

namespace sfcy {

/// A(z) log z + B(z) with A, B truncated power series. The branch of log z is
/// chosen by the caller: principal value plus 2πi·sheet, or an explicit value.
struct LogSeries {
    Series log_part;
    Series plain;

    cplx value(cplx z, cplx logz) const;
    cplx d1(cplx z, cplx logz) const;
    cplx d2(cplx z, cplx logz) const;

    /// Antiderivative vanishing at z = 0, using ∫ zⁿ log z = zⁿ⁺¹log z/(n+1) − zⁿ⁺¹/(n+1)².
    LogSeries integral() const;
};

/// log z on the principal branch shifted to the given sheet.
cplx log_on_sheet(cplx z, int sheet);

/// Local holomorphic pair (F, G) of the graph representation.
struct HoloPair {
    LogSeries F;
    LogSeries G;

    /// G = g, F = f for polynomial data (no log terms).
    static HoloPair polynomial(Series f, Series g);
};

/// e^ψ = ¼(|G′|² − |F′|²); throws MetricDegenerate unless positive.
double metric_from_fg(const HoloPair& p, cplx z, int sheet = 0);
double metric_from_fg(const HoloPair& p, cplx z, cplx logz, bool check = true);
/// ∂_z ψ for the same metric.
cplx metric_log_derivative(const HoloPair& p, cplx z, cplx logz);

/// dz³-coefficient ¼(G′F″ − F′G″).
cplx cubic_from_fg(const HoloPair& p, cplx z, int sheet = 0);
cplx cubic_from_fg(const HoloPair& p, cplx z, cplx logz);

/// Holomorphic data (j, k) of a model end, subject to −16π = (1 + z k′) j².
class ModelData {
public:
    /// Throws ConstraintViolated if the series identity fails beyond `tol`.
    ModelData(Series j, Series k, double tol = 1e-12);

    /// Solve k′ = (−16π/j² − 1)/z termwise for the given j; k(0) = k0.
    /// Throws ConstraintViolated unless j(0)² = −16π.
    static ModelData from_j(const Series& j, cplx k0 = 0.0);
    /// j ≡ 4i√π, k ≡ k0, truncated to `order` terms.
    static ModelData standard(std::size_t order = 12, cplx k0 = 0.0);

    const Series& j() const { return j_; }
    const Series& k() const { return k_; }
    /// Max coefficient of (1 + z k′) j² + 16π.
    double constraint_residual() const;

private:
    Series j_;
    Series k_;
};

/// G′ = −j/4π (log z + k), F′ = −j/4π (log z + k + 4π), integrated so that
/// F, G → 0 along radial paths.
HoloPair model_fg(const ModelData& data);

/// G ↦ G, F ↦ −F.
HoloPair mirror(const HoloPair& p);

/// Affine coordinates and dual coordinates of the pair at z:
/// α¹ = ½Re(G+F), α² = ½Im(G−F), β₁ = ½Re(G−F), β₂ = ½Im(G+F).
struct AffinePoint {
    double a1 = 0, a2 = 0, b1 = 0, b2 = 0;
};
AffinePoint affine_point(const HoloPair& p, cplx z, cplx logz);

/// Samples of a graph (α, φ) with gradient β = ∂φ/∂α on a regular grid in a
/// conformal parameter z = x + iy (index i along x, j along y).
struct ImmersionPatch {
    int nx = 0, ny = 0;
    double x0 = 0, y0 = 0, dx = 0, dy = 0;
    std::vector<double> a1, a2, phi, b1, b2;

    int index(int i, int j) const { return j * nx + i; }
    std::size_t size() const { return a1.size(); }
    static ImmersionPatch sized(int nx, int ny, double x0, double y0, double dx, double dy);
};

/// Patch sampled from an explicit convex potential on the parameter grid
/// (α = (x, y)); used for quadratic and synthetic cases.
template <class Phi, class Grad>
ImmersionPatch sample_graph(int nx, int ny, double x0, double y0, double dx, double dy, Phi phi, Grad grad) {
    ImmersionPatch p = ImmersionPatch::sized(nx, ny, x0, y0, dx, dy);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int n = p.index(i, j);
            const double x = x0 + i * dx, y = y0 + j * dy;
            p.a1[n] = x;
            p.a2[n] = y;
            p.phi[n] = phi(x, y);
            const std::array<double, 2> g = grad(x, y);
            p.b1[n] = g[0];
            p.b2[n] = g[1];
        }
    return p;
}

/// Patch of the graph given by a pair, sampled on a grid in the log chart
/// s = x + iy with z = e^{is} and log z = is. φ is recovered from dφ = β·dα
/// by fourth-order cumulative quadrature, starting from φ = α·β at (x0, y0).
ImmersionPatch patch_from_fg(const HoloPair& p, int nx, int ny, double x0, double y0, double dx, double dy);

struct FGSamples {
    std::vector<cplx> F, G;
    double cr_residual = 0.0;  ///< max |∂_z̄ f| / max |∂_z G| over interior nodes, f ∈ {F, G}
    double min_gap = 0.0;      ///< min (|G′| − |F′|) over interior nodes
};

/// G = (α¹ + β₁) + i(α² + β₂), F = (α¹ − β₁) + i(−α² + β₂), checked for
/// holomorphy in the patch parameter. Throws NotHolomorphic if the
/// Cauchy–Riemann residual exceeds `budget` or |G′| > |F′| fails.
FGSamples fg_from_immersion(const ImmersionPatch& patch, double budget = 1e-6);

struct LegendreData {
    std::vector<double> beta1, beta2, chi;
};

/// β = ∇φ, χ = β·α − φ. Throws ConvexityFailure unless the Hessian (from
/// differences of β against α) is positive definite at every interior node.
LegendreData legendre(const ImmersionPatch& patch);

/// max |β − (½Re(G−F), ½Im(G+F))| over the patch.
double legendre_fg_mismatch(const ImmersionPatch& patch, const FGSamples& fg);

/// Element of the group fixing ξ: α̃ = αA + b, γ̃ = α·c + γ + d (α, b rows).
struct GaugeElement {
    std::array<std::array<double, 2>, 2> A{{{1, 0}, {0, 1}}};
    std::array<double, 2> b{0, 0};
    std::array<double, 2> c{0, 0};
    double d = 0.0;
};

/// Transformed graph samples: α̃, φ̃ and β̃ = A⁻¹(β + c).
ImmersionPatch gauge_action(const ImmersionPatch& patch, const GaugeElement& g);

/// max deviation of Legendre(g·patch) from the transformation law
/// β̃ = A⁻¹β + A⁻¹c, χ̃ = bA⁻¹β + χ + bA⁻¹c − d.
double gauge_law_residual(const ImmersionPatch& patch, const GaugeElement& g);

/// max |det Hess − 1| with the Hessian ∂β/∂α formed by fourth-order
/// differences in the patch parameter. Throws FoldDetected if ∂α/∂(x,y)
/// degenerates or changes orientation.
struct HessianStats {
    double max_residual = 0.0;
    double mean_residual = 0.0;
    int nodes = 0;
};
HessianStats hessian_determinant_check(const ImmersionPatch& patch);

}  // namespace sfcy
