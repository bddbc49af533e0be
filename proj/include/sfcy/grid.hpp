#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sfcy/cubic_diff.hpp"

namespace sfcy {

/// Resolution and layout of the composite sphere grid.
struct GridParams {
    int cartesian_n = 320;        ///< nodes per side of each stereographic chart
    double half_width = 1.5;      ///< chart square is [-a, a]^2
    double active_radius = 1.4;   ///< nodes with |ζ| <= this carry the PDE
    int ntheta = 80;              ///< angular nodes of each pole patch
    double dT = 0.0;              ///< radial log-step near the pole (0: 2π/ntheta)
    double fine_T_min = -40.0;    ///< uniform log-spacing down to this depth
    double growth = 1.08;         ///< geometric growth of the log-step beyond
    double T_min = -3000.0;       ///< deepest row (log canonical radius)
    double patch_fraction = 0.35; ///< patch radius / (neighbour distance · |λ|)
    double hole_fraction = 0.55;  ///< Cartesian nodes below this fraction of the patch radius are cut out
    double blend_fraction = 0.25; ///< model metric below this fraction of the patch radius (blend stays inside the hole)
    int series_order = 40;

    double log_step() const;
};

/// Canonical chart of one pole together with its patch radii (canonical units).
struct PoleChart {
    Pole pole;
    CanonicalChart chart;
    double patch_radius = 0.0;
    double hole_radius = 0.0;
    double blend_radius = 0.0;
    /// |ζ| below which the canonical series is trusted.
    double validity = 0.0;

    /// Local coordinate ζ of a sphere point (z − p, or 1/z at infinity).
    std::optional<cplx> zeta_of(const ExtPoint& P) const;
    /// Canonical coordinate w of P if it lies where the series is trusted.
    std::optional<cplx> canonical_of(const ExtPoint& P) const;
    ExtPoint point_of_zeta(cplx zeta) const;
    ExtPoint point_of(cplx w) const { return point_of_zeta(chart.inverse(w)); }
};

/// Two stereographic charts (north z, south w = 1/z) plus one canonical chart
/// per pole, with the excision and blend radii used by the grids.
class ChartAtlas {
public:
    static ChartAtlas build(const RationalCubicDifferential& U, const GridParams& params);

    const RationalCubicDifferential& cubic() const { return north_u_; }
    const RationalCubicDifferential& cubic_south() const { return south_u_; }
    const std::vector<PoleChart>& poles() const { return poles_; }
    const std::vector<ExtPoint>& zeros() const { return zeros_; }
    const GridParams& params() const { return params_; }

    /// Override the blend radius of every pole (as a fraction of the patch
    /// radius) and re-run the blend checks.
    ChartAtlas with_blend_fraction(double fraction) const;

    /// Throws BlendFailure if a blend annulus leaves the series disk, meets
    /// another pole/zero, or reaches |w| = 1 where |log|w|²| vanishes.
    void check_blend() const;

private:
    RationalCubicDifferential north_u_{{1.0}, {1.0}};
    RationalCubicDifferential south_u_{{1.0}, {1.0}};
    std::vector<PoleChart> poles_;
    std::vector<ExtPoint> zeros_;
    GridParams params_;
};

enum class ChartKind : std::uint8_t { North, South, Polar };
enum class NodeRole : std::uint8_t { Unused, Interior, Receiver, Dirichlet };

struct Component {
    ChartKind kind = ChartKind::North;
    int pole = -1;      ///< pole index for polar patches
    int offset = 0;     ///< global index of node (0, 0)
    // Cartesian: x_i = -a + (i + 1/2) h, centred on `center`.
    int n = 0;
    double half_width = 0.0;
    double h = 0.0;
    cplx center{};
    // Polar (log-polar in the canonical coordinate): rows T[k], angles l·dθ.
    std::vector<double> T;
    int ntheta = 0;
    double dtheta = 0.0;
    int inner_row = -1;  ///< Dirichlet row (deeper rows unused)

    int rows() const { return kind == ChartKind::Polar ? static_cast<int>(T.size()) : n; }
    int cols() const { return kind == ChartKind::Polar ? ntheta : n; }
    int index(int i, int j) const { return offset + i * cols() + j; }
};

struct Node {
    int comp = 0;
    int i = 0, j = 0;          ///< Cartesian (ix, iy) or polar (row, angle)
    NodeRole role = NodeRole::Unused;
    cplx native{};             ///< coordinate in the component's own chart
    ExtPoint point;            ///< position on the sphere (north chart)
};

/// Weighted list of node indices (a sparse row).
struct SparseRow {
    std::vector<int> idx;
    std::vector<double> w;
};

/// Overlapping composite grid covering the sphere minus excised pole disks,
/// or a single stand-alone chart patch.
class CompositeGrid {
public:
    /// Full sphere grid with inner pole boundaries at log canonical radius
    /// `excision_T` (snapped to the nearest row at or below it).
    static std::shared_ptr<const CompositeGrid> build(const ChartAtlas& atlas, double excision_T);

    /// Single Cartesian patch [c-a, c+a]^2 with Dirichlet edges (north chart).
    static std::shared_ptr<const CompositeGrid> cartesian(int n, double half_width, cplx center = {});

    /// Single log-polar annulus about the origin of a chart, rows T uniformly
    /// spaced from T_outer down to T_inner; both end rows are Dirichlet.
    static std::shared_ptr<const CompositeGrid> polar_annulus(double T_outer, double T_inner, int rows,
                                                              int ntheta);

    const std::vector<Component>& components() const { return comps_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    std::size_t size() const { return nodes_.size(); }
    const Component& component_of(int node) const { return comps_[nodes_[node].comp]; }

    /// Flat Laplacian stencil in native coordinates (∂xx+∂yy or ∂TT+∂θθ).
    /// Empty for nodes without a valid stencil.
    const SparseRow& flat_laplacian(int node) const { return lap_[node]; }
    /// Interpolation weights of a receiver on donor nodes of another component.
    const SparseRow& donors(int node) const { return donors_[node]; }
    /// Native area element times partition-of-unity weight (0 on receivers).
    double quadrature_weight(int node) const { return quad_[node] * jacobian(node); }
    /// Same weight in the native measure (dT dθ on polar patches); finite at any depth.
    double native_weight(int node) const { return quad_[node]; }
    /// Ratio of the native flat measure to |dζ|² of the native coordinate:
    /// 1 for Cartesian charts, ρ² = e^{2T} for log-polar patches.
    double jacobian(int node) const;
    /// log canonical radius of a polar node.
    double log_radius(int node) const;

    /// Interpolation weights of the field at a sphere point, using the best
    /// component. Returns an empty row if no component covers the point.
    SparseRow locate(const ExtPoint& P, int exclude_comp = -1) const;
    /// Interpolation weights using one component only.
    std::optional<SparseRow> locate_in(int comp, const ExtPoint& P) const { return stencil_in(comp, P); }
    double interpolate(std::span<const double> values, const ExtPoint& P) const;

    /// Polar component of pole j, or -1.
    int patch_of_pole(int pole) const;
    const ChartAtlas* atlas() const { return atlas_.get(); }
    /// Log canonical radius of the inner boundary row of each patch.
    double inner_log_radius(int pole) const;

private:
    void build_stencils();
    std::optional<SparseRow> stencil_in(int comp, const ExtPoint& P) const;
    std::optional<SparseRow> polar_stencil(int comp, double T, double theta) const;
    std::optional<SparseRow> cartesian_stencil(int comp, cplx native) const;

    std::shared_ptr<const ChartAtlas> atlas_;
    std::vector<Component> comps_;
    std::vector<Node> nodes_;
    std::vector<SparseRow> lap_;
    std::vector<SparseRow> donors_;
    std::vector<double> quad_;
};

/// Finite-difference weights (Fornberg) for the m-th derivative at x0.
std::vector<double> fd_weights(double x0, std::span<const double> x, int m);

/// C^∞ step: 1 for s <= 0, 0 for s >= 1.
double smooth_step_down(double s);

}  // namespace sfcy
