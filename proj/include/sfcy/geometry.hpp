#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sfcy/grid.hpp"

namespace sfcy {

/// Real values on the nodes of a grid.
struct ScalarField {
    std::shared_ptr<const CompositeGrid> grid;
    std::vector<double> values;

    ScalarField() = default;
    ScalarField(std::shared_ptr<const CompositeGrid> g, double fill = 0.0)
        : grid(std::move(g)), values(grid->size(), fill) {}
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }
};

/// Conformal factor λ of λ|dζ|², with ζ the native coordinate of each node
/// (z, 1/z, or the canonical coordinate of a pole patch).
struct MetricField {
    std::shared_ptr<const CompositeGrid> grid;
    std::vector<double> lambda;
};

/// What the metric looks like inside the blend disks.
enum class PoleModel {
    Cusp,  ///< |log|w|²| |dw|²
    Flat,  ///< |dw|²
};

/// Round factor 4/(1+|ζ|²)², the same in both stereographic charts.
double round_factor(cplx zeta);

/// Conformal factor at a sphere point written in a stereographic chart.
/// NaN at a pole.
double background_factor(const ChartAtlas& atlas, ChartKind chart, cplx coord, PoleModel model = PoleModel::Cusp);

/// Background metric on every node of the grid: the pole model inside each
/// blend disk, the round metric outside the doubled disks, smooth in between.
MetricField build_background_metric(std::shared_ptr<const CompositeGrid> grid, PoleModel model = PoleModel::Cusp);

/// λ(ζ) → λ(ζ') for the chart change ζ' = 1/ζ between stereographic charts.
double chart_transfer(double lambda, cplx coord);

/// −(1/(2λ)) Δ₀ log λ. Zero at nodes without a usable stencil.
ScalarField gauss_curvature(const MetricField& m);

/// |U|²/λ³ at every node. On pole patches |U|² is formed from the local
/// expansion, so it stays finite down to the innermost row.
ScalarField norm_U_squared(const RationalCubicDifferential& U, const MetricField& m);

/// jacobian·|U|² in native coordinates (|w U_w|² on pole patches). U must have
/// the poles of the grid's atlas; on stand-alone grids it is evaluated at the
/// native coordinate directly. NaN at poles.
std::vector<double> scaled_cubic_norm(const CompositeGrid& grid, const RationalCubicDifferential& U);

/// (1/λ) Δ₀ φ in native coordinates.
ScalarField laplacian(const MetricField& m, const ScalarField& phi);

/// Whether the flat stencil of a node only touches finite values.
bool stencil_usable(const CompositeGrid& g, int node, const std::vector<double>& values);

/// CSV with columns chart, re, im, value (native coordinates).
void write_field_csv(const std::string& path, const ScalarField& f);

/// Heatmap of a field over the north-chart square [-extent, extent]², drawn
/// from interpolated values.
void write_field_svg(const std::string& path, const ScalarField& f, double extent = 2.0, int pixels = 120,
                     const std::string& title = "");

std::string chart_name(const CompositeGrid& g, int node);

}  // namespace sfcy
