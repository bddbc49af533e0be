#include "sfcy/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "sfcy/errors.hpp"

namespace sfcy {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ExtPoint point_in_chart(ChartKind chart, cplx coord) {
    if (chart == ChartKind::North) return ExtPoint::at(coord);
    return coord == cplx{} ? ExtPoint::inf() : ExtPoint::at(1.0 / coord);
}

// |dζ/dcoord|² between a pole's local coordinate and a stereographic chart.
double local_jacobian(const PoleChart& pc, ChartKind chart, cplx coord) {
    const bool same = (chart == ChartKind::North) != pc.pole.location.infinity;
    return same ? 1.0 : 1.0 / std::pow(std::norm(coord), 2);
}

double model_factor(double rho, PoleModel model) { return model == PoleModel::Cusp ? 2.0 * std::abs(std::log(rho)) : 1.0; }

void require_atlas(const CompositeGrid& g) {
    if (!g.atlas()) throw GridError("operation needs a sphere grid built from a chart atlas");
}

}  // namespace

double round_factor(cplx zeta) { return 4.0 / std::pow(1.0 + std::norm(zeta), 2); }

double chart_transfer(double lambda, cplx coord) { return lambda * std::pow(std::norm(coord), 2); }

double background_factor(const ChartAtlas& atlas, ChartKind chart, cplx coord, PoleModel model) {
    const ExtPoint P = point_in_chart(chart, coord);
    double chi_sum = 0.0, acc = 0.0;
    for (const auto& pc : atlas.poles()) {
        const auto zeta = pc.zeta_of(P);
        if (!zeta || std::abs(*zeta) >= pc.validity) continue;
        if (*zeta == cplx{}) return kNaN;
        const double rho = std::abs(pc.chart.forward(*zeta));
        if (rho >= 2.0 * pc.blend_radius) continue;
        const double chi = smooth_step_down((rho - pc.blend_radius) / pc.blend_radius);
        const double m = model_factor(rho, model) * std::norm(pc.chart.forward.derivative_at(*zeta)) *
                         local_jacobian(pc, chart, coord);
        acc += chi * m;
        chi_sum += chi;
    }
    if (chi_sum >= 1.0) return acc;
    return acc + (1.0 - chi_sum) * round_factor(coord);
}

MetricField build_background_metric(std::shared_ptr<const CompositeGrid> grid, PoleModel model) {
    require_atlas(*grid);
    const ChartAtlas& atlas = *grid->atlas();
    MetricField m{grid, std::vector<double>(grid->size(), kNaN)};
    for (std::size_t n = 0; n < grid->size(); ++n) {
        const Node& nd = grid->nodes()[n];
        const Component& c = grid->component_of(int(n));
        if (c.kind != ChartKind::Polar) {
            m.lambda[n] = background_factor(atlas, c.kind, nd.native, model);
            continue;
        }
        const PoleChart& pc = atlas.poles()[c.pole];
        const double T = c.T[nd.i];
        if (std::exp(T) <= pc.blend_radius) {
            m.lambda[n] = model == PoleModel::Cusp ? 2.0 * std::abs(T) : 1.0;
            continue;
        }
        const cplx zeta = pc.chart.inverse(nd.native);
        const bool at_inf = pc.pole.location.infinity;
        const ChartKind chart = at_inf ? ChartKind::South : ChartKind::North;
        const cplx coord = at_inf ? zeta : pc.pole.location.z + zeta;
        m.lambda[n] = background_factor(atlas, chart, coord, model) / std::norm(pc.chart.forward.derivative_at(zeta));
    }
    return m;
}

bool stencil_usable(const CompositeGrid& g, int node, const std::vector<double>& values) {
    const SparseRow& row = g.flat_laplacian(node);
    if (row.idx.empty()) return false;
    for (int k : row.idx)
        if (!std::isfinite(values[k])) return false;
    return true;
}

ScalarField gauss_curvature(const MetricField& m) {
    const CompositeGrid& g = *m.grid;
    std::vector<double> loglam(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) loglam[n] = m.lambda[n] > 0.0 ? std::log(m.lambda[n]) : kNaN;
    ScalarField k(m.grid);
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (g.nodes()[n].role == NodeRole::Unused || !stencil_usable(g, int(n), loglam)) continue;
        const SparseRow& row = g.flat_laplacian(int(n));
        double lap = 0.0;
        for (std::size_t q = 0; q < row.idx.size(); ++q) lap += row.w[q] * loglam[row.idx[q]];
        k[n] = -lap / (2.0 * m.lambda[n] * g.jacobian(int(n)));
    }
    return k;
}

std::vector<double> scaled_cubic_norm(const CompositeGrid& grid, const RationalCubicDifferential& U) {
    std::vector<double> out(grid.size(), kNaN);
    if (!grid.atlas()) {
        // A polar annulus about a pole at 0: form |wU|² with the factor w
        // cancelled, so rows far below the evaluation guard stay finite.
        const auto& dc = U.denominator().coeffs();
        const bool pole_at_origin = dc.size() > 1 && dc[0] == cplx{};
        const Polynomial reduced(pole_at_origin ? std::vector<cplx>(dc.begin() + 1, dc.end()) : dc);
        for (std::size_t n = 0; n < grid.size(); ++n) {
            const cplx w = grid.nodes()[n].native;
            if (pole_at_origin && grid.component_of(int(n)).kind == ChartKind::Polar) {
                out[n] = std::norm(U.numerator()(w) / reduced(w));
                continue;
            }
            try {
                out[n] = std::norm(evaluate(U, w)) * grid.jacobian(int(n));
            } catch (const PoleEvaluation&) {
            }
        }
        return out;
    }
    const ChartAtlas& atlas = *grid.atlas();
    const RationalCubicDifferential south = U.in_south_chart();
    std::vector<Series> local;      // ζU(ζ)
    std::vector<Series> quotient;   // w(ζ)/ζ
    for (const auto& pc : atlas.poles()) {
        local.push_back(residue_series(U, pc.pole, atlas.params().series_order));
        Series q(pc.chart.forward.size() - 1);
        for (std::size_t k = 0; k < q.size(); ++k) q[k] = pc.chart.forward[k + 1];
        quotient.push_back(q);
    }
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const Node& nd = grid.nodes()[n];
        const Component& c = grid.component_of(int(n));
        if (c.kind == ChartKind::Polar) {
            const PoleChart& pc = atlas.poles()[c.pole];
            const cplx zeta = pc.chart.inverse(nd.native);
            const cplx wp = pc.chart.forward.derivative_at(zeta);
            const cplx omega = local[c.pole](zeta) * quotient[c.pole](zeta) / (wp * wp * wp);
            out[n] = std::norm(omega);
            continue;
        }
        try {
            out[n] = std::norm(evaluate(c.kind == ChartKind::North ? U : south, nd.native));
        } catch (const PoleEvaluation&) {
        }
    }
    return out;
}

ScalarField norm_U_squared(const RationalCubicDifferential& U, const MetricField& m) {
    const CompositeGrid& g = *m.grid;
    const auto q = scaled_cubic_norm(g, U);
    ScalarField out(m.grid);
    for (std::size_t n = 0; n < g.size(); ++n)
        if (std::isfinite(q[n]) && m.lambda[n] > 0.0)
            out[n] = q[n] / (g.jacobian(int(n)) * std::pow(m.lambda[n], 3));
    return out;
}

ScalarField laplacian(const MetricField& m, const ScalarField& phi) {
    const CompositeGrid& g = *m.grid;
    ScalarField out(m.grid);
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (g.nodes()[n].role == NodeRole::Unused || !stencil_usable(g, int(n), phi.values)) continue;
        const SparseRow& row = g.flat_laplacian(int(n));
        double lap = 0.0;
        for (std::size_t q = 0; q < row.idx.size(); ++q) lap += row.w[q] * phi[row.idx[q]];
        out[n] = lap / (m.lambda[n] * g.jacobian(int(n)));
    }
    return out;
}

std::string chart_name(const CompositeGrid& g, int node) {
    const Component& c = g.component_of(node);
    switch (c.kind) {
        case ChartKind::North: return "north";
        case ChartKind::South: return "south";
        case ChartKind::Polar: return c.pole >= 0 ? "pole" + std::to_string(c.pole) : "polar";
    }
    return "?";
}

void write_field_csv(const std::string& path, const ScalarField& f) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << "chart,re,im,value\n" << std::setprecision(12);
    const CompositeGrid& g = *f.grid;
    for (std::size_t n = 0; n < g.size(); ++n) {
        const Node& nd = g.nodes()[n];
        if (nd.role == NodeRole::Unused) continue;
        out << chart_name(g, int(n)) << ',' << nd.native.real() << ',' << nd.native.imag() << ',' << f[n] << '\n';
    }
}

void write_field_svg(const std::string& path, const ScalarField& f, double extent, int pixels,
                     const std::string& title) {
    const CompositeGrid& g = *f.grid;
    std::vector<double> img(static_cast<std::size_t>(pixels) * pixels, kNaN);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int a = 0; a < pixels; ++a)
        for (int b = 0; b < pixels; ++b) {
            const cplx z(-extent + (a + 0.5) * 2.0 * extent / pixels, extent - (b + 0.5) * 2.0 * extent / pixels);
            const SparseRow row = g.locate(ExtPoint::at(z));
            if (row.idx.empty()) continue;
            double v = 0.0;
            for (std::size_t q = 0; q < row.idx.size(); ++q) v += row.w[q] * f[row.idx[q]];
            if (!std::isfinite(v)) continue;
            img[a * pixels + b] = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    const int px = 4, margin = 30;
    const int size = pixels * px;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * margin << "\" height=\""
        << size + 2 * margin << "\">\n";
    out << "<text x=\"" << margin << "\" y=\"20\" font-size=\"12\" font-family=\"sans-serif\">" << title << "  ["
        << lo << ", " << hi << "]</text>\n";
    for (int a = 0; a < pixels; ++a)
        for (int b = 0; b < pixels; ++b) {
            const double v = img[a * pixels + b];
            if (!std::isfinite(v)) continue;
            const double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
            // blue -> white -> red
            const int r = static_cast<int>(255 * std::min(1.0, 2.0 * t));
            const int bl = static_cast<int>(255 * std::min(1.0, 2.0 * (1.0 - t)));
            const int gr = std::min(r, bl);
            out << "<rect x=\"" << margin + a * px << "\" y=\"" << margin + b * px << "\" width=\"" << px
                << "\" height=\"" << px << "\" fill=\"rgb(" << r << ',' << gr << ',' << bl << ")\"/>\n";
        }
    out << "</svg>\n";
}

}  // namespace sfcy
