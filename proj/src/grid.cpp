#include "sfcy/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sfcy/errors.hpp"

namespace sfcy {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Stereographic charts hand over across |z| in [e^-b, e^b].
const double kChartBand = std::log(1.0 / 0.85);

double wrap_angle(double t) {
    t = std::fmod(t, kTwoPi);
    return t < 0.0 ? t + kTwoPi : t;
}

// Partition-of-unity weight of a pole patch at canonical radius rho.
double patch_weight(double rho, double rho_out) { return smooth_step_down((rho / rho_out - 0.6) / 0.3); }

// Weight of a stereographic chart at native |ζ|.
double chart_weight(double r) {
    if (r <= 0.0) return 1.0;
    return smooth_step_down((std::log(r) + kChartBand) / (2.0 * kChartBand));
}

}  // namespace

double smooth_step_down(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / (1.0 - s));
    const double b = std::exp(-1.0 / s);
    return a / (a + b);
}

std::vector<double> fd_weights(double x0, std::span<const double> x, int m) {
    const int n = static_cast<int>(x.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(m + 1, 0.0));
    double c1 = 1.0, c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][m];
    return w;
}

double GridParams::log_step() const { return dT > 0.0 ? dT : kTwoPi / ntheta; }

std::optional<cplx> PoleChart::zeta_of(const ExtPoint& P) const {
    if (pole.location.infinity) {
        if (P.infinity) return cplx{};
        if (P.z == cplx{}) return std::nullopt;
        return 1.0 / P.z;
    }
    if (P.infinity) return std::nullopt;
    return P.z - pole.location.z;
}

std::optional<cplx> PoleChart::canonical_of(const ExtPoint& P) const {
    const auto zeta = zeta_of(P);
    if (!zeta || std::abs(*zeta) >= validity) return std::nullopt;
    return chart.forward(*zeta);
}

ExtPoint PoleChart::point_of_zeta(cplx zeta) const {
    if (pole.location.infinity) return zeta == cplx{} ? ExtPoint::inf() : ExtPoint::at(1.0 / zeta);
    return ExtPoint::at(pole.location.z + zeta);
}

ChartAtlas ChartAtlas::build(const RationalCubicDifferential& U, const GridParams& params) {
    validate_divisor(U);
    ChartAtlas atlas;
    atlas.north_u_ = U;
    atlas.south_u_ = U.in_south_chart();
    atlas.params_ = params;
    atlas.zeros_ = find_zeros(U);
    for (const auto& p : find_poles(U)) {
        PoleChart pc;
        pc.pole = p;
        pc.chart = canonical_chart(U, p, params.series_order);
        const double d = pc.chart.neighbour_distance;
        pc.validity = std::min(0.6 * d, 0.9 * pc.chart.radius_estimate);
        pc.patch_radius = std::min(params.patch_fraction * d * std::abs(pc.chart.scale), 0.6);
        pc.hole_radius = params.hole_fraction * pc.patch_radius;
        pc.blend_radius = params.blend_fraction * pc.patch_radius;
        atlas.poles_.push_back(std::move(pc));
    }
    atlas.check_blend();
    return atlas;
}

ChartAtlas ChartAtlas::with_blend_fraction(double fraction) const {
    ChartAtlas a = *this;
    a.params_.blend_fraction = fraction;
    for (auto& p : a.poles_) p.blend_radius = fraction * p.patch_radius;
    a.check_blend();
    return a;
}

void ChartAtlas::check_blend() const {
    for (std::size_t j = 0; j < poles_.size(); ++j) {
        const auto& p = poles_[j];
        const double outer = 2.0 * p.blend_radius;
        if (!(p.blend_radius > 0.0)) throw BlendFailure("blend radius must be positive");
        if (outer >= 1.0)
            throw BlendFailure("blend annulus of pole " + std::to_string(j) +
                               " reaches |w| = 1 where the model metric degenerates");
        // ζ-radius of the outer blend circle, sampled on the circle itself.
        double zeta_r = 0.0;
        for (int k = 0; k < 32; ++k) {
            const cplx w = std::polar(outer, kTwoPi * k / 32.0);
            zeta_r = std::max(zeta_r, std::abs(p.chart.inverse(w)));
        }
        if (!std::isfinite(zeta_r) || zeta_r >= 0.5 * p.chart.neighbour_distance || zeta_r >= p.validity)
            throw BlendFailure("blend annulus of pole " + std::to_string(j) +
                               " leaves the disk free of other poles and zeros");
    }
}

// ---------------------------------------------------------------- grids

std::shared_ptr<const CompositeGrid> CompositeGrid::cartesian(int n, double half_width, cplx center) {
    if (n < 4) throw GridError("Cartesian patch needs at least 4 nodes per side");
    auto g = std::make_shared<CompositeGrid>();
    Component c;
    c.kind = ChartKind::North;
    c.n = n;
    c.half_width = half_width;
    c.h = 2.0 * half_width / n;
    c.center = center;
    g->comps_.push_back(c);
    g->nodes_.resize(static_cast<std::size_t>(n) * n);
    g->quad_.assign(g->nodes_.size(), 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Node& nd = g->nodes_[c.index(i, j)];
            nd.comp = 0;
            nd.i = i;
            nd.j = j;
            nd.native = center + cplx(-half_width + (i + 0.5) * c.h, -half_width + (j + 0.5) * c.h);
            nd.point = ExtPoint::at(nd.native);
            const bool edge = i == 0 || j == 0 || i == n - 1 || j == n - 1;
            nd.role = edge ? NodeRole::Dirichlet : NodeRole::Interior;
            g->quad_[c.index(i, j)] = c.h * c.h;
        }
    g->build_stencils();
    return g;
}

std::shared_ptr<const CompositeGrid> CompositeGrid::polar_annulus(double T_outer, double T_inner, int rows,
                                                                  int ntheta) {
    if (rows < 4 || ntheta < 4 || !(T_outer > T_inner)) throw GridError("degenerate polar annulus");
    auto g = std::make_shared<CompositeGrid>();
    Component c;
    c.kind = ChartKind::Polar;
    c.ntheta = ntheta;
    c.dtheta = kTwoPi / ntheta;
    for (int k = 0; k < rows; ++k) c.T.push_back(T_outer + (T_inner - T_outer) * k / (rows - 1));
    c.inner_row = rows - 1;
    g->comps_.push_back(c);
    g->nodes_.resize(static_cast<std::size_t>(rows) * ntheta);
    g->quad_.assign(g->nodes_.size(), 0.0);
    const double dT = (T_outer - T_inner) / (rows - 1);
    for (int k = 0; k < rows; ++k)
        for (int l = 0; l < ntheta; ++l) {
            Node& nd = g->nodes_[c.index(k, l)];
            nd.comp = 0;
            nd.i = k;
            nd.j = l;
            nd.native = std::exp(cplx(c.T[k], l * c.dtheta));
            nd.point = ExtPoint::at(nd.native);
            nd.role = (k == 0 || k == rows - 1) ? NodeRole::Dirichlet : NodeRole::Interior;
            const double trap = (k == 0 || k == rows - 1) ? 0.5 : 1.0;
            g->quad_[c.index(k, l)] = trap * dT * c.dtheta;
        }
    g->build_stencils();
    return g;
}

std::shared_ptr<const CompositeGrid> CompositeGrid::build(const ChartAtlas& atlas, double excision_T) {
    const GridParams& P = atlas.params();
    if (P.cartesian_n < 8 || P.ntheta < 8) throw GridError("grid resolution too small");
    if (P.active_radius + 2.0 * P.half_width / P.cartesian_n >= P.half_width)
        throw GridError("active disk does not fit inside the chart square");
    auto g = std::make_shared<CompositeGrid>();
    g->atlas_ = std::make_shared<ChartAtlas>(atlas);
    const auto& poles = g->atlas_->poles();

    int offset = 0;
    for (ChartKind kind : {ChartKind::North, ChartKind::South}) {
        Component c;
        c.kind = kind;
        c.n = P.cartesian_n;
        c.half_width = P.half_width;
        c.h = 2.0 * P.half_width / c.n;
        c.offset = offset;
        offset += c.n * c.n;
        g->comps_.push_back(c);
    }
    for (std::size_t j = 0; j < poles.size(); ++j) {
        Component c;
        c.kind = ChartKind::Polar;
        c.pole = static_cast<int>(j);
        c.ntheta = P.ntheta;
        c.dtheta = kTwoPi / P.ntheta;
        double T = std::log(poles[j].patch_radius);
        double step = P.log_step();
        while (true) {
            c.T.push_back(T);
            if (T <= P.T_min) break;
            if (T <= P.fine_T_min) step *= P.growth;
            T = std::max(T - step, P.T_min);
        }
        c.inner_row = static_cast<int>(c.T.size()) - 1;
        for (int k = 0; k < static_cast<int>(c.T.size()); ++k)
            if (c.T[k] <= excision_T) {
                c.inner_row = k;
                break;
            }
        if (c.inner_row < 4) throw GridError("excision radius leaves fewer than 4 rows in a pole patch");
        c.offset = offset;
        offset += static_cast<int>(c.T.size()) * c.ntheta;
        g->comps_.push_back(c);
    }
    g->nodes_.resize(offset);
    g->quad_.assign(offset, 0.0);

    // Sum of pole-patch weights at a sphere point, and whether it is in a hole.
    auto patch_cover = [&](const ExtPoint& pt, bool& in_hole) {
        double chi = 0.0;
        in_hole = false;
        for (const auto& pc : poles) {
            const auto zeta = pc.zeta_of(pt);
            if (!zeta) continue;
            if (*zeta == cplx{}) {
                in_hole = true;
                chi += 1.0;
                continue;
            }
            const auto w = pc.canonical_of(pt);
            if (!w) continue;
            const double rho = std::abs(*w);
            if (rho < pc.hole_radius) in_hole = true;
            chi += patch_weight(rho, pc.patch_radius);
        }
        return chi;
    };

    for (int ci = 0; ci < static_cast<int>(g->comps_.size()); ++ci) {
        const Component& c = g->comps_[ci];
        if (c.kind != ChartKind::Polar) {
            std::vector<char> active(static_cast<std::size_t>(c.n) * c.n, 0);
            for (int i = 0; i < c.n; ++i)
                for (int j = 0; j < c.n; ++j) {
                    Node& nd = g->nodes_[c.index(i, j)];
                    nd.comp = ci;
                    nd.i = i;
                    nd.j = j;
                    nd.native = cplx(-c.half_width + (i + 0.5) * c.h, -c.half_width + (j + 0.5) * c.h);
                    if (c.kind == ChartKind::North)
                        nd.point = ExtPoint::at(nd.native);
                    else
                        nd.point = nd.native == cplx{} ? ExtPoint::inf() : ExtPoint::at(1.0 / nd.native);
                    bool hole = false;
                    const double chi = patch_cover(nd.point, hole);
                    const double r = std::abs(nd.native);
                    active[i * c.n + j] = (r <= P.active_radius && !hole) ? 1 : 0;
                    if (active[i * c.n + j])
                        g->quad_[c.index(i, j)] = std::max(0.0, 1.0 - chi) * chart_weight(r) * c.h * c.h;
                }
            for (int i = 0; i < c.n; ++i)
                for (int j = 0; j < c.n; ++j) {
                    Node& nd = g->nodes_[c.index(i, j)];
                    if (active[i * c.n + j]) {
                        nd.role = NodeRole::Interior;
                        continue;
                    }
                    bool near = false;
                    const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
                    for (int q = 0; q < 4; ++q) {
                        const int a = i + di[q], b = j + dj[q];
                        if (a >= 0 && b >= 0 && a < c.n && b < c.n && active[a * c.n + b]) near = true;
                    }
                    nd.role = near ? NodeRole::Receiver : NodeRole::Unused;
                }
        } else {
            const PoleChart& pc = poles[c.pole];
            const int rows = c.rows();
            for (int k = 0; k < rows; ++k) {
                double dT = 0.0;
                if (k > 0 && k < c.inner_row) dT = 0.5 * (c.T[k - 1] - c.T[k + 1]);
                if (k == c.inner_row) dT = 0.5 * (c.T[k - 1] - c.T[k]);
                for (int l = 0; l < c.ntheta; ++l) {
                    Node& nd = g->nodes_[c.index(k, l)];
                    nd.comp = ci;
                    nd.i = k;
                    nd.j = l;
                    nd.native = std::exp(cplx(c.T[k], l * c.dtheta));
                    nd.point = pc.point_of(nd.native);
                    if (k == 0)
                        nd.role = NodeRole::Receiver;
                    else if (k < c.inner_row)
                        nd.role = NodeRole::Interior;
                    else if (k == c.inner_row)
                        nd.role = NodeRole::Dirichlet;
                    else
                        nd.role = NodeRole::Unused;
                    if (k <= c.inner_row)
                        g->quad_[c.index(k, l)] = patch_weight(std::exp(c.T[k]), pc.patch_radius) * dT * c.dtheta;
                }
            }
        }
    }
    g->build_stencils();
    return g;
}

void CompositeGrid::build_stencils() {
    lap_.assign(nodes_.size(), {});
    donors_.assign(nodes_.size(), {});
    for (const Component& c : comps_) {
        if (c.kind != ChartKind::Polar) {
            const double inv = 1.0 / (c.h * c.h);
            // One-sided second derivative on 4 points at the square edges.
            const double one_sided[4] = {2.0, -5.0, 4.0, -1.0};
            for (int i = 0; i < c.n; ++i)
                for (int j = 0; j < c.n; ++j) {
                    SparseRow& row = lap_[c.index(i, j)];
                    auto axis = [&](int pos, auto at) {
                        if (pos > 0 && pos < c.n - 1) {
                            row.idx.push_back(at(pos - 1)), row.w.push_back(inv);
                            row.idx.push_back(at(pos)), row.w.push_back(-2.0 * inv);
                            row.idx.push_back(at(pos + 1)), row.w.push_back(inv);
                        } else {
                            const int dir = pos == 0 ? 1 : -1;
                            for (int q = 0; q < 4; ++q)
                                row.idx.push_back(at(pos + dir * q)), row.w.push_back(one_sided[q] * inv);
                        }
                    };
                    // Sphere charts use the fourth-order cross wherever it
                    // only touches live nodes.
                    if (atlas_ && i >= 2 && j >= 2 && i < c.n - 2 && j < c.n - 2) {
                        bool live = true;
                        for (int q = -2; q <= 2; ++q)
                            live = live && nodes_[c.index(i + q, j)].role != NodeRole::Unused &&
                                   nodes_[c.index(i, j + q)].role != NodeRole::Unused;
                        if (live) {
                            static constexpr double w5[5] = {-1.0, 16.0, -30.0, 16.0, -1.0};
                            for (int q = -2; q <= 2; ++q) {
                                row.idx.push_back(c.index(i + q, j)), row.w.push_back(w5[q + 2] * inv / 12.0);
                                if (q != 0) row.idx.push_back(c.index(i, j + q)), row.w.push_back(w5[q + 2] * inv / 12.0);
                            }
                            row.w[4] *= 2.0;  // centre carries both axes
                            continue;
                        }
                    }
                    axis(i, [&](int a) { return c.index(a, j); });
                    axis(j, [&](int b) { return c.index(i, b); });
                }
        } else {
            const int last = c.inner_row;
            const double inv_t = 1.0 / (c.dtheta * c.dtheta);
            for (int k = 0; k <= last; ++k) {
                int k0 = k - 1, k1 = k + 1;
                if (k == 0) k0 = 0, k1 = 3;
                if (k == last) k0 = last - 3, k1 = last;
                std::vector<double> xs;
                for (int q = k0; q <= k1; ++q) xs.push_back(c.T[q]);
                const auto wt = fd_weights(c.T[k], xs, 2);
                for (int l = 0; l < c.ntheta; ++l) {
                    SparseRow& row = lap_[c.index(k, l)];
                    for (int q = k0; q <= k1; ++q) row.idx.push_back(c.index(q, l)), row.w.push_back(wt[q - k0]);
                    row.idx.push_back(c.index(k, (l + c.ntheta - 1) % c.ntheta)), row.w.push_back(inv_t);
                    row.idx.push_back(c.index(k, l)), row.w.push_back(-2.0 * inv_t);
                    row.idx.push_back(c.index(k, (l + 1) % c.ntheta)), row.w.push_back(inv_t);
                }
            }
        }
    }
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        if (nodes_[n].role != NodeRole::Receiver) continue;
        SparseRow row = locate(nodes_[n].point, nodes_[n].comp);
        if (row.idx.empty())
            throw GridError("no donor stencil for receiver node " + std::to_string(n) +
                            "; refine the grid or shrink the pole patches");
        donors_[n] = std::move(row);
    }
}

std::optional<SparseRow> CompositeGrid::cartesian_stencil(int comp, cplx native) const {
    const Component& c = comps_[comp];
    const cplx rel = native - c.center;
    const double sx = (rel.real() + c.half_width) / c.h - 0.5;
    const double sy = (rel.imag() + c.half_width) / c.h - 0.5;
    if (sx < 0.0 || sy < 0.0 || sx > c.n - 1 || sy > c.n - 1) return std::nullopt;
    const int i0 = std::clamp(static_cast<int>(std::floor(sx)) - 1, 0, c.n - 4);
    const int j0 = std::clamp(static_cast<int>(std::floor(sy)) - 1, 0, c.n - 4);
    const double xs[4] = {double(i0), double(i0 + 1), double(i0 + 2), double(i0 + 3)};
    const double ys[4] = {double(j0), double(j0 + 1), double(j0 + 2), double(j0 + 3)};
    const auto wx = fd_weights(sx, xs, 0);
    const auto wy = fd_weights(sy, ys, 0);
    SparseRow row;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const int idx = c.index(i0 + a, j0 + b);
            if (nodes_[idx].role == NodeRole::Unused) return std::nullopt;
            row.idx.push_back(idx);
            row.w.push_back(wx[a] * wy[b]);
        }
    return row;
}

std::optional<SparseRow> CompositeGrid::polar_stencil(int comp, double T, double theta) const {
    const Component& c = comps_[comp];
    const int last = c.inner_row;
    if (T > c.T[0] || T < c.T[last]) return std::nullopt;
    int k = 0;
    while (k + 1 < last && c.T[k + 1] > T) ++k;
    const int k0 = std::clamp(k - 1, 0, last - 3);
    std::vector<double> ts(c.T.begin() + k0, c.T.begin() + k0 + 4);
    const auto wt = fd_weights(T, ts, 0);
    const double s = wrap_angle(theta) / c.dtheta;
    const int l = static_cast<int>(std::floor(s));
    const double ls[4] = {double(l - 1), double(l), double(l + 1), double(l + 2)};
    const auto wl = fd_weights(s, ls, 0);
    SparseRow row;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
            const int idx = c.index(k0 + a, ((l - 1 + b) % c.ntheta + c.ntheta) % c.ntheta);
            if (nodes_[idx].role == NodeRole::Unused) return std::nullopt;
            row.idx.push_back(idx);
            row.w.push_back(wt[a] * wl[b]);
        }
    return row;
}

std::optional<SparseRow> CompositeGrid::stencil_in(int comp, const ExtPoint& P) const {
    const Component& c = comps_[comp];
    switch (c.kind) {
        case ChartKind::North:
            if (P.infinity) return std::nullopt;
            return cartesian_stencil(comp, P.z);
        case ChartKind::South:
            if (!P.infinity && P.z == cplx{}) return std::nullopt;
            return cartesian_stencil(comp, P.infinity ? cplx{} : 1.0 / P.z);
        case ChartKind::Polar: {
            std::optional<cplx> w;
            if (c.pole < 0) {
                if (!P.infinity) w = P.z;
            } else {
                w = atlas_->poles()[c.pole].canonical_of(P);
            }
            if (!w || *w == cplx{}) return std::nullopt;
            return polar_stencil(comp, std::log(std::abs(*w)), std::arg(*w));
        }
    }
    return std::nullopt;
}

SparseRow CompositeGrid::locate(const ExtPoint& P, int exclude_comp) const {
    SparseRow best;
    double best_score = std::numeric_limits<double>::infinity();
    for (int ci = 0; ci < static_cast<int>(comps_.size()); ++ci) {
        if (ci == exclude_comp) continue;
        auto row = stencil_in(ci, P);
        if (!row) continue;
        // Prefer stencils built from solved nodes, then pole patches, then the
        // chart whose centre is closest.
        double score = 0.0;
        for (int idx : row->idx)
            if (nodes_[idx].role == NodeRole::Receiver) score += 10.0;
        const Component& c = comps_[ci];
        if (c.kind == ChartKind::North) score += P.infinity ? 1e9 : std::abs(P.z);
        if (c.kind == ChartKind::South) score += P.infinity ? 0.0 : 1.0 / std::abs(P.z);
        if (score < best_score) {
            best_score = score;
            best = std::move(*row);
        }
    }
    return best;
}

double CompositeGrid::interpolate(std::span<const double> values, const ExtPoint& P) const {
    const SparseRow row = locate(P);
    if (row.idx.empty()) throw GridError("point not covered by the grid");
    double v = 0.0;
    for (std::size_t q = 0; q < row.idx.size(); ++q) v += row.w[q] * values[row.idx[q]];
    return v;
}

double CompositeGrid::jacobian(int node) const {
    const Component& c = component_of(node);
    return c.kind == ChartKind::Polar ? std::exp(2.0 * c.T[nodes_[node].i]) : 1.0;
}

double CompositeGrid::log_radius(int node) const {
    const Component& c = component_of(node);
    if (c.kind != ChartKind::Polar) throw GridError("log_radius of a Cartesian node");
    return c.T[nodes_[node].i];
}

int CompositeGrid::patch_of_pole(int pole) const {
    for (int ci = 0; ci < static_cast<int>(comps_.size()); ++ci)
        if (comps_[ci].kind == ChartKind::Polar && comps_[ci].pole == pole) return ci;
    return -1;
}

double CompositeGrid::inner_log_radius(int pole) const {
    const int ci = patch_of_pole(pole);
    if (ci < 0) throw GridError("no patch for pole " + std::to_string(pole));
    return comps_[ci].T[comps_[ci].inner_row];
}

}  // namespace sfcy
