#include "sfcy/blaschke.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "sfcy/errors.hpp"

namespace sfcy {

namespace {

constexpr double pi = std::numbers::pi;

// r(z)/z for a series with r(0) = 0, kept at the same length.
Series shift_down(const Series& r) {
    Series s(r.size());
    for (std::size_t i = 1; i < r.size(); ++i) s[i - 1] = r[i];
    return s;
}

Series padded(const Series& s, std::size_t length) { return s.truncated(length); }

}  // namespace

cplx LogSeries::value(cplx z, cplx logz) const { return log_part(z) * logz + plain(z); }

cplx LogSeries::d1(cplx z, cplx logz) const {
    return log_part.derivative_at(z) * logz + log_part(z) / z + plain.derivative_at(z);
}

cplx LogSeries::d2(cplx z, cplx logz) const {
    return log_part.second_derivative_at(z) * logz + 2.0 * log_part.derivative_at(z) / z - log_part(z) / (z * z) +
           plain.second_derivative_at(z);
}

LogSeries LogSeries::integral() const {
    const std::size_t n = std::max(log_part.size(), plain.size()) + 1;
    Series A(n), B(n);
    for (std::size_t i = 0; i < log_part.size(); ++i) {
        const double m = double(i + 1);
        A[i + 1] = log_part[i] / m;
        B[i + 1] -= log_part[i] / (m * m);
    }
    for (std::size_t i = 0; i < plain.size(); ++i) B[i + 1] += plain[i] / double(i + 1);
    return {A, B};
}

cplx log_on_sheet(cplx z, int sheet) { return std::log(z) + cplx(0.0, 2.0 * pi * sheet); }

HoloPair HoloPair::polynomial(Series f, Series g) {
    HoloPair p;
    p.F = {Series(std::size_t{1}), std::move(f)};
    p.G = {Series(std::size_t{1}), std::move(g)};
    return p;
}

double metric_from_fg(const HoloPair& p, cplx z, cplx logz, bool check) {
    const double m = 0.25 * (std::norm(p.G.d1(z, logz)) - std::norm(p.F.d1(z, logz)));
    if (check && !(m > 0.0)) throw MetricDegenerate("|dG| <= |dF| at the sample point");
    return m;
}

double metric_from_fg(const HoloPair& p, cplx z, int sheet) { return metric_from_fg(p, z, log_on_sheet(z, sheet)); }

cplx metric_log_derivative(const HoloPair& p, cplx z, cplx logz) {
    const cplx g1 = p.G.d1(z, logz), f1 = p.F.d1(z, logz);
    const cplx g2 = p.G.d2(z, logz), f2 = p.F.d2(z, logz);
    return (g2 * std::conj(g1) - f2 * std::conj(f1)) / (std::norm(g1) - std::norm(f1));
}

cplx cubic_from_fg(const HoloPair& p, cplx z, cplx logz) {
    return 0.25 * (p.G.d1(z, logz) * p.F.d2(z, logz) - p.F.d1(z, logz) * p.G.d2(z, logz));
}

cplx cubic_from_fg(const HoloPair& p, cplx z, int sheet) { return cubic_from_fg(p, z, log_on_sheet(z, sheet)); }

ModelData::ModelData(Series j, Series k, double tol) : j_(std::move(j)), k_(std::move(k)) {
    if (j_.size() == 0 || std::abs(j_[0]) == 0.0) throw ConstraintViolated("j(0) must be nonzero");
    const double r = constraint_residual();
    if (!(r <= tol)) throw ConstraintViolated("(1 + z k')j^2 + 16 pi has coefficient " + std::to_string(r));
}

double ModelData::constraint_residual() const {
    const std::size_t n = std::min(j_.size(), k_.size());
    const Series j = padded(j_, n);
    Series one_zk(n);
    const Series dk = k_.derivative();
    one_zk[0] = 1.0;
    for (std::size_t i = 1; i < n; ++i) one_zk[i] = dk[i - 1];
    const Series r = one_zk * (j * j);
    double mx = 0.0;
    for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, std::abs(r[i] + (i == 0 ? 16.0 * pi : 0.0)));
    return mx;
}

ModelData ModelData::from_j(const Series& j, cplx k0) {
    if (j.size() == 0) throw ConstraintViolated("empty j");
    const cplx obstruction = -16.0 * pi / (j[0] * j[0]) - 1.0;
    if (std::abs(obstruction) > 1e-12) throw ConstraintViolated("j(0)^2 != -16 pi, k' has a 1/z term");
    Series r = (j * j).reciprocal() * cplx(-16.0 * pi);
    r[0] = 0.0;  // the 1/z obstruction cancels exactly
    Series k = shift_down(r).integral();
    k[0] = k0;
    return ModelData(j, k);
}

ModelData ModelData::standard(std::size_t order, cplx k0) {
    Series j = Series::constant(cplx(0.0, 4.0 * std::sqrt(pi)), order);
    Series k = Series::constant(k0, order);
    return ModelData(j, k);
}

HoloPair model_fg(const ModelData& data) {
    const std::size_t n = std::min(data.j().size(), data.k().size());
    const Series j = padded(data.j(), n), k = padded(data.k(), n);
    const cplx s = -1.0 / (4.0 * pi);
    const Series P = j * s;
    const Series Q = (j * k) * s;
    Series Qf = Q;
    for (std::size_t i = 0; i < n; ++i) Qf[i] += j[i] * s * (4.0 * pi);
    HoloPair out;
    out.G = LogSeries{P, Q}.integral();
    out.F = LogSeries{P, Qf}.integral();
    return out;
}

HoloPair mirror(const HoloPair& p) { return {LogSeries{-p.F.log_part, -p.F.plain}, p.G}; }

AffinePoint affine_point(const HoloPair& p, cplx z, cplx logz) {
    const cplx G = p.G.value(z, logz), F = p.F.value(z, logz);
    return {0.5 * (G + F).real(), 0.5 * (G - F).imag(), 0.5 * (G - F).real(), 0.5 * (G + F).imag()};
}

ImmersionPatch ImmersionPatch::sized(int nx, int ny, double x0, double y0, double dx, double dy) {
    ImmersionPatch p;
    p.nx = nx, p.ny = ny, p.x0 = x0, p.y0 = y0, p.dx = dx, p.dy = dy;
    const std::size_t n = std::size_t(nx) * ny;
    p.a1.assign(n, 0.0), p.a2.assign(n, 0.0), p.phi.assign(n, 0.0), p.b1.assign(n, 0.0), p.b2.assign(n, 0.0);
    return p;
}

namespace {

// Centered first differences of a node array (second order).
template <class T>
T ddx(const ImmersionPatch& p, const std::vector<T>& v, int i, int j) {
    return (v[p.index(i + 1, j)] - v[p.index(i - 1, j)]) / (2.0 * p.dx);
}
template <class T>
T ddy(const ImmersionPatch& p, const std::vector<T>& v, int i, int j) {
    return (v[p.index(i, j + 1)] - v[p.index(i, j - 1)]) / (2.0 * p.dy);
}

void require_grid(const ImmersionPatch& p, int min_side) {
    if (p.nx < min_side || p.ny < min_side) throw ConfigError("immersion patch needs at least " +
                                                              std::to_string(min_side) + " nodes per side");
}

}  // namespace

FGSamples fg_from_immersion(const ImmersionPatch& patch, double budget) {
    require_grid(patch, 3);
    FGSamples out;
    const std::size_t n = patch.size();
    out.F.resize(n), out.G.resize(n);
    for (std::size_t q = 0; q < n; ++q) {
        out.G[q] = {patch.a1[q] + patch.b1[q], patch.a2[q] + patch.b2[q]};
        out.F[q] = {patch.a1[q] - patch.b1[q], -patch.a2[q] + patch.b2[q]};
    }
    const cplx I(0.0, 1.0);
    double dz_max = 0.0, dzbar_max = 0.0;
    out.min_gap = INFINITY;
    for (int j = 1; j + 1 < patch.ny; ++j)
        for (int i = 1; i + 1 < patch.nx; ++i) {
            const cplx gx = ddx(patch, out.G, i, j), gy = ddy(patch, out.G, i, j);
            const cplx fx = ddx(patch, out.F, i, j), fy = ddy(patch, out.F, i, j);
            const cplx gz = 0.5 * (gx - I * gy), fz = 0.5 * (fx - I * fy);
            dz_max = std::max(dz_max, std::abs(gz));
            dzbar_max = std::max({dzbar_max, std::abs(0.5 * (gx + I * gy)), std::abs(0.5 * (fx + I * fy))});
            out.min_gap = std::min(out.min_gap, std::abs(gz) - std::abs(fz));
        }
    out.cr_residual = dz_max > 0.0 ? dzbar_max / dz_max : INFINITY;
    if (!(out.cr_residual <= budget))
        throw NotHolomorphic("Cauchy-Riemann residual " + std::to_string(out.cr_residual));
    if (!(out.min_gap > 0.0)) throw NotHolomorphic("|dG| > |dF| fails on the patch");
    return out;
}

LegendreData legendre(const ImmersionPatch& patch) {
    require_grid(patch, 3);
    LegendreData out{patch.b1, patch.b2, std::vector<double>(patch.size())};
    for (std::size_t q = 0; q < patch.size(); ++q)
        out.chi[q] = patch.b1[q] * patch.a1[q] + patch.b2[q] * patch.a2[q] - patch.phi[q];
    for (int j = 1; j + 1 < patch.ny; ++j)
        for (int i = 1; i + 1 < patch.nx; ++i) {
            Eigen::Matrix2d Da, Db;
            Da << ddx(patch, patch.a1, i, j), ddy(patch, patch.a1, i, j), ddx(patch, patch.a2, i, j),
                ddy(patch, patch.a2, i, j);
            Db << ddx(patch, patch.b1, i, j), ddy(patch, patch.b1, i, j), ddx(patch, patch.b2, i, j),
                ddy(patch, patch.b2, i, j);
            if (std::abs(Da.determinant()) < 1e-300) throw ConvexityFailure("affine coordinates degenerate");
            const Eigen::Matrix2d H = Db * Da.inverse();
            const Eigen::Matrix2d S = 0.5 * (H + H.transpose());
            if (!(S(0, 0) > 0.0 && S.determinant() > 0.0))
                throw ConvexityFailure("Hessian not positive definite at node (" + std::to_string(i) + ", " +
                                       std::to_string(j) + ")");
        }
    return out;
}

double legendre_fg_mismatch(const ImmersionPatch& patch, const FGSamples& fg) {
    double mx = 0.0;
    for (std::size_t q = 0; q < patch.size(); ++q) {
        const cplx G = fg.G[q], F = fg.F[q];
        mx = std::max({mx, std::abs(patch.b1[q] - 0.5 * (G - F).real()), std::abs(patch.b2[q] - 0.5 * (G + F).imag())});
    }
    return mx;
}

namespace {

Eigen::Matrix2d matrix_of(const GaugeElement& g) {
    Eigen::Matrix2d A;
    A << g.A[0][0], g.A[0][1], g.A[1][0], g.A[1][1];
    return A;
}

}  // namespace

ImmersionPatch gauge_action(const ImmersionPatch& patch, const GaugeElement& g) {
    const Eigen::Matrix2d A = matrix_of(g);
    const Eigen::Matrix2d Ainv = A.inverse();
    const Eigen::RowVector2d b(g.b[0], g.b[1]);
    const Eigen::Vector2d c(g.c[0], g.c[1]);
    ImmersionPatch out = patch;
    for (std::size_t q = 0; q < patch.size(); ++q) {
        const Eigen::RowVector2d a(patch.a1[q], patch.a2[q]);
        const Eigen::RowVector2d at = a * A + b;
        const Eigen::Vector2d bt = Ainv * (Eigen::Vector2d(patch.b1[q], patch.b2[q]) + c);
        out.a1[q] = at[0], out.a2[q] = at[1];
        out.phi[q] = patch.phi[q] + a * c + g.d;
        out.b1[q] = bt[0], out.b2[q] = bt[1];
    }
    return out;
}

double gauge_law_residual(const ImmersionPatch& patch, const GaugeElement& g) {
    const Eigen::Matrix2d Ainv = matrix_of(g).inverse();
    const Eigen::RowVector2d b(g.b[0], g.b[1]);
    const Eigen::Vector2d c(g.c[0], g.c[1]);
    const LegendreData before = legendre(patch);
    const LegendreData after = legendre(gauge_action(patch, g));
    double mx = 0.0;
    for (std::size_t q = 0; q < patch.size(); ++q) {
        const Eigen::Vector2d beta(before.beta1[q], before.beta2[q]);
        const Eigen::Vector2d bt = Ainv * beta + Ainv * c;
        const double chit = b * Ainv * beta + before.chi[q] + b * Ainv * c - g.d;
        mx = std::max({mx, std::abs(after.beta1[q] - bt[0]), std::abs(after.beta2[q] - bt[1]),
                       std::abs(after.chi[q] - chit)});
    }
    return mx;
}

HessianStats hessian_determinant_check(const ImmersionPatch& patch) {
    require_grid(patch, 5);
    auto d4 = [&](const std::vector<double>& v, int i, int j, int di, int dj, double h) {
        return (-v[patch.index(i + 2 * di, j + 2 * dj)] + 8.0 * v[patch.index(i + di, j + dj)] -
                8.0 * v[patch.index(i - di, j - dj)] + v[patch.index(i - 2 * di, j - 2 * dj)]) /
               (12.0 * h);
    };
    HessianStats st;
    double sum = 0.0;
    int orientation = 0;
    for (int j = 2; j + 2 < patch.ny; ++j)
        for (int i = 2; i + 2 < patch.nx; ++i) {
            Eigen::Matrix2d Da, Db;
            Da << d4(patch.a1, i, j, 1, 0, patch.dx), d4(patch.a1, i, j, 0, 1, patch.dy),
                d4(patch.a2, i, j, 1, 0, patch.dx), d4(patch.a2, i, j, 0, 1, patch.dy);
            Db << d4(patch.b1, i, j, 1, 0, patch.dx), d4(patch.b1, i, j, 0, 1, patch.dy),
                d4(patch.b2, i, j, 1, 0, patch.dx), d4(patch.b2, i, j, 0, 1, patch.dy);
            const double da = Da.determinant();
            const double scale = Da.cwiseAbs().maxCoeff();
            if (!(std::abs(da) > 1e-10 * scale * scale)) throw FoldDetected("developing map degenerate in the patch");
            const int s = da > 0.0 ? 1 : -1;
            if (orientation == 0) orientation = s;
            if (s != orientation) throw FoldDetected("developing map changes orientation in the patch");
            const double r = std::abs(Db.determinant() / da - 1.0);
            st.max_residual = std::max(st.max_residual, r);
            sum += r;
            ++st.nodes;
        }
    st.mean_residual = st.nodes > 0 ? sum / st.nodes : 0.0;
    return st;
}

}  // namespace sfcy

namespace sfcy {

namespace {

// Running integral of samples spaced h apart, fourth order in the interior.
std::vector<double> cumulative(const std::vector<double>& f, double h) {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        double piece;
        if (n < 4) {
            piece = 0.5 * h * (f[k] + f[k + 1]);
        } else if (k == 0) {
            piece = h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
        } else if (k + 2 >= n) {
            piece = h / 24.0 * (9.0 * f[k + 1] + 19.0 * f[k] - 5.0 * f[k - 1] + f[k - 2]);
        } else {
            piece = h / 24.0 * (-f[k - 1] + 13.0 * f[k] + 13.0 * f[k + 1] - f[k + 2]);
        }
        out[k + 1] = out[k] + piece;
    }
    return out;
}

}  // namespace

ImmersionPatch patch_from_fg(const HoloPair& p, int nx, int ny, double x0, double y0, double dx, double dy) {
    ImmersionPatch out = ImmersionPatch::sized(nx, ny, x0, y0, dx, dy);
    const cplx I(0.0, 1.0);
    std::vector<double> phx(out.size()), phy(out.size());
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const int q = out.index(i, j);
            const cplx s(x0 + i * dx, y0 + j * dy);
            const cplx z = std::exp(I * s), L = I * s;
            const AffinePoint a = affine_point(p, z, L);
            out.a1[q] = a.a1, out.a2[q] = a.a2, out.b1[q] = a.b1, out.b2[q] = a.b2;
            // d/dx = iz d/dz, d/dy = −z d/dz on holomorphic functions of z = e^{is}
            const cplx sum = (p.G.d1(z, L) + p.F.d1(z, L)), diff = (p.G.d1(z, L) - p.F.d1(z, L));
            for (int axis = 0; axis < 2; ++axis) {
                const cplx dz = axis == 0 ? I * z : -z;
                const double a1d = 0.5 * (sum * dz).real(), a2d = 0.5 * (diff * dz).imag();
                (axis == 0 ? phx : phy)[q] = a.b1 * a1d + a.b2 * a2d;
            }
        }
    std::vector<double> col(ny);
    for (int j = 0; j < ny; ++j) col[j] = phy[out.index(0, j)];
    const auto base = cumulative(col, dy);
    const double phi0 = out.a1[0] * out.b1[0] + out.a2[0] * out.b2[0];
    std::vector<double> row(nx);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) row[i] = phx[out.index(i, j)];
        const auto run = cumulative(row, dx);
        for (int i = 0; i < nx; ++i) out.phi[out.index(i, j)] = phi0 + base[j] + run[i];
    }
    return out;
}

}  // namespace sfcy
