#include "sfcy/developing.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "sfcy/errors.hpp"

namespace sfcy {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
const cplx I(0.0, 1.0);

Eigen::Vector2d transverse(const Eigen::Vector3d& v) { return {v[0], v[1]}; }

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a[0] * b[1] - a[1] * b[0]; }

}  // namespace

// ---------------------------------------------------------------- data sources

double ModelLogChart::psi(cplx s) const {
    const double y = s.imag();
    return y > 0.0 ? std::log(2.0 * y) - 2.0 * y : NAN;
}

cplx ModelLogChart::psi_s(cplx s) const { return -0.5 * I * (1.0 / s.imag() - 2.0); }

cplx ModelLogChart::cubic(cplx s) const { return -I * std::exp(2.0 * I * s); }

double BlaschkeLogChart::psi(cplx s) const {
    const cplx z = std::exp(I * s);
    const double m = metric_from_fg(pair_, z, I * s, false);
    return m > 0.0 ? std::log(m) - 2.0 * s.imag() : NAN;
}

cplx BlaschkeLogChart::psi_s(cplx s) const {
    const cplx z = std::exp(I * s);
    return I * z * metric_log_derivative(pair_, z, I * s) + I;
}

cplx BlaschkeLogChart::cubic(cplx s) const {
    const cplx z = std::exp(I * s);
    return -I * z * z * z * cubic_from_fg(pair_, z, I * s);
}

SolvedLogChart::SolvedLogChart(const Solution& sol, int pole) {
    const CompositeGrid& g = *sol.grid;
    const int ci = g.patch_of_pole(pole);
    if (ci < 0) throw GridError("no patch for pole " + std::to_string(pole));
    const Component& c = g.components()[ci];
    const int rows = c.inner_row + 1;
    if (rows < 4) throw GridError("patch too shallow for interpolation");
    ntheta_ = c.ntheta;
    dtheta_ = c.dtheta;
    y_.resize(rows);
    g_.resize(std::size_t(rows) * ntheta_);
    for (int k = 0; k < rows; ++k) {
        y_[k] = -c.T[k];
        for (int l = 0; l < ntheta_; ++l) {
            const int n = c.index(k, l);
            if (g.nodes()[n].role == NodeRole::Unused) throw GridError("unused node inside the pole patch");
            g_[std::size_t(k) * ntheta_ + l] = sol.u[n] + std::log(sol.h.lambda[n] / (2.0 * y_[k]));
        }
    }
    slope_w_.resize(3 * rows);
    slope_i_.resize(rows);
    for (int k = 0; k < rows; ++k) {
        const int first = std::clamp(k - 1, 0, rows - 3);
        const double xs[3] = {y_[first], y_[first + 1], y_[first + 2]};
        const auto w = fd_weights(y_[k], xs, 1);
        slope_i_[k] = first;
        for (int a = 0; a < 3; ++a) slope_w_[3 * k + a] = w[a];
    }
}

void SolvedLogChart::eval(cplx s, double& g, double& gx, double& gy) const {
    const double y = s.imag();
    const int rows = static_cast<int>(y_.size());
    if (!(y >= y_.front() && y <= y_.back())) throw GridError("log-chart point outside the pole patch");
    const int k = std::clamp(int(std::upper_bound(y_.begin(), y_.end(), y) - y_.begin()) - 1, 0, rows - 2);
    const double h = y_[k + 1] - y_[k], t = (y - y_[k]) / h;
    // cubic Hermite in y with three-point slopes: weights on up to six rows
    const double b[4] = {2 * t * t * t - 3 * t * t + 1, t * t * t - 2 * t * t + t, -2 * t * t * t + 3 * t * t,
                         t * t * t - t * t};
    const double db[4] = {6 * t * t - 6 * t, 3 * t * t - 4 * t + 1, -6 * t * t + 6 * t, 3 * t * t - 2 * t};
    std::array<double, 8> wy{}, dwy{};
    const int r0 = std::max(0, k - 2);
    auto add = [&](int row, double w, double dw) {
        wy[row - r0] += w;
        dwy[row - r0] += dw;
    };
    add(k, b[0], db[0] / h);
    add(k + 1, b[2], db[2] / h);
    for (int a = 0; a < 3; ++a) {
        add(slope_i_[k] + a, b[1] * h * slope_w_[3 * k + a], db[1] * slope_w_[3 * k + a]);
        add(slope_i_[k + 1] + a, b[3] * h * slope_w_[3 * (k + 1) + a], db[3] * slope_w_[3 * (k + 1) + a]);
    }
    // Catmull-Rom in the periodic angle
    double xa = std::fmod(s.real(), two_pi);
    if (xa < 0.0) xa += two_pi;
    const double q = xa / dtheta_;
    int l = static_cast<int>(std::floor(q));
    const double u = q - l;
    const double cr[4] = {0.5 * (-u * u * u + 2 * u * u - u), 0.5 * (3 * u * u * u - 5 * u * u + 2),
                          0.5 * (-3 * u * u * u + 4 * u * u + u), 0.5 * (u * u * u - u * u)};
    const double dcr[4] = {0.5 * (-3 * u * u + 4 * u - 1), 0.5 * (9 * u * u - 10 * u),
                           0.5 * (-9 * u * u + 8 * u + 1), 0.5 * (3 * u * u - 2 * u)};
    g = gx = gy = 0.0;
    for (int r = 0; r < 8; ++r) {
        if (wy[r] == 0.0 && dwy[r] == 0.0) continue;
        const double* row = &g_[std::size_t(r0 + r) * ntheta_];
        double v = 0.0, vx = 0.0;
        for (int a = 0; a < 4; ++a) {
            const int col = ((l - 1 + a) % ntheta_ + ntheta_) % ntheta_;
            v += cr[a] * row[col];
            vx += dcr[a] * row[col];
        }
        g += wy[r] * v;
        gy += dwy[r] * v;
        gx += wy[r] * vx / dtheta_;
    }
}

double SolvedLogChart::psi(cplx s) const {
    double g, gx, gy;
    eval(s, g, gx, gy);
    const double y = s.imag();
    return g + std::log(2.0 * y) - 2.0 * y;
}

cplx SolvedLogChart::psi_s(cplx s) const {
    double g, gx, gy;
    eval(s, g, gx, gy);
    const double y = s.imag();
    return 0.5 * cplx(gx, -(gy + 1.0 / y - 2.0));
}

cplx SolvedLogChart::cubic(cplx s) const { return -I * std::exp(2.0 * I * s); }

// ---------------------------------------------------------------- frames

cplx FrameState::det() const { return 2.0 * I * std::imag(fz[0] * std::conj(fz[1])); }

double FrameState::det_drift(double psi) const { return std::abs(det() * std::exp(-psi) - 0.5 * I); }

FrameState init_frame(double psi, const std::optional<Vector3c>& seed, const Eigen::Vector3d& position) {
    if (!std::isfinite(psi)) throw DegenerateSeed("psi is not finite at the base point");
    Vector3c v = seed ? *seed : Vector3c(1.0, -I, 0.0);
    const double d = std::imag(v[0] * std::conj(v[1]));
    if (!(d > 1e-12 * v.squaredNorm())) throw DegenerateSeed("seed does not span an oriented tangent plane");
    FrameState fs;
    fs.fz = v * std::sqrt(std::exp(psi) / (4.0 * d));
    fs.f = position;
    return fs;
}

Path segment(cplx a, cplx b) {
    return {[a, b](double t) { return a + t * (b - a); }, [a, b](double) { return b - a; }, std::abs(b - a)};
}

Path horizontal_loop(double x0, double y, double turns) {
    const double L = two_pi * turns;
    return segment(cplx(x0, y), cplx(x0 + L, y));
}

Path circle(cplx c, double r, double a0) {
    return {[c, r, a0](double t) { return c + std::polar(r, a0 + two_pi * t); },
            [r, a0](double t) { return I * two_pi * std::polar(r, a0 + two_pi * t); }, two_pi * r};
}

namespace {

struct Rhs {
    Vector3c dv;
    Eigen::Vector3d df;
};

Rhs rhs(const FrameData& data, cplx s, cplx sdot, const Vector3c& v) {
    const double psi = data.psi(s);
    const cplx a = data.psi_s(s), U = data.cubic(s);
    if (!std::isfinite(psi) || !std::isfinite(a.real()) || !std::isfinite(a.imag()) || !std::isfinite(U.real()))
        throw StepUnderflow("frame data singular on the path");
    Rhs r;
    r.dv = sdot * (a * v + U * std::exp(-psi) * v.conjugate());
    r.dv[2] += 0.5 * std::conj(sdot) * std::exp(psi);
    r.df = 2.0 * (sdot * v).real();
    return r;
}

double connection_norm(const FrameData& data, cplx s) {
    const double psi = data.psi(s);
    return std::abs(data.psi_s(s)) + std::abs(data.cubic(s)) * std::exp(-psi) + 0.5 * std::exp(psi);
}

}  // namespace

TransportResult transport(const FrameState& start, const Path& path, const FrameData& data,
                          const TransportOptions& options) {
    double amax = 0.0;
    for (int k = 0; k <= 64; ++k) {
        const double a = connection_norm(data, path.at(k / 64.0));
        if (!std::isfinite(a)) throw StepUnderflow("frame data singular on the path");
        amax = std::max(amax, a);
    }
    const double need = std::max(path.length / options.max_step, path.length * amax / 0.1);
    if (need > 5e7) throw StepUnderflow("step would fall below the path length / 5e7");
    int N = std::max(options.min_steps, static_cast<int>(std::ceil(need)));
    int stride = options.record_stride;
    if (options.samples > 0) {
        N = ((N + options.samples - 1) / options.samples) * options.samples;
        stride = N / options.samples;
    }

    TransportResult out;
    FrameState st = start;
    const double dt = 1.0 / N;
    auto record = [&](int k) {
        if (stride > 0 && k % stride == 0) {
            out.t.push_back(k * dt);
            out.states.push_back(st);
        }
    };
    out.max_det_drift = st.det_drift(data.psi(path.at(0.0)));
    record(0);
    for (int k = 0; k < N; ++k) {
        const double t = k * dt;
        const cplx s0 = path.at(t), sm = path.at(t + 0.5 * dt), s1 = path.at(t + dt);
        const cplx v0 = path.velocity(t), vm = path.velocity(t + 0.5 * dt), v1 = path.velocity(t + dt);
        const Rhs k1 = rhs(data, s0, v0, st.fz);
        const Rhs k2 = rhs(data, sm, vm, st.fz + 0.5 * dt * k1.dv);
        const Rhs k3 = rhs(data, sm, vm, st.fz + 0.5 * dt * k2.dv);
        const Rhs k4 = rhs(data, s1, v1, st.fz + dt * k3.dv);
        st.fz += dt / 6.0 * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
        st.f += dt / 6.0 * (k1.df + 2.0 * k2.df + 2.0 * k3.df + k4.df);
        out.max_det_drift = std::max(out.max_det_drift, st.det_drift(data.psi(s1)));
        record(k + 1);
    }
    out.end = st;
    out.steps = N;
    return out;
}

Eigen::Matrix3d transport_matrix(const FrameData& data, cplx s, cplx dir) {
    const double e = std::exp(data.psi(s));
    const cplx A1 = dir * data.psi_s(s), B1 = dir * data.cubic(s) / e;
    Eigen::Matrix3d A = Eigen::Matrix3d::Zero();
    A(1, 0) = dir.real() * e;
    A(1, 1) = A1.real() + B1.real();
    A(1, 2) = A1.imag() - B1.imag();
    A(2, 0) = dir.imag() * e;
    A(2, 1) = -A1.imag() - B1.imag();
    A(2, 2) = A1.real() - B1.real();
    return A;
}

// ---------------------------------------------------------------- holonomy

AffineMap2 AffineMap2::inverse() const {
    AffineMap2 r;
    r.linear = linear.inverse();
    r.translation = -r.linear * translation;
    return r;
}

AffineMap2 AffineMap2::conjugated_by(const AffineMap2& g) const {
    const AffineMap2 gi = g.inverse();
    AffineMap2 r;
    r.linear = g.linear * linear * gi.linear;
    r.translation = g.linear * (linear * gi.translation + translation) + g.translation;
    return r;
}

namespace {

struct BaseCoords {
    Eigen::Matrix2d E;
    Eigen::Matrix2d Einv;
    Eigen::Vector2d origin;
    double condition = 0.0;

    explicit BaseCoords(const FrameState& base) {
        E.col(0) = transverse(base.fx());
        E.col(1) = transverse(base.fy());
        Eigen::JacobiSVD<Eigen::Matrix2d> svd(E);
        condition = svd.singularValues()[0] / svd.singularValues()[1];
        if (!(condition < 1e8)) throw IllConditioned("base frame condition number " + std::to_string(condition));
        Einv = E.inverse();
        origin = transverse(base.f);
    }
    Eigen::Vector2d point(const FrameState& s) const { return Einv * (transverse(s.f) - origin); }
};

HolonomyResult holonomy_between(const FrameState& base, const TransportResult& tr) {
    const BaseCoords bc(base);
    HolonomyResult out;
    Eigen::Matrix2d E1;
    E1.col(0) = transverse(tr.end.fx());
    E1.col(1) = transverse(tr.end.fy());
    out.map.linear = bc.Einv * E1;
    out.map.translation = bc.point(tr.end);
    out.det_drift = tr.max_det_drift;
    out.condition = bc.condition;
    out.loop = tr;
    out.base = base;
    return out;
}

}  // namespace

HolonomyResult loop_holonomy(const FrameData& data, const Path& loop, const TransportOptions& options) {
    const FrameState base = init_frame(data.psi(loop.at(0.0)));
    return holonomy_between(base, transport(base, loop, data, options));
}

HolonomyResult holonomy(const FrameData& data, double y, double x0, const TransportOptions& options) {
    TransportOptions o = options;
    if (o.record_stride == 0) o.record_stride = 1;
    HolonomyResult r = loop_holonomy(data, horizontal_loop(x0, y), o);
    r.y = y;
    r.x0 = x0;
    return r;
}

std::string to_string(HolonomyTag tag) {
    switch (tag) {
        case HolonomyTag::Identity: return "Identity";
        case HolonomyTag::PureTranslation: return "PureTranslation";
        case HolonomyTag::ParabolicWithFixedPoint: return "ParabolicWithFixedPoint";
        case HolonomyTag::ParabolicNoFixedPoint: return "ParabolicNoFixedPoint";
    }
    return "?";
}

ClassifyThresholds calibrated_thresholds(double noise_floor) {
    ClassifyThresholds t;
    t.nilpotent = t.translation = std::max(1e2 * noise_floor, 1e-9);
    return t;
}

HolonomyClass classify(const AffineMap2& map, const ClassifyThresholds& th) {
    const Eigen::Matrix2d& P = map.linear;
    const Eigen::Vector2d& t = map.translation;
    HolonomyClass c;
    const double tr = P.trace(), det = P.determinant();
    const std::complex<double> root = std::sqrt(std::complex<double>(0.25 * tr * tr - det));
    c.eig1 = 0.5 * tr + root;
    c.eig2 = 0.5 * tr - root;
    c.eig_deviation = std::max(std::abs(c.eig1 - 1.0), std::abs(c.eig2 - 1.0));
    if (!(c.eig_deviation <= th.unipotent))
        throw NotUnipotent("eigenvalues deviate from 1 by " + std::to_string(c.eig_deviation));
    const Eigen::Matrix2d N = P - Eigen::Matrix2d::Identity();
    c.nilpotent_norm = N.norm();
    c.translation_norm = t.norm();
    if (c.nilpotent_norm <= th.nilpotent) {
        c.off_range = c.translation_norm;
        if (c.translation_norm <= th.translation) {
            c.tag = HolonomyTag::Identity;
            c.fixed_point = Eigen::Vector2d::Zero();
        } else {
            c.tag = HolonomyTag::PureTranslation;
        }
        return c;
    }
    const Eigen::Vector2d col = N.col(0).norm() >= N.col(1).norm() ? N.col(0) : N.col(1);
    const Eigen::Vector2d dir = col.normalized();
    c.off_range = std::abs(cross2(dir, t));
    if (c.off_range <= th.translation) {
        c.tag = HolonomyTag::ParabolicWithFixedPoint;
        Eigen::JacobiSVD<Eigen::Matrix2d> svd(N, Eigen::ComputeFullU | Eigen::ComputeFullV);
        svd.setThreshold(1e-6);
        c.fixed_point = svd.solve(-t);
    } else {
        c.tag = HolonomyTag::ParabolicNoFixedPoint;
    }
    return c;
}

// ---------------------------------------------------------------- ends

DevInfinity dev_infinity(const FrameData& data, double x0, double y0, double tol, const TransportOptions& options) {
    const FrameState base = init_frame(data.psi(cplx(x0, y0)));
    const BaseCoords bc(base);
    TransportOptions o = options;
    o.samples = 6;
    const TransportResult tr = transport(base, segment(cplx(x0, y0), cplx(x0, y0 + 30.0)), data, o);
    const Eigen::Vector2d d20 = bc.point(tr.states[4]), d25 = bc.point(tr.states[5]), d30 = bc.point(tr.states[6]);
    const double q = std::exp(-5.0);
    const Eigen::Vector2d r1 = (d25 - q * d20) / (1.0 - q), r2 = (d30 - q * d25) / (1.0 - q);
    DevInfinity out;
    out.point = r2;
    out.spread = (r1 - r2).norm();
    out.det_drift = tr.max_det_drift;
    if (!(out.spread <= tol)) throw NoConvergence("dev(inf) extrapolants differ by " + std::to_string(out.spread));
    return out;
}

DecayFit decay_rate(const FrameData& data, double x0, double y1, double y2, const TransportOptions& options) {
    const FrameState base = init_frame(data.psi(cplx(x0, y1)));
    TransportOptions o = options;
    o.samples = std::max(4, static_cast<int>(std::ceil((y2 - y1) / 0.1)));
    const TransportResult tr = transport(base, segment(cplx(x0, y1), cplx(x0, y2)), data, o);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(tr.states.size());
    for (int k = 0; k < n; ++k) {
        const double y = y1 + tr.t[k] * (y2 - y1);
        const double v = std::log(transverse(tr.states[k].fy()).norm());
        sx += y, sy += v, sxx += y * y, sxy += y * v;
    }
    DecayFit fit;
    fit.samples = n;
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

double winding_of_polyline(const std::vector<Eigen::Vector2d>& pts, const Eigen::Vector2d& center) {
    double total = 0.0;
    const std::size_t n = pts.size();
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::Vector2d a = pts[k] - center, b = pts[(k + 1) % n] - center;
        total += std::atan2(cross2(a, b), a.dot(b));
    }
    return total / two_pi;
}

WindingResult winding_number(const HolonomyResult& hol, const Eigen::Vector2d& dev_inf,
                             const ClassifyThresholds& thresholds) {
    const Eigen::Matrix2d P = hol.map.linear;
    const Eigen::Matrix2d N = P - Eigen::Matrix2d::Identity();
    if (!(N.norm() > thresholds.nilpotent)) throw IllConditioned("holonomy has no distinguished invariant line");
    const Eigen::Vector2d line = (N.col(0).norm() >= N.col(1).norm() ? N.col(0) : N.col(1)).normalized();

    const BaseCoords bc(hol.base);
    const auto& states = hol.loop.states;
    const int n = static_cast<int>(states.size());
    if (n < 3) throw IllConditioned("loop was not recorded");
    std::vector<Eigen::Vector2d> c(n);
    double scale = 0.0;
    for (int k = 0; k < n; ++k) {
        c[k] = bc.point(states[k]) - dev_inf;
        scale = std::max(scale, c[k].norm());
    }
    const double dx = two_pi / (n - 1);
    int best = -1;
    double best_slope = 0.0;
    for (int k = 0; k + 1 < n; ++k) {
        const double s0 = cross2(line, c[k]), s1 = cross2(line, c[k + 1]);
        if ((s0 > 0.0) == (s1 > 0.0) && s0 != 0.0) continue;
        const double slope = std::abs(s1 - s0) / dx / scale;
        if (slope > best_slope) best_slope = slope, best = k;
    }
    WindingResult out;
    if (best < 0) return out;  // misses the invariant line
    out.crossing_slope = best_slope;
    if (best_slope < 1e-3) throw TangentialCrossing("developed loop only touches the invariant line");
    const double s0 = cross2(line, c[best]), s1 = cross2(line, c[best + 1]);
    const double theta = s0 == s1 ? 0.0 : s0 / (s0 - s1);
    const Eigen::Vector2d cstar = c[best] + theta * (c[best + 1] - c[best]);
    out.start_x = hol.x0 + (best + theta) * dx;
    out.curve.push_back(cstar);
    for (int k = best + 1; k < n; ++k) out.curve.push_back(c[k]);
    // second turn: dev(x + 2π) − dev(∞) = P (dev(x) − dev(∞))
    for (int k = 1; k <= best; ++k) out.curve.push_back(P * c[k]);
    out.raw = winding_of_polyline(out.curve);
    out.winding = static_cast<int>(std::lround(out.raw));
    return out;
}

// ---------------------------------------------------------------- Monge–Ampère

ImmersionPatch transported_patch(const FrameData& data, int nx, int ny, double x0, double y0, double dx, double dy,
                                 double* det_drift, const TransportOptions& options) {
    ImmersionPatch p = ImmersionPatch::sized(nx, ny, x0, y0, dx, dy);
    const FrameState base = init_frame(data.psi(cplx(x0, y0)));
    double drift = 0.0;
    auto along = [&](const FrameState& from, cplx a, cplx b, int cells) {
        TransportOptions o = options;
        o.samples = cells;
        TransportResult tr = transport(from, segment(a, b), data, o);
        if (static_cast<int>(tr.states.size()) != cells + 1) throw StepUnderflow("transport refined off the sample grid");
        drift = std::max(drift, tr.max_det_drift);
        return tr.states;
    };
    const auto column = along(base, cplx(x0, y0), cplx(x0, y0 + (ny - 1) * dy), ny - 1);
    for (int j = 0; j < ny; ++j) {
        const double y = y0 + j * dy;
        const auto row = along(column[j], cplx(x0, y), cplx(x0 + (nx - 1) * dx, y), nx - 1);
        for (int i = 0; i < nx; ++i) {
            const FrameState& s = row[i];
            const int q = p.index(i, j);
            const Eigen::Vector3d fx = s.fx(), fy = s.fy();
            Eigen::Matrix2d J;
            J << fx[0], fx[1], fy[0], fy[1];
            const Eigen::Vector2d beta = J.partialPivLu().solve(Eigen::Vector2d(fx[2], fy[2]));
            p.a1[q] = s.f[0], p.a2[q] = s.f[1], p.phi[q] = s.f[2];
            p.b1[q] = beta[0], p.b2[q] = beta[1];
        }
    }
    if (det_drift) *det_drift = drift;
    return p;
}

MongeAmpereStats monge_ampere_check(const FrameData& data, int n, double x0, double y0, double width,
                                    const TransportOptions& options) {
    MongeAmpereStats st;
    const double h = width / (n - 1);
    const ImmersionPatch p = transported_patch(data, n, n, x0, y0, h, h, &st.det_drift, options);
    st.hessian = hessian_determinant_check(p);
    return st;
}

// ---------------------------------------------------------------- per loop

double flat_noise_floor(const TransportOptions& options) {
    const FlatData flat;
    const HolonomyResult h = loop_holonomy(flat, circle(0.0, 1.0), options);
    return std::max((h.map.linear - Eigen::Matrix2d::Identity()).norm(), h.map.translation.norm());
}

double homotopy_discrepancy(const FrameData& data, double y, double x0, double dy, const TransportOptions& options) {
    const HolonomyResult direct = holonomy(data, y, x0, options);
    const FrameState& base = direct.base;
    const cplx a(x0, y), b(x0, y + dy);
    const TransportResult up = transport(base, segment(a, b), data, options);
    const TransportResult around = transport(up.end, horizontal_loop(x0, y + dy), data, options);
    TransportResult down = transport(around.end, segment(b + two_pi, a + two_pi), data, options);
    down.max_det_drift = std::max({up.max_det_drift, around.max_det_drift, down.max_det_drift});
    const HolonomyResult detour = holonomy_between(base, down);
    return (direct.map.linear - detour.map.linear).norm() + (direct.map.translation - detour.map.translation).norm();
}

LoopReport analyze_loop(const FrameData& data, double y, double x0, double flat_floor,
                        const TransportOptions& options) {
    LoopReport r;
    r.y = y;
    r.holonomy = holonomy(data, y, x0, options);
    const AffineMap2& m = r.holonomy.map;
    r.noise = std::max({flat_floor, std::abs(m.linear.trace() - 2.0), std::abs(m.linear.determinant() - 1.0),
                        homotopy_discrepancy(data, y, x0, 1.0, options)});
    r.thresholds = calibrated_thresholds(r.noise);
    r.cls = classify(m, r.thresholds);
    r.dev_inf = dev_infinity(data, x0, y, 1e-8, options);
    r.fixed_point_residual = ((m.linear - Eigen::Matrix2d::Identity()) * r.dev_inf.point + m.translation).norm();
    r.winding = winding_number(r.holonomy, r.dev_inf.point, r.thresholds);
    return r;
}

}  // namespace sfcy
