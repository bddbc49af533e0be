#include "sfcy/titeica.hpp"

#include <Eigen/Sparse>
#include <Eigen/UmfPackSupport>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "linear_solve.hpp"
#include "sfcy/errors.hpp"

namespace sfcy {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double apply_row(const SparseRow& row, const std::vector<double>& u) {
    double s = 0.0;
    for (std::size_t q = 0; q < row.idx.size(); ++q) s += row.w[q] * u[row.idx[q]];
    return s;
}

std::vector<double> curvature_scaled(const CompositeGrid& g, const std::vector<double>& lambda) {
    std::vector<double> loglam(g.size());
    for (std::size_t n = 0; n < g.size(); ++n) loglam[n] = lambda[n] > 0.0 ? std::log(lambda[n]) : kNaN;
    std::vector<double> kj(g.size(), kNaN);
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (g.nodes()[n].role == NodeRole::Unused || !stencil_usable(g, int(n), loglam)) continue;
        kj[n] = -apply_row(g.flat_laplacian(int(n)), loglam) / (2.0 * lambda[n]);
    }
    return kj;
}

std::string where(const CompositeGrid& g, int n) {
    std::ostringstream os;
    const Node& nd = g.nodes()[n];
    os << "node " << n << " (" << chart_name(g, n) << " " << nd.native.real() << "," << nd.native.imag() << ")";
    return os.str();
}

// log canonical radius of a node relative to pole j, if it lies in that chart.
std::optional<double> pole_log_radius(const CompositeGrid& g, int n, int j) {
    const Node& nd = g.nodes()[n];
    const Component& c = g.component_of(n);
    if (c.kind == ChartKind::Polar) {
        if (c.pole != j) return std::nullopt;
        return c.T[nd.i];
    }
    const auto w = g.atlas()->poles()[j].canonical_of(nd.point);
    if (!w || *w == cplx{}) return std::nullopt;
    return std::log(std::abs(*w));
}

// |log ρ|^α near the poles, constant away from them.
std::vector<double> lower_profile(const CompositeGrid& g, double alpha) {
    std::vector<double> f(g.size(), kNaN);
    if (!g.atlas()) {
        for (std::size_t n = 0; n < g.size(); ++n)
            f[n] = std::pow(std::abs(std::log(std::abs(g.nodes()[n].native))), alpha);
        return f;
    }
    const auto& poles = g.atlas()->poles();
    double far = 0.0;
    for (const auto& pc : poles) far = std::max(far, std::pow(std::abs(std::log(2.0 * pc.blend_radius)), alpha));
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (g.nodes()[n].role == NodeRole::Unused) continue;
        double chi = 0.0, acc = 0.0;
        for (std::size_t j = 0; j < poles.size(); ++j) {
            const auto T = pole_log_radius(g, int(n), int(j));
            if (!T) continue;
            const double rb = poles[j].blend_radius;
            const double x = smooth_step_down((std::exp(*T) - rb) / rb);
            chi += x;
            acc += x * std::pow(std::abs(*T), alpha);
        }
        f[n] = acc + std::max(0.0, 1.0 - chi) * far;
    }
    return f;
}

bool usable(NodeRole r) { return r != NodeRole::Unused; }

// Sign check of jac·λ·L_h(s): returns the extreme value and the worst node.
std::pair<double, int> extreme_scaled(const Operator& op, const std::vector<double>& s, bool want_positive) {
    double ext = want_positive ? kInf : -kInf;
    int worst = -1;
    for (std::size_t n = 0; n < s.size(); ++n) {
        if (!op.interior(int(n))) continue;
        const double F = op.scaled(int(n), s);
        if (!std::isfinite(F)) return {kNaN, int(n)};
        if (want_positive ? F < ext : F > ext) ext = F, worst = int(n);
    }
    return {ext, worst};
}

struct UpperData {
    std::vector<double> f, shift;
    double multiplier = 0.0;
};

UpperData upper_data(const MetricField& h) {
    if (!h.grid->atlas()) throw GridError("upper barrier needs a sphere grid");
    const PoissonProblem pb = barrier_poisson_problem(h.grid);
    const PoissonSolution ps = solve_poisson(pb);
    UpperData d;
    d.f = ps.f.values;
    d.multiplier = ps.multiplier;
    d.shift.assign(h.lambda.size(), 0.0);
    for (std::size_t n = 0; n < h.lambda.size(); ++n) {
        const double v = std::log(pb.k.lambda[n] / h.lambda[n]);
        d.shift[n] = std::isfinite(v) ? v : 0.0;
    }
    return d;
}

std::vector<double> upper_values(const UpperData& d, double c) {
    std::vector<double> S(d.f.size());
    for (std::size_t n = 0; n < S.size(); ++n) S[n] = d.f[n] + c + d.shift[n];
    return S;
}

}  // namespace

// ---------------------------------------------------------------- operator

Operator Operator::make(const MetricField& h, const RationalCubicDifferential& U) {
    return make(h, scaled_cubic_norm(*h.grid, U));
}

Operator Operator::make(const MetricField& h, std::vector<double> scaled_cubic) {
    const CompositeGrid& g = *h.grid;
    Operator op;
    op.grid = h.grid;
    op.lambda = h.lambda;
    op.q = std::move(scaled_cubic);
    for (std::size_t n = 0; n < g.size(); ++n) op.q[n] /= std::pow(h.lambda[n], 3);
    op.kj = curvature_scaled(g, h.lambda);
    return op;
}

Operator Operator::conformal(const std::vector<double>& v) const {
    Operator op = *this;
    for (std::size_t n = 0; n < lambda.size(); ++n) {
        op.lambda[n] = lambda[n] * std::exp(v[n]);
        op.q[n] = q[n] * std::exp(-3.0 * v[n]);
    }
    op.kj = curvature_scaled(*grid, op.lambda);
    return op;
}

bool Operator::interior(int n) const { return grid->nodes()[n].role == NodeRole::Interior; }

double Operator::scaled(int n, const std::vector<double>& u) const {
    return apply_row(grid->flat_laplacian(n), u) + lambda[n] * (4.0 * std::exp(-2.0 * u[n]) * q[n] - 2.0 * kj[n]);
}

double Operator::value(int n, const std::vector<double>& u) const {
    return scaled(n, u) / (grid->jacobian(n) * lambda[n]);
}

ScalarField residual(const ScalarField& u, const MetricField& h, const RationalCubicDifferential& U) {
    return residual(u, Operator::make(h, U));
}

ScalarField residual(const ScalarField& u, const Operator& op) {
    ScalarField out(op.grid, kNaN);
    for (std::size_t n = 0; n < out.values.size(); ++n)
        if (op.interior(int(n))) out[n] = op.value(int(n), u.values);
    return out;
}

double conformal_change_check(const ScalarField& u, const ScalarField& v, const MetricField& h,
                              const RationalCubicDifferential& U) {
    const Operator oh = Operator::make(h, U);
    const Operator ok = oh.conformal(v.values);
    std::vector<double> uv(u.values.size());
    for (std::size_t n = 0; n < uv.size(); ++n) uv[n] = u[n] + v[n];
    double dev = 0.0;
    for (std::size_t n = 0; n < uv.size(); ++n) {
        if (!oh.interior(int(n))) continue;
        const double lk = ok.value(int(n), u.values);
        const double lh = oh.value(int(n), uv);
        if (!std::isfinite(lk) || !std::isfinite(lh)) continue;
        dev = std::max(dev, h.grid->jacobian(int(n)) * std::abs(lk - std::exp(-v[n]) * lh));
    }
    return dev;
}

// ---------------------------------------------------------------- barriers

ScalarField zero_bumps(const MetricField& h) {
    const CompositeGrid& g = *h.grid;
    ScalarField v(h.grid, 0.0);
    if (!g.atlas()) return v;
    const ChartAtlas& atlas = *g.atlas();

    // Distinct zeros, each in the stereographic chart where it has |coord| <= 1.
    struct Site {
        bool south;
        cplx coord;
        double sigma;
    };
    std::vector<Site> sites;
    auto coord_of = [](const ExtPoint& P, bool south) -> std::optional<cplx> {
        if (!south) return P.infinity ? std::nullopt : std::optional<cplx>(P.z);
        if (P.infinity) return cplx{};
        if (P.z == cplx{}) return std::nullopt;
        return 1.0 / P.z;
    };
    for (const ExtPoint& zp : atlas.zeros()) {
        const bool south = zp.infinity || std::abs(zp.z) > 1.0;
        const cplx c = *coord_of(zp, south);
        bool dup = false;
        for (const Site& s : sites) dup = dup || (s.south == south && std::abs(s.coord - c) < 1e-8);
        if (dup) continue;
        double d = 1.0;
        for (const auto& pc : atlas.poles())
            if (const auto pcoord = coord_of(pc.pole.location, south)) d = std::min(d, std::abs(*pcoord - c));
        for (const ExtPoint& other : atlas.zeros())
            if (const auto oc = coord_of(other, south); oc && std::abs(*oc - c) > 1e-8)
                d = std::min(d, 0.5 * std::abs(*oc - c));
        sites.push_back({south, c, 0.2 * d});
    }
    if (sites.empty()) return v;

    std::vector<double> profile(g.size(), 0.0);
    std::vector<int> core;  // nodes where the curvature must turn negative
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (g.nodes()[n].role == NodeRole::Unused) continue;
        for (const Site& s : sites) {
            const auto c = coord_of(g.nodes()[n].point, s.south);
            if (!c) continue;
            const double d = std::abs(*c - s.coord) / s.sigma;
            if (d >= 3.0) continue;
            profile[n] += std::exp(-d * d) * smooth_step_down(d - 2.0);
            if (d < 0.3 && g.nodes()[n].role == NodeRole::Interior) core.push_back(int(n));
        }
    }
    if (core.empty()) throw GridError("grid does not resolve the neighbourhood of a zero of U");

    const Operator oh{h.grid, h.lambda, std::vector<double>(g.size(), 0.0), curvature_scaled(g, h.lambda)};
    auto negative = [&](double A) {
        std::vector<double> vv(g.size());
        for (std::size_t n = 0; n < g.size(); ++n) vv[n] = A * profile[n];
        const Operator ok = oh.conformal(vv);
        for (int n : core)
            if (!(ok.kj[n] < 0.0)) return false;
        return true;
    };
    double hi = -1.0;
    int doublings = 0;
    while (!negative(hi)) {
        if (++doublings > 40) throw BarrierFailure("no bump amplitude makes the curvature negative near a zero");
        hi *= 2.0;
    }
    double lo = doublings > 0 ? 0.5 * hi : 0.0;
    for (int it = 0; it < 30; ++it) {
        const double mid = 0.5 * (lo + hi);
        (negative(mid) ? hi : lo) = mid;
    }
    for (std::size_t n = 0; n < g.size(); ++n) v[n] = hi * profile[n];
    return v;
}

namespace {

std::vector<double> lower_values(const std::vector<double>& bump, const std::vector<double>& f, double beta) {
    std::vector<double> s(f.size());
    for (std::size_t n = 0; n < s.size(); ++n) s[n] = std::isfinite(f[n]) ? bump[n] + beta * f[n] : 0.0;
    return s;
}

}  // namespace

ScalarField lower_barrier(const MetricField& h, const RationalCubicDifferential& U, double alpha, double beta) {
    return lower_barrier(Operator::make(h, U), alpha, beta);
}

ScalarField lower_barrier(const Operator& op, double alpha, double beta) {
    if (!(alpha > -1.0 && alpha < 0.0)) throw BarrierFailure("alpha must lie in (-1, 0)");
    if (!(beta < 0.0)) throw BarrierFailure("beta must be negative");
    const ScalarField bump = zero_bumps(MetricField{op.grid, op.lambda});
    ScalarField s(op.grid);
    s.values = lower_values(bump.values, lower_profile(*op.grid, alpha), beta);
    const auto [m, worst] = extreme_scaled(op, s.values, true);
    if (!(m > 0.0))
        throw BarrierFailure("L_h(s) <= 0 at " + where(*op.grid, worst) + "; make beta more negative");
    return s;
}

ScalarField upper_barrier(const MetricField& h, const RationalCubicDifferential& U, double c) {
    const Operator op = Operator::make(h, U);
    ScalarField S(h.grid);
    S.values = upper_values(upper_data(h), c);
    const auto [m, worst] = extreme_scaled(op, S.values, false);
    if (!(m < 0.0)) throw BarrierFailure("L_h(S) >= 0 at " + where(*h.grid, worst) + "; increase c");
    return S;
}

BarrierPair build_barriers(const MetricField& h, const RationalCubicDifferential& U, double alpha) {
    if (!(alpha > -1.0 && alpha < 0.0)) throw BarrierFailure("alpha must lie in (-1, 0)");
    const CompositeGrid& g = *h.grid;
    const Operator op = Operator::make(h, U);
    BarrierPair bp;
    bp.alpha = alpha;
    bp.zero_bump = zero_bumps(h);
    const auto f = lower_profile(g, alpha);

    bp.beta = -1.0;
    for (int it = 0;; ++it) {
        auto s = lower_values(bp.zero_bump.values, f, bp.beta);
        const auto [m, worst] = extreme_scaled(op, s, true);
        if (m > 0.0) {
            bp.lower = ScalarField(h.grid);
            bp.lower.values = std::move(s);
            bp.lower_margin = m;
            break;
        }
        if (it >= 40) throw BarrierFailure("no beta gives L_h(s) > 0; worst " + where(g, worst));
        bp.beta *= 2.0;
    }

    const UpperData ud = upper_data(h);
    bp.multiplier = ud.multiplier;
    bp.potential = ScalarField(h.grid);
    bp.potential.values = ud.f;
    bp.pole_shift = ScalarField(h.grid);
    bp.pole_shift.values = ud.shift;
    bp.c = 1.0;
    for (int it = 0;; ++it) {
        auto S = upper_values(ud, bp.c);
        const auto [m, worst] = extreme_scaled(op, S, false);
        double gap = kInf;
        for (std::size_t n = 0; n < S.size(); ++n)
            if (usable(g.nodes()[n].role)) gap = std::min(gap, S[n] - bp.lower[n]);
        if (m < 0.0 && gap > 0.0) {
            bp.upper = ScalarField(h.grid);
            bp.upper.values = std::move(S);
            bp.upper_margin = m;
            bp.gap = gap;
            break;
        }
        if (it >= 40) throw BarrierFailure("no c gives L_h(S) < 0 with S > s; worst " + where(g, worst));
        bp.c *= 2.0;
    }
    return bp;
}

// ---------------------------------------------------------------- Newton

void SolverConfig::validate() const {
    if (!(tol > 0.0) || !(monotone_tol > 0.0)) throw ConfigError("solver tolerances must be positive");
    if (max_newton < 1) throw ConfigError("max Newton iterations must be positive");
    if (stages.empty()) throw ConfigError("excision schedule is empty");
    for (std::size_t k = 1; k < stages.size(); ++k)
        if (!(stages[k] < stages[k - 1])) throw ConfigError("excision radii must strictly decrease");
    if (!(alpha > -1.0 && alpha < 0.0)) throw ConfigError("alpha must lie in (-1, 0)");
}

namespace {

// Residual of the full nonlinear system (PDE rows, interpolation rows, data rows).
double system_residual(const Operator& op, const std::vector<double>& boundary, const std::vector<double>& u,
                       Eigen::VectorXd& F) {
    const CompositeGrid& g = *op.grid;
    const int N = static_cast<int>(g.size());
    F.resize(N);
    double norm = 0.0;
    for (int n = 0; n < N; ++n) {
        switch (g.nodes()[n].role) {
            case NodeRole::Interior: F[n] = op.scaled(n, u); break;
            case NodeRole::Receiver: F[n] = u[n] - apply_row(g.donors(n), u); break;
            default: F[n] = u[n] - boundary[n]; break;
        }
        norm = std::max(norm, std::abs(F[n]));
        if (!std::isfinite(F[n])) return kInf;
    }
    return norm;
}

Eigen::SparseMatrix<double> jacobian_matrix(const Operator& op, const std::vector<double>& u) {
    const CompositeGrid& g = *op.grid;
    const int N = static_cast<int>(g.size());
    detail::Triplets t;
    t.reserve(static_cast<std::size_t>(N) * 8);
    for (int n = 0; n < N; ++n) {
        switch (g.nodes()[n].role) {
            case NodeRole::Interior: {
                const SparseRow& row = g.flat_laplacian(n);
                for (std::size_t q = 0; q < row.idx.size(); ++q) t.emplace_back(n, row.idx[q], row.w[q]);
                t.emplace_back(n, n, -8.0 * op.lambda[n] * std::exp(-2.0 * u[n]) * op.q[n]);
                break;
            }
            case NodeRole::Receiver: {
                t.emplace_back(n, n, 1.0);
                const SparseRow& d = g.donors(n);
                for (std::size_t q = 0; q < d.idx.size(); ++q) t.emplace_back(n, d.idx[q], -d.w[q]);
                break;
            }
            default: t.emplace_back(n, n, 1.0);
        }
    }
    Eigen::SparseMatrix<double> J(N, N);
    J.setFromTriplets(t.begin(), t.end());
    J.makeCompressed();
    return J;
}

}  // namespace

NewtonResult newton_solve(const Operator& op, const std::vector<double>& boundary, std::vector<double> u, double tol,
                          int max_iter, const std::vector<double>& lo, const std::vector<double>& hi) {
    const CompositeGrid& g = *op.grid;
    const int N = static_cast<int>(g.size());
    auto project = [&](std::vector<double>& x) {
        if (lo.empty() && hi.empty()) return;
        for (int n = 0; n < N; ++n) {
            if (g.nodes()[n].role != NodeRole::Interior) continue;
            if (!lo.empty()) x[n] = std::max(x[n], lo[n]);
            if (!hi.empty()) x[n] = std::min(x[n], hi[n]);
        }
    };
    project(u);

    // Chord iteration: the LU of the Jacobian is reused while it contracts
    // well and refreshed otherwise. The nonlinearity is diagonal, so one
    // factorization usually carries the whole solve.
    Eigen::SparseMatrix<double> J;  // the LU refers to it during solves
    Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
    bool fresh = false;
    NewtonResult res;
    auto factor = [&] {
        J = jacobian_matrix(op, u);
        lu.compute(J);
        if (lu.info() != Eigen::Success) throw NewtonDivergence("singular Newton system");
        ++res.factorizations;
        fresh = true;
    };
    Eigen::VectorXd F;
    double r = system_residual(op, boundary, u, F);
    factor();
    while (r >= tol) {
        if (res.iterations >= max_iter) break;
        ++res.iterations;
        const Eigen::VectorXd d = lu.solve(F);
        if (lu.info() != Eigen::Success || !d.allFinite()) throw NewtonDivergence("Newton linear solve failed");
        bool accepted = false;
        double t = 1.0;
        std::vector<double> trial(N);
        Eigen::VectorXd Ft;
        for (int k = 0; k < 12; ++k, t *= 0.5) {
            for (int n = 0; n < N; ++n) trial[n] = u[n] - t * d[n];
            project(trial);
            const double rt = system_residual(op, boundary, trial, Ft);
            if (rt < (1.0 - 1e-4 * t) * r) {
                const bool slow = rt > 0.3 * r;
                u.swap(trial);
                F.swap(Ft);
                r = rt;
                accepted = true;
                fresh = false;
                if (slow && r >= tol) factor();
                break;
            }
        }
        if (accepted) continue;
        if (fresh) break;
        factor();
    }
    res.u = std::move(u);
    res.residual = r;
    if (!(r < tol)) {
        // Locate where the iterate presses against the sandwich.
        std::string msg = "Newton stalled at residual " + std::to_string(r);
        double worst = 0.0;
        int node = -1;
        for (int n = 0; n < N; ++n) {
            if (g.nodes()[n].role != NodeRole::Interior) continue;
            const double a = lo.empty() ? kInf : res.u[n] - lo[n];
            const double b = hi.empty() ? kInf : hi[n] - res.u[n];
            const double F_n = std::abs(F[n]);
            if ((a <= 0.0 || b <= 0.0) && F_n > worst) worst = F_n, node = n;
        }
        if (node >= 0) msg += "; sandwich active at " + where(g, node);
        throw NewtonDivergence(msg);
    }
    return res;
}

// ---------------------------------------------------------------- exhaustion

namespace {

std::vector<double> probe_values(const CompositeGrid& g, const std::vector<double>& u, const std::vector<double>& radii) {
    std::vector<double> out;
    for (std::size_t j = 0; j < g.atlas()->poles().size(); ++j) {
        const PoleChart& pc = g.atlas()->poles()[j];
        const int comp = g.patch_of_pole(int(j));
        for (double r : radii)
            for (int k = 0; k < 8; ++k) {
                const auto row = g.locate_in(comp, pc.point_of(std::polar(r, 2.0 * std::numbers::pi * k / 8)));
                out.push_back(row ? apply_row(*row, u) : kNaN);
            }
    }
    return out;
}

}  // namespace

Solution solve(const RationalCubicDifferential& U, const SolverConfig& config) {
    config.validate();
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const ChartAtlas atlas = ChartAtlas::build(U, config.grid);
    Solution sol;
    sol.grid = CompositeGrid::build(atlas, config.grid.T_min);
    sol.h = build_background_metric(sol.grid, PoleModel::Cusp);
    const Operator deep = Operator::make(sol.h, U);
    sol.barriers = build_barriers(sol.h, U, config.alpha);
    const auto& s = sol.barriers.lower.values;
    const auto& S = sol.barriers.upper.values;

    std::vector<double> u = S;
    std::shared_ptr<const CompositeGrid> prev;
    std::vector<double> probes;
    for (double T : config.stages) {
        const auto ts = clock::now();
        const double Tn = std::max(T, config.grid.T_min);
        auto g = Tn <= config.grid.T_min ? sol.grid : CompositeGrid::build(atlas, Tn);
        Operator op = deep;
        op.grid = g;
        NewtonResult nr = newton_solve(op, S, u, config.tol, config.max_newton, s, S);

        StageLog log;
        log.excision_T = T;
        log.inner_T = g->inner_log_radius(0);
        log.newton_iterations = nr.iterations;
        log.factorizations = nr.factorizations;
        log.residual = nr.residual;
        log.lower_margin = kInf;
        log.upper_margin = kInf;
        log.max_increase = -kInf;
        log.sandwich_violation = -kInf;
        for (std::size_t n = 0; n < g->size(); ++n) {
            const NodeRole role = g->nodes()[n].role;
            if (!usable(role)) continue;
            log.sandwich_violation = std::max({log.sandwich_violation, s[n] - nr.u[n], nr.u[n] - S[n]});
            if (role != NodeRole::Interior) continue;
            log.lower_margin = std::min(log.lower_margin, nr.u[n] - s[n]);
            log.upper_margin = std::min(log.upper_margin, S[n] - nr.u[n]);
            if (prev && role == NodeRole::Interior && prev->nodes()[n].role == NodeRole::Interior)
                log.max_increase = std::max(log.max_increase, nr.u[n] - u[n]);
        }
        if (!prev) log.max_increase = 0.0;
        const auto pv = probe_values(*g, nr.u, config.probe_radii);
        log.probe_change = probes.empty() ? kInf : 0.0;
        for (std::size_t k = 0; k < probes.size(); ++k)
            if (std::isfinite(pv[k]) && std::isfinite(probes[k]))
                log.probe_change = std::max(log.probe_change, std::abs(pv[k] - probes[k]));
        probes = pv;
        u = std::move(nr.u);
        log.seconds = std::chrono::duration<double>(clock::now() - ts).count();
        sol.stages.push_back(log);
        if (config.strict_monotone && log.max_increase > config.monotone_tol)
            throw MonotonicityViolation("u increased by " + std::to_string(log.max_increase) + " at stage T = " +
                                        std::to_string(T) + "; refine the grid");
        prev = g;
        if (log.probe_change < 10.0 * config.tol) break;
    }
    // The last stage may have stopped early; report on the grid it used.
    if (prev != sol.grid) {
        sol.grid = prev;
        sol.h.grid = prev;
    }
    sol.u = ScalarField(sol.grid);
    sol.u.values = std::move(u);
    sol.residual = sol.stages.back().residual;
    sol.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    return sol;
}

// ---------------------------------------------------------------- diagnostics

std::vector<CircleRow> blowup_check(const Solution& sol, const std::vector<double>& radii) {
    const CompositeGrid& g = *sol.grid;
    const auto& u = sol.u.values;
    // |w u_w| = ½ sqrt(u_T² + u_θ²) on the polar nodes.
    std::vector<double> zuz(g.size(), kNaN);
    for (const Component& c : g.components()) {
        if (c.kind != ChartKind::Polar) continue;
        for (int k = 0; k <= c.inner_row; ++k) {
            const int k0 = k == 0 ? 0 : (k == c.inner_row ? k - 2 : k - 1);
            std::vector<double> xs{c.T[k0], c.T[k0 + 1], c.T[k0 + 2]};
            const auto wt = fd_weights(c.T[k], xs, 1);
            for (int l = 0; l < c.ntheta; ++l) {
                double uT = 0.0;
                for (int q = 0; q < 3; ++q) uT += wt[q] * u[c.index(k0 + q, l)];
                const double uth = (u[c.index(k, (l + 1) % c.ntheta)] - u[c.index(k, (l + c.ntheta - 1) % c.ntheta)]) /
                                   (2.0 * c.dtheta);
                zuz[c.index(k, l)] = 0.5 * std::hypot(uT, uth);
            }
        }
    }
    std::vector<CircleRow> rows;
    const int samples = 64;
    for (std::size_t j = 0; j < g.atlas()->poles().size(); ++j) {
        const PoleChart& pc = g.atlas()->poles()[j];
        const int comp = g.patch_of_pole(int(j));
        for (double r : radii) {
            CircleRow row{int(j), r, 0.0, 0.0, kInf, -kInf};
            for (int k = 0; k < samples; ++k) {
                const auto st = g.locate_in(comp, pc.point_of(std::polar(r, 2.0 * std::numbers::pi * (k + 0.5) / samples)));
                if (!st) {
                    row.sup_u = row.sup_zuz = kNaN;
                    break;
                }
                const double uv = apply_row(*st, u);
                row.sup_u = std::max(row.sup_u, std::abs(uv));
                row.sup_zuz = std::max(row.sup_zuz, std::abs(apply_row(*st, zuz)));
                row.min_ratio = std::min(row.min_ratio, std::exp(uv));
                row.max_ratio = std::max(row.max_ratio, std::exp(uv));
            }
            rows.push_back(row);
        }
    }
    return rows;
}

ScalarField bryant_check(const ScalarField& u, const MetricField& h, const RationalCubicDifferential& U) {
    const CompositeGrid& g = *h.grid;
    const Operator op = Operator::make(h, U);
    // g = H |dζ|²/jac with H = jac|U|²/(e^{2u}λ²); log jac is linear in T, so
    // κ_g = −Δ₀ log H / (2H).
    std::vector<double> H(g.size(), kNaN), logH(g.size(), kNaN);
    for (std::size_t n = 0; n < g.size(); ++n) {
        if (g.nodes()[n].role == NodeRole::Unused) continue;
        H[n] = op.q[n] * op.lambda[n] * std::exp(-2.0 * u[n]);
        if (g.nodes()[n].role == NodeRole::Interior && H[n] == 0.0)
            throw ZeroOfU("U vanishes at " + where(g, int(n)));
        if (H[n] > 0.0) logH[n] = std::log(H[n]);
    }
    const ChartAtlas* atlas = g.atlas();
    ScalarField out(h.grid, kNaN);
    for (std::size_t n = 0; n < g.size(); ++n) {
        const Node& nd = g.nodes()[n];
        if (nd.role != NodeRole::Interior) continue;
        const Component& c = g.component_of(int(n));
        if (c.kind == ChartKind::Polar || !atlas) {
            if (stencil_usable(g, int(n), logH))
                out[n] = -apply_row(g.flat_laplacian(int(n)), logH) / (2.0 * H[n]) + 4.0;
            continue;
        }
        // Sphere charts: each point is evaluated in the chart that owns it.
        if (std::abs(nd.native) > 1.0 / 0.85) continue;
        bool in_patch = false;
        for (const auto& pc : atlas->poles())
            if (const auto w = pc.canonical_of(nd.point); w && std::abs(*w) < pc.patch_radius) in_patch = true;
        if (in_patch) continue;
        if (stencil_usable(g, int(n), logH))
            out[n] = -apply_row(g.flat_laplacian(int(n)), logH) / (2.0 * H[n]) + 4.0;
    }
    return out;
}

}  // namespace sfcy
