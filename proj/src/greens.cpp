#include "sfcy/greens.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "linear_solve.hpp"
#include "sfcy/errors.hpp"

namespace sfcy {

namespace {
constexpr double kPi = std::numbers::pi;

double loglog2(double r) { return std::log(2.0 * std::abs(std::log(r))); }
}  // namespace

double kappa_tilde(double r) {
    const double l = std::log(r);
    return 1.0 / (4.0 * r * r * l * l);
}

QuadratureCheck inner_integral(double r, double rho) {
    if (!(r > 0.0) || !(rho > 0.0)) throw OnDiagonal("radii must be positive");
    if (std::abs(r - rho) <= 1e-6 * std::max(r, rho))
        throw OnDiagonal("r and rho coincide within resolution; the integrand is singular");
    auto integrand = [r, rho](double phi) {
        const double c = std::cos(phi);
        return (2.0 * r - 2.0 * rho * c) / (r * r + rho * rho - 2.0 * r * rho * c);
    };
    QuadratureCheck q;
    q.numeric = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, 2.0 * kPi, 30, 1e-14);
    q.closed_form = rho < r ? 4.0 * kPi / r : 0.0;
    return q;
}

QuadratureCheck g_prime(double r) {
    if (!(r > 0.0 && r < 1.0)) throw std::domain_error("g_prime needs 0 < r < 1");
    // ρ = r e^{-s}: ∫₀^r dρ/(ρ log²ρ) = ∫₀^∞ ds/(log r − s)².
    const double L = std::log(r);
    boost::math::quadrature::exp_sinh<double> es;
    const double I = es.integrate([L](double s) { return 1.0 / ((L - s) * (L - s)); }, 1e-14);
    QuadratureCheck q;
    q.numeric = -I / r;
    q.closed_form = 1.0 / (r * L);
    return q;
}

double g_potential(double r) { return std::log(std::abs(std::log(r))); }

double disk_potential(double r, double delta) {
    using boost::math::quadrature::gauss_kronrod;
    // Inner angular integral of log|r − ρe^{iφ}|, by quadrature.
    auto angular = [r](double rho) {
        auto f = [r, rho](double phi) {
            const double s = std::sin(0.5 * phi);
            return 0.5 * std::log((r - rho) * (r - rho) + 4.0 * r * rho * s * s);
        };
        return gauss_kronrod<double, 61>::integrate(f, 0.0, kPi, 25, 1e-12) * 2.0;
    };
    // ρ = e^t; the measure dρ/(ρ log²ρ) becomes dt/t².
    auto outer = [&](double t) { return angular(std::exp(t)) / (t * t); };
    const double lr = std::log(r), ld = std::log(delta);
    boost::math::quadrature::exp_sinh<double> es;
    const double inside = es.integrate([&](double s) { return outer(lr - s); }, 1e-10);
    const double outside = gauss_kronrod<double, 61>::integrate(outer, lr, ld, 25, 1e-10);
    return -(inside + outside) / (4.0 * kPi);
}

double circle_sup(const CompositeGrid& g, const std::vector<double>& values, int pole, double r,
                  double (*target)(double), int samples) {
    const PoleChart& pc = g.atlas()->poles()[pole];
    double sup = 0.0;
    for (int k = 0; k < samples; ++k) {
        const cplx w = std::polar(r, 2.0 * kPi * (k + 0.5) / samples);
        sup = std::max(sup, std::abs(g.interpolate(values, pc.point_of(w)) - target(r)));
    }
    return sup;
}

PoissonProblem barrier_poisson_problem(std::shared_ptr<const CompositeGrid> grid) {
    if (!grid->atlas()) throw GridError("Poisson problem needs a sphere grid");
    const auto& poles = grid->atlas()->poles();
    PoissonProblem pb;
    pb.k = build_background_metric(grid, PoleModel::Flat);
    const std::size_t N = grid->size();

    // Everything below is per native area element (times the jacobian), so
    // polar rows stay finite however deep the patch goes.
    std::vector<double> loglam(N);
    for (std::size_t n = 0; n < N; ++n) loglam[n] = pb.k.lambda[n] > 0.0 ? std::log(pb.k.lambda[n]) : NAN;
    std::vector<double> kj(N, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        const SparseRow& row = grid->flat_laplacian(int(n));
        if (grid->nodes()[n].role == NodeRole::Unused || row.idx.empty()) continue;
        double lap = 0.0;
        for (std::size_t q = 0; q < row.idx.size(); ++q) lap += row.w[q] * loglam[row.idx[q]];
        if (std::isfinite(lap)) kj[n] = -lap / (2.0 * pb.k.lambda[n]);
    }

    // Blend weight and model profile of κ̃ at each node.
    std::vector<double> chi(N, 0.0), model(N, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        const Node& nd = grid->nodes()[n];
        if (nd.role == NodeRole::Unused) continue;
        const Component& c = grid->component_of(int(n));
        for (std::size_t j = 0; j < poles.size(); ++j) {
            double T;
            if (c.kind == ChartKind::Polar) {
                if (c.pole != int(j)) continue;
                T = c.T[nd.i];
            } else {
                const auto w = poles[j].canonical_of(nd.point);
                if (!w) continue;
                T = std::log(std::abs(*w));
            }
            const double rb = poles[j].blend_radius;
            const double x = smooth_step_down((std::exp(T) - rb) / rb);
            if (x <= 0.0) continue;
            chi[n] += x;
            // −½Δ log|log|w|²| = 1/(2ρ²T²) in the flat canonical chart.
            const double rho2 = c.kind == ChartKind::Polar ? 1.0 : std::exp(2.0 * T);
            model[n] += x / (2.0 * rho2 * T * T);
        }
    }
    double K = 0.0, A = 0.0, B = 0.0;
    for (std::size_t n = 0; n < N; ++n) {
        const double wq = grid->native_weight(int(n)) * pb.k.lambda[n];
        if (wq <= 0.0) continue;
        K += wq * kj[n];
        A += wq * model[n];
        B += wq * grid->jacobian(int(n)) * std::max(0.0, 1.0 - chi[n]);
    }
    for (std::size_t j = 0; j < poles.size(); ++j) A += kPi / std::abs(grid->inner_log_radius(int(j)));
    const double plateau = (K - A) / B;
    if (!(plateau > 0.0))
        throw BarrierFailure("curvature plateau for Gauss-Bonnet balance is not positive (" +
                             std::to_string(plateau) + "); shrink the blend radii");

    pb.source.assign(N, 0.0);
    for (std::size_t n = 0; n < N; ++n) {
        if (grid->nodes()[n].role == NodeRole::Unused) continue;
        const double kt = model[n] + std::max(0.0, 1.0 - chi[n]) * plateau * grid->jacobian(int(n));
        pb.source[n] = 2.0 * kj[n] - 2.0 * kt;
    }
    for (std::size_t j = 0; j < poles.size(); ++j) {
        const double TK = grid->inner_log_radius(int(j));
        pb.inner_flux.push_back(1.0 / TK);
        pb.disk_integral.push_back(-2.0 * kPi / std::abs(TK));
    }
    return pb;
}

PoissonSolution solve_poisson(const PoissonProblem& pb, double balance_tol, const std::vector<double>& radii) {
    const auto& gp = pb.k.grid;
    const CompositeGrid& g = *gp;
    if (!g.atlas()) throw GridError("Poisson solve needs a sphere grid");
    const int N = static_cast<int>(g.size());

    double total = 0.0, absolute = 0.0;
    for (int n = 0; n < N; ++n) {
        const double wq = g.native_weight(n) * pb.k.lambda[n];
        if (wq <= 0.0) continue;
        total += wq * pb.source[n];
        absolute += wq * std::abs(pb.source[n]);
    }
    for (double d : pb.disk_integral) total += d, absolute += std::abs(d);
    PoissonSolution sol;
    sol.imbalance = absolute > 0.0 ? std::abs(total) / absolute : 0.0;
    if (sol.imbalance > balance_tol)
        throw UnbalancedSource("source integral " + std::to_string(total) + " (relative " +
                               std::to_string(sol.imbalance) + ") violates Gauss-Bonnet balance");

    // Unknowns: f at every node, then the multiplier μ.
    detail::Triplets A;
    A.reserve(static_cast<std::size_t>(N) * 8);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(N + 1);
    for (int n = 0; n < N; ++n) {
        const Node& nd = g.nodes()[n];
        const Component& c = g.component_of(n);
        const double scale = g.jacobian(n) * pb.k.lambda[n];
        switch (nd.role) {
            case NodeRole::Unused:
                A.emplace_back(n, n, 1.0);
                break;
            case NodeRole::Receiver: {
                A.emplace_back(n, n, 1.0);
                const SparseRow& d = g.donors(n);
                for (std::size_t q = 0; q < d.idx.size(); ++q) A.emplace_back(n, d.idx[q], -d.w[q]);
                break;
            }
            case NodeRole::Interior: {
                const SparseRow& row = g.flat_laplacian(n);
                for (std::size_t q = 0; q < row.idx.size(); ++q) A.emplace_back(n, row.idx[q], row.w[q]);
                A.emplace_back(n, N, scale);
                rhs[n] = pb.k.lambda[n] * pb.source[n];
                break;
            }
            case NodeRole::Dirichlet: {
                // Inner circle of a pole patch: half-cell flux balance.
                if (c.kind != ChartKind::Polar || c.pole < 0) throw GridError("unexpected boundary node");
                const int K = nd.i;
                const double dT = c.T[K - 1] - c.T[K];
                const double it = 1.0 / (c.dtheta * c.dtheta);
                const int l = nd.j;
                A.emplace_back(n, c.index(K - 1, l), 2.0 / (dT * dT));
                A.emplace_back(n, n, -2.0 / (dT * dT) - 2.0 * it);
                A.emplace_back(n, c.index(K, (l + 1) % c.ntheta), it);
                A.emplace_back(n, c.index(K, (l + c.ntheta - 1) % c.ntheta), it);
                A.emplace_back(n, N, scale);
                rhs[n] = pb.k.lambda[n] * pb.source[n] + 2.0 * pb.inner_flux[c.pole] / dT;
                break;
            }
        }
    }
    for (int n = 0; n < N; ++n) {
        const double wq = g.quadrature_weight(n) * pb.k.lambda[n];
        if (wq > 0.0) A.emplace_back(N, n, wq);
    }
    const Eigen::VectorXd x = detail::solve_sparse<GridError>(N + 1, A, rhs, "Poisson system");
    sol.f = ScalarField(gp);
    for (int n = 0; n < N; ++n) sol.f[n] = x[n];
    sol.multiplier = x[N];

    for (std::size_t j = 0; j < g.atlas()->poles().size(); ++j) {
        const double r_in = std::exp(g.inner_log_radius(int(j)));
        const double r_out = g.atlas()->poles()[j].patch_radius;
        for (double r : radii) {
            if (r <= 2.0 * r_in || r >= 0.5 * r_out) continue;
            sol.asymptote.push_back({int(j), r, circle_sup(g, sol.f.values, int(j), r, loglog2)});
        }
    }
    return sol;
}

}  // namespace sfcy
