#pragma once

#include <memory>
#include <string>
#include <vector>

#include "sfcy/geometry.hpp"
#include "sfcy/greens.hpp"

namespace sfcy {

/// Per-node data of the operator L_h(u) = Δ_h u + 4e^{−2u}‖U‖²_h − 2κ_h.
/// Everything is kept in native coordinates so that jac·λ·L_h stays O(1)
/// on the deep rows of the pole patches.
struct Operator {
    std::shared_ptr<const CompositeGrid> grid;
    std::vector<double> lambda;  ///< h
    std::vector<double> q;       ///< jac·‖U‖²_h  (= jac|U|²/λ³)
    std::vector<double> kj;      ///< jac·κ_h

    static Operator make(const MetricField& h, const RationalCubicDifferential& U);
    /// From jac·|U|² in native coordinates (e.g. all zeros for U ≡ 0).
    static Operator make(const MetricField& h, std::vector<double> scaled_cubic);
    /// Same operator with h replaced by e^v h.
    Operator conformal(const std::vector<double>& v) const;

    /// jac·λ·L_h(u) at an interior node.
    double scaled(int node, const std::vector<double>& u) const;
    /// L_h(u) at an interior node.
    double value(int node, const std::vector<double>& u) const;
    bool interior(int node) const;
};

/// Pointwise L_h(u); NaN off the interior.
ScalarField residual(const ScalarField& u, const MetricField& h, const RationalCubicDifferential& U);
ScalarField residual(const ScalarField& u, const Operator& op);

/// max over interior nodes of jac·|L_k(u) − e^{−v}L_h(u+v)|, with k = e^v h.
double conformal_change_check(const ScalarField& u, const ScalarField& v, const MetricField& h,
                              const RationalCubicDifferential& U);

struct BarrierPair {
    ScalarField lower;       ///< s
    ScalarField upper;       ///< S
    double alpha = -0.5;
    double beta = -1.0;
    double c = 1.0;
    ScalarField zero_bump;   ///< compact conformal change near zeros of U (lower barrier)
    ScalarField pole_shift;  ///< log(λ_k/λ_h) between the flat-pole and cusp metrics
    ScalarField potential;   ///< Green's potential f of the upper barrier
    double lower_margin = 0.0;  ///< min over the interior of jac·λ·L_h(s)
    double upper_margin = 0.0;  ///< max over the interior of jac·λ·L_h(S)
    double gap = 0.0;           ///< min (S − s)
    double multiplier = 0.0;    ///< constant absorbed by the discrete Poisson solve
};

/// Compact conformal change v ≤ 0 with κ_{e^v h} < 0 near each zero of U.
/// Zero when U has no zeros or the grid has no atlas.
ScalarField zero_bumps(const MetricField& h);

/// s = v + βf with f = |log|z_j||^α near the poles. Throws BarrierFailure
/// unless L_h(s) > 0 at every interior node.
ScalarField lower_barrier(const MetricField& h, const RationalCubicDifferential& U, double alpha, double beta);
ScalarField lower_barrier(const Operator& op, double alpha, double beta);

/// S = f + c + log(λ_k/λ_h). Throws BarrierFailure unless L_h(S) < 0 at every
/// interior node.
ScalarField upper_barrier(const MetricField& h, const RationalCubicDifferential& U, double c);

/// Both barriers with β and c found by doubling, then checked for s ≤ S.
BarrierPair build_barriers(const MetricField& h, const RationalCubicDifferential& U, double alpha = -0.5);

struct SolverConfig {
    GridParams grid;
    std::vector<double> stages{-5, -10, -20, -40, -80, -160, -300, -1000, -3000};  ///< log canonical excision radii
    double tol = 1e-10;          ///< max-norm of jac·λ·L_h on interior nodes
    int max_newton = 40;
    double monotone_tol = 1e-9;  ///< allowed u_{n+1} − u_n on shared nodes
    bool strict_monotone = true; ///< throw MonotonicityViolation beyond monotone_tol
    double alpha = -0.5;
    std::vector<double> probe_radii{1e-1, 1e-2, 1e-3};

    void validate() const;
};

struct StageLog {
    double excision_T = 0.0;  ///< requested log radius
    double inner_T = 0.0;     ///< snapped row, pole 0
    int newton_iterations = 0;
    int factorizations = 0;
    double residual = 0.0;
    double max_increase = 0.0;  ///< max (u_n − u_{n−1}) on shared interior nodes
    double lower_margin = 0.0;  ///< min (u − s) on interior nodes
    double upper_margin = 0.0;  ///< min (S − u) on interior nodes
    double sandwich_violation = 0.0;  ///< max of s − u and u − S over all live nodes (≤ 0 when it holds)
    double probe_change = 0.0;  ///< max change of u on the probe circles
    double seconds = 0.0;
};

struct CircleRow {
    int pole = 0;
    double radius = 0.0;
    double sup_u = 0.0;
    double sup_zuz = 0.0;      ///< sup |w u_w| in the canonical coordinate
    double min_ratio = 0.0;    ///< min e^ψ/|log|w|²| = e^u on the circle
    double max_ratio = 0.0;
};

struct Solution {
    std::shared_ptr<const CompositeGrid> grid;  ///< deepest grid
    MetricField h;
    ScalarField u;
    BarrierPair barriers;
    std::vector<StageLog> stages;
    double residual = 0.0;
    double seconds = 0.0;
};

/// Staged Dirichlet exhaustion with damped Newton on each stage.
Solution solve(const RationalCubicDifferential& U, const SolverConfig& config);

/// Newton solve of L_h(u) = 0 on a fixed grid with Dirichlet data `boundary`
/// on receiver-free boundary rows, starting from `initial`. Used directly
/// for annulus tests; `clamp_lo`/`clamp_hi` may be empty.
struct NewtonResult {
    std::vector<double> u;
    int iterations = 0;
    int factorizations = 0;
    double residual = 0.0;
};
NewtonResult newton_solve(const Operator& op, const std::vector<double>& boundary, std::vector<double> initial,
                          double tol, int max_iter, const std::vector<double>& clamp_lo = {},
                          const std::vector<double>& clamp_hi = {});

/// sup|u|, sup|w u_w| and the e^u range on circles |w| = r about each pole.
std::vector<CircleRow> blowup_check(const Solution& sol, const std::vector<double>& radii);

/// κ_g + 4 for g = |U|²/m², m = e^u h; NaN where the stencil touches a pole.
/// Throws ZeroOfU if a zero of U lies in the evaluation region.
ScalarField bryant_check(const ScalarField& u, const MetricField& h, const RationalCubicDifferential& U);

}  // namespace sfcy
