#pragma once

#include <vector>

#include "sfcy/geometry.hpp"

namespace sfcy {

/// 1/(4r²(log r)²), the displayed closed form of the curvature profile near a pole.
double kappa_tilde(double r);

struct QuadratureCheck {
    double numeric = 0.0;
    double closed_form = 0.0;
    double error() const { return std::abs(numeric - closed_form); }
};

/// ∫₀^{2π} (2r − 2ρ cos φ)/(r² + ρ² − 2rρ cos φ) dφ against 4π/r (ρ < r) or 0.
/// Throws OnDiagonal when r and ρ are too close to resolve.
QuadratureCheck inner_integral(double r, double rho);

/// −(1/r)∫₀^r dρ/(ρ (log ρ)²) against 1/(r log r), for 0 < r < 1.
QuadratureCheck g_prime(double r);

/// log|log r|, the antiderivative of 1/(r log r).
double g_potential(double r);

/// −(1/4π)∫_{|Q|<δ} log|r − Q| / (|Q|²(log|Q|)²) dA(Q) by nested quadrature:
/// the log-potential of the model curvature profile on a small disk.
double disk_potential(double r, double delta);

/// Poisson problem Δ_k f = source on a sphere grid whose pole patches end at
/// an inner circle; the disk inside enters through a flux condition.
struct PoissonProblem {
    MetricField k;                       ///< background metric (flat near poles)
    std::vector<double> source;          ///< jacobian · Δ_k f at every node (native measure)
    std::vector<double> inner_flux;      ///< ∂f/∂(log ρ) on the inner row of each pole
    std::vector<double> disk_integral;   ///< ∫ source dV_k inside each inner circle
};

struct AsymptoteRow {
    int pole = 0;
    double radius = 0.0;
    double sup_deviation = 0.0;  ///< sup over the circle of |f − log|log r²||
};

struct PoissonSolution {
    ScalarField f;
    double imbalance = 0.0;   ///< relative Gauss–Bonnet defect of the source
    double multiplier = 0.0;  ///< constant absorbed by the discrete system
    std::vector<AsymptoteRow> asymptote;
};

/// The upper-barrier problem: source 2κ_k − 2κ̃ with κ̃ = −½Δ_k log|log|w|²|
/// in the blend disk of each pole and a constant plateau elsewhere, the
/// plateau fixed by Gauss–Bonnet balance.
PoissonProblem barrier_poisson_problem(std::shared_ptr<const CompositeGrid> grid);

/// Solves with zero k-mean. Throws UnbalancedSource if the source integral
/// relative to its absolute integral exceeds `balance_tol`.
PoissonSolution solve_poisson(const PoissonProblem& problem, double balance_tol = 1e-6,
                              const std::vector<double>& radii = {1e-2, 1e-3, 1e-4});

/// sup over the canonical circle |w_j| = r of |value − target(r)|, by interpolation.
double circle_sup(const CompositeGrid& g, const std::vector<double>& values, int pole, double r,
                  double (*target)(double), int samples = 64);

}  // namespace sfcy
