#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sfcy/blaschke.hpp"
#include "sfcy/titeica.hpp"

namespace sfcy {

using Vector3c = Eigen::Vector3cd;

/// Affine metric e^ψ|ds|² and cubic differential U ds³ in one conformal
/// coordinate s. Log-chart sources use s = x + iy with z = e^{is}.
class FrameData {
public:
    virtual ~FrameData() = default;
    virtual double psi(cplx s) const = 0;
    /// ∂ψ/∂s = ½(ψ_x − iψ_y)
    virtual cplx psi_s(cplx s) const = 0;
    virtual cplx cubic(cplx s) const = 0;
    virtual std::string name() const = 0;
};

/// ψ ≡ level, U ≡ 0.
class FlatData final : public FrameData {
public:
    explicit FlatData(double level = 0.0) : level_(level) {}
    double psi(cplx) const override { return level_; }
    cplx psi_s(cplx) const override { return 0.0; }
    cplx cubic(cplx) const override { return 0.0; }
    std::string name() const override { return "flat"; }

private:
    double level_;
};

/// e^ψ = 2y e^{−2y}, U = −i e^{2is}: the metric |log|z|²||dz|² with U = dz³/z.
class ModelLogChart final : public FrameData {
public:
    double psi(cplx s) const override;
    cplx psi_s(cplx s) const override;
    cplx cubic(cplx s) const override;
    std::string name() const override { return "model"; }
};

/// Metric and cubic of a holomorphic pair, pulled back by z = e^{is} with
/// log z = is.
class BlaschkeLogChart final : public FrameData {
public:
    explicit BlaschkeLogChart(HoloPair pair) : pair_(std::move(pair)) {}
    double psi(cplx s) const override;
    cplx psi_s(cplx s) const override;
    cplx cubic(cplx s) const override;
    std::string name() const override { return "blaschke"; }
    const HoloPair& pair() const { return pair_; }

private:
    HoloPair pair_;
};

/// Solved metric e^u h near pole `pole`, in the log chart of its canonical
/// coordinate. ψ = g + log 2y − 2y with g = u + log(λ_h/2y) interpolated by
/// C¹ tensor cubic Hermite splines in (y, x) on the patch nodes.
class SolvedLogChart final : public FrameData {
public:
    SolvedLogChart(const Solution& sol, int pole);
    double psi(cplx s) const override;
    cplx psi_s(cplx s) const override;
    cplx cubic(cplx s) const override;
    std::string name() const override { return "solved"; }
    /// Smallest y with a full interpolation stencil.
    double y_min() const { return y_.size() > 2 ? y_[1] : INFINITY; }
    double y_max() const { return y_.size() > 2 ? y_[y_.size() - 2] : -INFINITY; }

private:
    // value and (∂x, ∂y) of g
    void eval(cplx s, double& g, double& gx, double& gy) const;

    std::vector<double> y_;       // rows, increasing (y = −T)
    int ntheta_ = 0;
    double dtheta_ = 0.0;
    std::vector<double> g_;        // row-major [row][angle]
    std::vector<double> slope_w_;  // 3 weights per row for ∂g/∂y at the row
    std::vector<int> slope_i_;     // first row of that 3-point stencil
};

/// Position f, tangent f_z (f_z̄ = conj f_z); ξ = (0, 0, 1) is fixed.
struct FrameState {
    Vector3c fz = Vector3c::Zero();
    Eigen::Vector3d f = Eigen::Vector3d::Zero();

    Eigen::Vector3d fx() const { return 2.0 * fz.real(); }
    Eigen::Vector3d fy() const { return -2.0 * fz.imag(); }
    /// det(f_z, f_z̄, ξ)
    cplx det() const;
    /// |det(f_z, f_z̄, ξ)e^{−ψ} − i/2|
    double det_drift(double psi) const;
};

/// Frame with det(f_z, f_z̄, ξ) = (i/2)e^ψ built from a seed direction for f_z
/// (default (1, −i, 0)), rescaled by a positive factor. Throws DegenerateSeed
/// if the seed spans no oriented tangent plane.
FrameState init_frame(double psi, const std::optional<Vector3c>& seed = std::nullopt,
                      const Eigen::Vector3d& position = Eigen::Vector3d::Zero());

/// Parametrized path t ∈ [0, 1] in the coordinate s.
struct Path {
    std::function<cplx(double)> at;
    std::function<cplx(double)> velocity;
    double length = 0.0;
};
Path segment(cplx a, cplx b);
/// x from x0 to x0 + 2π·turns at height y (a loop |z| = e^{−y} in the log chart).
Path horizontal_loop(double x0, double y, double turns = 1.0);
/// Counterclockwise circle about c starting at angle a0.
Path circle(cplx c, double r, double a0 = 0.0);

struct TransportOptions {
    double max_step = 0.01;  ///< bound on |Δs| per RK4 step
    int min_steps = 1;
    int record_stride = 0;   ///< keep every n-th state (0: end only)
    int samples = 0;         ///< if > 0: step count a multiple of this, states kept at t = k/samples
};

struct TransportResult {
    FrameState end;
    double max_det_drift = 0.0;
    int steps = 0;
    std::vector<double> t;            ///< parameters of recorded states
    std::vector<FrameState> states;
};

/// RK4 integration of f_z, f along the path:
/// d f_z = (ψ_s f_z + U e^{−ψ} f_z̄) ds + ½e^ψ ξ ds̄,  df = 2 Re(f_z ds).
/// The step count is fixed up front from |Δs| ≤ max_step and |Δs|·‖A‖ ≤ 0.1.
/// Throws StepUnderflow if the data is singular on the path.
TransportResult transport(const FrameState& start, const Path& path, const FrameData& data,
                          const TransportOptions& options = {});

/// A with (ξ, f_x, f_y)_t = A (ξ, f_x, f_y) for a unit direction `dir` in s.
Eigen::Matrix3d transport_matrix(const FrameData& data, cplx s, cplx dir);

struct AffineMap2 {
    Eigen::Matrix2d linear = Eigen::Matrix2d::Identity();
    Eigen::Vector2d translation = Eigen::Vector2d::Zero();

    Eigen::Vector2d operator()(const Eigen::Vector2d& p) const { return linear * p + translation; }
    AffineMap2 conjugated_by(const AffineMap2& g) const;  ///< g ∘ this ∘ g⁻¹
    AffineMap2 inverse() const;
};

/// Holonomy of the loop x: x0 → x0 + 2π at height y, in coordinates centred
/// at the base point with the base tangent frame as basis.
struct HolonomyResult {
    AffineMap2 map;
    double y = 0.0;
    double x0 = 0.0;
    double det_drift = 0.0;
    double condition = 0.0;  ///< condition number of the base frame
    TransportResult loop;    ///< recorded states along the loop
    FrameState base;
};
HolonomyResult holonomy(const FrameData& data, double y, double x0 = 0.0, const TransportOptions& options = {});

/// Holonomy of an arbitrary closed path starting at path.at(0), in the same
/// normalized coordinates.
HolonomyResult loop_holonomy(const FrameData& data, const Path& loop, const TransportOptions& options = {});

enum class HolonomyTag { Identity, PureTranslation, ParabolicWithFixedPoint, ParabolicNoFixedPoint };
std::string to_string(HolonomyTag tag);

struct ClassifyThresholds {
    double unipotent = 1e-2;     ///< max |eigenvalue − 1|
    double nilpotent = 1e-6;     ///< ‖P − I‖ above this is a nontrivial linear part
    double translation = 1e-6;   ///< translation (or its part off the range of P − I) above this is nonzero
};

/// Thresholds scaled from a measured noise floor: 100× the floor, never
/// below 1e-9.
ClassifyThresholds calibrated_thresholds(double noise_floor);

struct HolonomyClass {
    HolonomyTag tag = HolonomyTag::Identity;
    std::complex<double> eig1, eig2;
    double eig_deviation = 0.0;   ///< max |eig − 1|
    double nilpotent_norm = 0.0;  ///< ‖P − I‖ (Frobenius)
    double translation_norm = 0.0;
    double off_range = 0.0;       ///< |t| off the range of P − I
    std::optional<Eigen::Vector2d> fixed_point;
};

/// Throws NotUnipotent if the eigenvalues are not both within
/// `thresholds.unipotent` of 1.
HolonomyClass classify(const AffineMap2& map, const ClassifyThresholds& thresholds = {});

/// Limit of dev along x = x0 as y → ∞, from transports to y0 + 20, 25, 30
/// and rate-one Richardson extrapolation, in the coordinates of the base
/// (x0, y0). Throws NoConvergence if the two extrapolants disagree by more
/// than tol.
struct DevInfinity {
    Eigen::Vector2d point = Eigen::Vector2d::Zero();
    double spread = 0.0;
    double det_drift = 0.0;
};
DevInfinity dev_infinity(const FrameData& data, double x0, double y0, double tol = 1e-8,
                         const TransportOptions& options = {});

/// Least-squares slope of log|dev_y| against y along x = x0.
struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    int samples = 0;
};
DecayFit decay_rate(const FrameData& data, double x0, double y1, double y2, const TransportOptions& options = {});

/// Winding number of a closed polyline about `center` (real-valued; an
/// integer for closed curves).
double winding_of_polyline(const std::vector<Eigen::Vector2d>& pts, const Eigen::Vector2d& center = {0, 0});

struct WindingResult {
    int winding = 0;
    double raw = 0.0;            ///< winding before rounding
    double start_x = 0.0;        ///< loop parameter of the crossing with L
    double crossing_slope = 0.0; ///< |dσ/dx| / max|dev − dev(∞)| at the crossing
    std::vector<Eigen::Vector2d> curve;  ///< developed loop relative to dev(∞)
};

/// Winding of the developed loop at height y about dev(∞), started on the
/// invariant line of the holonomy. Returns 0 if the developed loop misses
/// the line; throws TangentialCrossing if it only touches it, and
/// IllConditioned if the linear part has no invariant line.
WindingResult winding_number(const HolonomyResult& hol, const Eigen::Vector2d& dev_inf,
                             const ClassifyThresholds& thresholds = {});

/// Graph samples (α, φ, ∇φ) over [x0, x0 + (nx−1)dx] × [y0, y0 + (ny−1)dy]
/// from transports along a comb of paths (up x = x0, then along each row).
ImmersionPatch transported_patch(const FrameData& data, int nx, int ny, double x0, double y0, double dx, double dy,
                                 double* det_drift = nullptr, const TransportOptions& options = {});

struct MongeAmpereStats {
    HessianStats hessian;
    double det_drift = 0.0;
};
MongeAmpereStats monge_ampere_check(const FrameData& data, int n, double x0, double y0, double width,
                                    const TransportOptions& options = {});

/// ‖ΔP‖ + |Δt| between the loop at height y and the homotopic loop reached
/// by going up to y + dy, around, and back, both based at (x0, y).
double homotopy_discrepancy(const FrameData& data, double y, double x0, double dy = 1.0,
                            const TransportOptions& options = {});

/// Everything measured at one pole for one loop height.
struct LoopReport {
    double y = 0.0;
    HolonomyResult holonomy;
    double noise = 0.0;                 ///< noise floor used for the thresholds
    ClassifyThresholds thresholds;
    HolonomyClass cls;
    DevInfinity dev_inf;
    double fixed_point_residual = 0.0;  ///< |(P − I)d + t| with d = dev(∞)
    WindingResult winding;
};

/// Classification thresholds are calibrated from the largest of the flat
/// floor, the defects |tr P − 2| and |det P − 1| (zero for any unipotent
/// map) and the homotopy discrepancy of the data.
LoopReport analyze_loop(const FrameData& data, double y, double x0, double flat_floor,
                        const TransportOptions& options = {});

/// Noise floor of transport: deviation from the identity of the holonomy of
/// a contractible circle in the flat control.
double flat_noise_floor(const TransportOptions& options = {});

}  // namespace sfcy
