#pragma once

// Orchestration: configuration, report assembly and the subcommands of the
// command-line driver.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "sfcy/developing.hpp"

namespace sfcy {

using Json = nlohmann::ordered_json;

/// Thresholds the run asserts against. Every report entry records the one it used.
struct Tolerances {
    double model_order = 1.9;        ///< measured order of the model residual
    double residual = 1e-8;          ///< final solver residual
    double monotone_factor = 10.0;   ///< allowed increase between stages, in units of the solver tol
    double runtime_seconds = 300.0;
    double puncture_sup = 0.05;      ///< sup|u| and sup|w u_w| on the smallest probe circle
    double metric_ratio = 0.05;      ///< |e^ψ/|log|w|²| − 1|
    double det_drift = 1e-6;
    double eigenvalue = 1e-2;        ///< |eig − 1| of the holonomy
    double decay_slope = 0.1;        ///< |slope + 1|
    double blaschke_metric = 1e-10;
    double blaschke_cubic = 1e-10;
    double monge_ampere = 1e-3;
    double quadrature = 1e-6;
    double asymptote_change = 0.05;  ///< resolution change of the Poisson asymptote constant
    double bryant = 1e-3;            ///< |K + 4|
};

/// Where the frame data of the holonomy subcommands comes from.
enum class FrameSource { Auto, Model, Blaschke, Solved };

struct RunConfig {
    // U = N/D in the affine chart, or a declared divisor when `poles` is nonempty
    std::vector<cplx> numerator{1.0};
    std::vector<cplx> denominator{-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0};
    std::vector<ExtPoint> poles, zeros;
    cplx scale = 1.0;

    SolverConfig solver;
    TransportOptions transport;
    FrameSource source = FrameSource::Auto;
    double blaschke_k = 0.0;                    ///< constant k of the closed-form model pair
    std::vector<double> ladder{6.0, 8.0, 10.0};  ///< loop heights y = −log|w|
    std::vector<double> blaschke_ladder{8.0, 10.0, 12.0};
    std::vector<double> winding_levels{6.0, 10.0};
    double decay_from = 5.0, decay_to = 10.0;
    double blaschke_decay_from = 20.0, blaschke_decay_to = 40.0;
    int ma_nodes = 41;
    double ma_level = 8.0, ma_width = 1.0;
    std::vector<std::array<int, 2>> greens_grids{{96, 32}, {160, 48}};
    std::vector<int> model_rows{121, 241, 481};
    int pole = -1;  ///< restrict per-pole analyses (−1: all)
    unsigned seed = 7;
    Tolerances tol;
    std::string out_dir = "out";

    RationalCubicDifferential cubic() const;
    /// Throws ConfigError.
    void validate() const;
    Json to_json() const;
    static RunConfig from_json(const Json& j);
    static RunConfig load(const std::string& path);
};

/// JSON report with pass/fail bookkeeping.
class Report {
public:
    explicit Report(const RunConfig& config);

    /// Records `value relation tolerance` under `path`; relation is one of <, <=, >, >=.
    bool check(const std::string& path, double value, const std::string& relation, double tolerance);
    bool equals(const std::string& path, const Json& value, const Json& expected);
    /// Unasserted diagnostic.
    void note(const std::string& path, const Json& value);
    /// Wall-clock quantities go to a separate section so the rest is reproducible.
    void timing(const std::string& key, double seconds);
    bool timing_check(const std::string& key, double seconds, double limit);
    void error(const std::string& where, const std::exception& e);

    bool passed() const { return failures_ == 0; }
    int failures() const { return failures_; }
    int assertions() const { return assertions_; }
    const Json& json() const { return root_; }
    Json& section(const std::string& path);
    void write(const std::string& path) const;

private:
    bool record(Json& where, const std::string& path, Json entry, bool ok);
    Json root_;
    int failures_ = 0;
    int assertions_ = 0;
};

/// One acceptance criterion and the report paths that decide it.
struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail;
};

std::uint64_t config_hash(const RunConfig& config);

/// Runs a subcommand, writing report.json, fields/*.csv and plots/*.svg under
/// config.out_dir. Module errors are caught and recorded as failures.
Report run(const std::string& subcommand, const RunConfig& config);

/// The full acceptance suite; `criteria` receives one line per criterion.
Report verify_all(const RunConfig& config, std::vector<CriterionResult>* criteria = nullptr);

const std::vector<std::string>& subcommands();

}  // namespace sfcy
