#include "sfcy/pipeline.hpp"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include "sfcy/errors.hpp"
#include "sfcy/greens.hpp"

#ifndef SFCY_VERSION
#define SFCY_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;

namespace sfcy {

namespace {

constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------- config I/O

Json cplx_json(cplx c) { return c.imag() == 0.0 ? Json(c.real()) : Json::array({c.real(), c.imag()}); }

cplx json_cplx(const Json& j, const std::string& where) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError(where + ": expected a number or [re, im]");
}

Json point_json(const ExtPoint& p) { return p.infinity ? Json("inf") : cplx_json(p.z); }

ExtPoint json_point(const Json& j, const std::string& where) {
    if (j.is_string()) {
        if (j.get<std::string>() == "inf") return ExtPoint::inf();
        throw ConfigError(where + ": the only named point is \"inf\"");
    }
    return ExtPoint::at(json_cplx(j, where));
}

const char* source_name(FrameSource s) {
    switch (s) {
        case FrameSource::Model: return "model";
        case FrameSource::Blaschke: return "blaschke";
        case FrameSource::Solved: return "solved";
        default: return "auto";
    }
}

// Object reader that rejects unknown keys.
class Fields {
public:
    Fields(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        const Json* v = find(key);
        if (!v) return;
        const std::string at = where_ + "." + key;
        if constexpr (std::is_same_v<T, cplx>) {
            out = json_cplx(*v, at);
        } else if constexpr (std::is_same_v<T, std::vector<cplx>>) {
            if (!v->is_array()) throw ConfigError(at + ": expected an array");
            out.clear();
            for (const Json& e : *v) out.push_back(json_cplx(e, at));
        } else if constexpr (std::is_same_v<T, std::vector<ExtPoint>>) {
            if (!v->is_array()) throw ConfigError(at + ": expected an array");
            out.clear();
            for (const Json& e : *v) out.push_back(json_point(e, at));
        } else {
            try {
                out = v->get<T>();
            } catch (const Json::exception& e) {
                throw ConfigError(at + ": " + e.what());
            }
        }
    }

    template <class F>
    void sub(const char* key, F&& f) {
        if (const Json* v = find(key)) {
            Fields inner(*v, where_ + "." + key);
            f(inner);
            inner.finish();
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError("unknown key " + where_ + "." + it.key());
    }

private:
    const Json* find(const char* key) {
        seen_.insert(key);
        const auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }
    const Json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

Json tolerances_json(const Tolerances& t) {
    return {{"model_order", t.model_order},         {"residual", t.residual},
            {"monotone_factor", t.monotone_factor}, {"runtime_seconds", t.runtime_seconds},
            {"puncture_sup", t.puncture_sup},       {"metric_ratio", t.metric_ratio},
            {"det_drift", t.det_drift},             {"eigenvalue", t.eigenvalue},
            {"decay_slope", t.decay_slope},         {"blaschke_metric", t.blaschke_metric},
            {"blaschke_cubic", t.blaschke_cubic},   {"monge_ampere", t.monge_ampere},
            {"quadrature", t.quadrature},           {"asymptote_change", t.asymptote_change},
            {"bryant", t.bryant}};
}

// ------------------------------------------------------------ small writers

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string level_tag(double y) {
    std::string s = fmt(y);
    std::replace(s.begin(), s.end(), '.', 'p');
    return s;
}

void write_curve_csv(const fs::path& path, const std::vector<Eigen::Vector2d>& pts) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out.precision(17);
    out << "x,y\n";
    for (const auto& p : pts) out << p.x() << ',' << p.y() << '\n';
}

// Developed loops relative to dev(∞); each curve is scaled to its own extent so
// loops at different heights stay readable.
void write_curves_svg(const fs::path& path, const std::string& title,
                      const std::vector<std::pair<std::string, std::vector<Eigen::Vector2d>>>& curves) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    const int size = 420, margin = 30, half = size / 2;
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size + 2 * margin << "\" height=\""
        << size + 2 * margin + 16 * curves.size() << "\">\n";
    out << "<text x=\"" << margin << "\" y=\"20\" font-size=\"12\" font-family=\"sans-serif\">" << title
        << " (each curve normalized, origin = limit point)</text>\n";
    const int cx = margin + half, cy = margin + half;
    out << "<line x1=\"" << margin << "\" y1=\"" << cy << "\" x2=\"" << margin + size << "\" y2=\"" << cy
        << "\" stroke=\"#ccc\"/>\n<line x1=\"" << cx << "\" y1=\"" << margin << "\" x2=\"" << cx << "\" y2=\""
        << margin + size << "\" stroke=\"#ccc\"/>\n";
    for (std::size_t k = 0; k < curves.size(); ++k) {
        double ext = 0.0;
        for (const auto& p : curves[k].second) ext = std::max({ext, std::abs(p.x()), std::abs(p.y())});
        if (!(ext > 0.0)) ext = 1.0;
        out << "<polyline fill=\"none\" stroke=\"" << colors[k % 6] << "\" points=\"";
        for (const auto& p : curves[k].second)
            out << fmt(cx + 0.95 * half * p.x() / ext) << ',' << fmt(cy - 0.95 * half * p.y() / ext) << ' ';
        out << "\"/>\n<text x=\"" << margin << "\" y=\"" << size + 2 * margin + 12 + 16 * k
            << "\" font-size=\"12\" font-family=\"sans-serif\" fill=\"" << colors[k % 6] << "\">"
            << curves[k].first << "</text>\n";
    }
    out << "<circle cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"3\" fill=\"black\"/>\n</svg>\n";
}

double max_finite_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v)
        if (std::isfinite(x)) m = std::max(m, std::abs(x));
    return m;
}

// ----------------------------------------------------------------- context

struct Subject {
    std::string label;
    std::shared_ptr<const FrameData> data;
    std::vector<double> ladder;
};

struct Context {
    const RunConfig& cfg;
    Report& rep;
    fs::path out;
    std::mt19937 rng;
    std::optional<Solution> sol;
    std::optional<double> floor;
    double max_drift = 0.0;
    bool fields_written = false;

    Context(const RunConfig& c, Report& r) : cfg(c), rep(r), out(c.out_dir), rng(c.seed) {}

    void drift(double d) { max_drift = std::max(max_drift, std::isfinite(d) ? d : INFINITY); }

    double flat_floor() {
        if (!floor) floor = flat_noise_floor(cfg.transport);
        return *floor;
    }

    const Solution& solution() {
        if (sol) return *sol;
        const RationalCubicDifferential U = cfg.cubic();
        validate_divisor(U);
        sol = solve(U, cfg.solver);
        rep.timing("solve", sol->seconds);
        rep.note("solver/nodes", sol->grid->size());
        for (std::size_t k = 0; k < sol->stages.size(); ++k) {
            const StageLog& s = sol->stages[k];
            rep.note("solver/stages/stage_" + std::to_string(k),
                     {{"excision_T", s.excision_T},
                      {"inner_T", s.inner_T},
                      {"newton_iterations", s.newton_iterations},
                      {"factorizations", s.factorizations},
                      {"residual", s.residual},
                      {"max_increase", s.max_increase},
                      {"lower_margin", s.lower_margin},
                      {"upper_margin", s.upper_margin},
                      {"sandwich_violation", s.sandwich_violation},
                      {"probe_change", s.probe_change}});
            rep.timing("stage_" + std::to_string(k), s.seconds);
        }
        return *sol;
    }

    void write_solution_fields() {
        if (fields_written) return;
        const Solution& s = solution();
        write_field_csv((out / "fields" / "u.csv").string(), s.u);
        write_field_csv((out / "fields" / "lower_barrier.csv").string(), s.barriers.lower);
        write_field_csv((out / "fields" / "upper_barrier.csv").string(), s.barriers.upper);
        write_field_svg((out / "plots" / "u.svg").string(), s.u, 2.0, 120, "u");
        fields_written = true;
    }

    std::vector<int> pole_indices(std::size_t count) const {
        if (cfg.pole >= static_cast<int>(count))
            throw ConfigError("pole index " + std::to_string(cfg.pole) + " out of range (" + std::to_string(count) +
                              " poles)");
        if (cfg.pole >= 0) return {cfg.pole};
        std::vector<int> all(count);
        for (std::size_t j = 0; j < count; ++j) all[j] = static_cast<int>(j);
        return all;
    }

    std::vector<Subject> solved_subjects() {
        const Solution& s = solution();
        std::vector<Subject> out_;
        for (int j : pole_indices(s.grid->atlas()->poles().size()))
            out_.push_back({"pole_" + std::to_string(j), std::make_shared<SolvedLogChart>(s, j), cfg.ladder});
        return out_;
    }

    Subject model_subject() const { return {"model", std::make_shared<ModelLogChart>(), cfg.ladder}; }

    Subject blaschke_subject() const {
        return {"blaschke", std::make_shared<BlaschkeLogChart>(model_fg(ModelData::standard(16, cfg.blaschke_k))),
                cfg.blaschke_ladder};
    }

    // Frame data for the holonomy and winding subcommands.
    std::vector<Subject> configured_subjects() {
        FrameSource s = cfg.source;
        if (s == FrameSource::Auto) {
            // U = dz³/z exactly is the pure model
            const bool model = cfg.poles.empty() && cfg.numerator == std::vector<cplx>{1.0} &&
                               cfg.denominator == std::vector<cplx>{0.0, 1.0} && cfg.scale == 1.0;
            s = model ? FrameSource::Model : FrameSource::Solved;
        }
        rep.note("source", source_name(s));
        switch (s) {
            case FrameSource::Model: return {model_subject()};
            case FrameSource::Blaschke: return {blaschke_subject()};
            default: return solved_subjects();
        }
    }
};

// Runs f(subject) concurrently and hands the results back in subject order.
template <class F>
auto per_subject(const std::vector<Subject>& subjects, F f) {
    using R = decltype(f(subjects.front()));
    std::vector<std::future<R>> jobs;
    for (const Subject& s : subjects) jobs.push_back(std::async(std::launch::async, [f, &s] { return f(s); }));
    return jobs;
}

// Counts how many randomly conjugated, noise-perturbed representatives of the
// four classes the loop's thresholds recover.
Json synthetic_calibration(const LoopReport& r, std::mt19937& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const double s = std::max(r.cls.nilpotent_norm, 10.0 * r.thresholds.nilpotent);
    Eigen::Matrix2d N;
    N << 0, s, 0, 0;
    const Eigen::Matrix2d I = Eigen::Matrix2d::Identity();
    const struct {
        Eigen::Matrix2d P;
        Eigen::Vector2d t;
        HolonomyTag tag;
    } reps[] = {{I, {0, 0}, HolonomyTag::Identity},
                {I, {s, 0}, HolonomyTag::PureTranslation},
                {I + N, {0, 0}, HolonomyTag::ParabolicWithFixedPoint},
                {I + N, {0, s}, HolonomyTag::ParabolicNoFixedPoint}};
    int total = 0, correct = 0;
    for (const auto& rep : reps)
        for (int trial = 0; trial < 8; ++trial) {
            const double phi = pi * U(rng), a = std::exp(0.35 * U(rng));
            AffineMap2 g;
            g.linear << std::cos(phi) * a, -std::sin(phi) / a, std::sin(phi) * a, std::cos(phi) / a;
            g.translation << U(rng), U(rng);
            AffineMap2 m = AffineMap2{rep.P, rep.t}.conjugated_by(g);
            for (int i = 0; i < 2; ++i) {
                m.translation[i] += r.noise * U(rng);
                for (int k = 0; k < 2; ++k) m.linear(i, k) += r.noise * U(rng);
            }
            ++total;
            try {
                if (classify(m, r.thresholds).tag == rep.tag) ++correct;
            } catch (const Error&) {
            }
        }
    return {{"correct", correct}, {"total", total}};
}

// ---------------------------------------------------------------- criteria

void model_identity(Context& ctx, const std::string& at) {
    const RationalCubicDifferential U({1.0}, {0.0, 1.0});
    std::vector<double> err;
    for (int rows : ctx.cfg.model_rows) {
        auto g = CompositeGrid::polar_annulus(-1.0, -4.0, rows, 16);
        MetricField m{g, std::vector<double>(g->size())};
        for (std::size_t n = 0; n < g->size(); ++n) m.lambda[n] = 2.0 * std::abs(g->log_radius(int(n)));
        err.push_back(max_finite_abs(residual(ScalarField(g), m, U).values));
        ctx.rep.note(at + "/rows_" + std::to_string(rows) + "/max_residual", err.back());
    }
    for (std::size_t k = 0; k + 1 < err.size(); ++k) {
        const double ratio = double(ctx.cfg.model_rows[k + 1] - 1) / double(ctx.cfg.model_rows[k] - 1);
        ctx.rep.check(at + "/order_" + std::to_string(k), std::log(err[k] / err[k + 1]) / std::log(ratio), ">=",
                      ctx.cfg.tol.model_order);
    }
}

void barrier_certificates(Context& ctx, const std::string& at) {
    const Solution& s = ctx.solution();
    ctx.rep.check(at + "/lower_margin", s.barriers.lower_margin, ">", 0.0);
    ctx.rep.check(at + "/upper_margin", s.barriers.upper_margin, "<", 0.0);
    ctx.rep.check(at + "/gap", s.barriers.gap, ">", 0.0);
    ctx.rep.note(at + "/constants", {{"alpha", s.barriers.alpha}, {"beta", s.barriers.beta}, {"c", s.barriers.c}});
    for (std::size_t k = 0; k < s.stages.size(); ++k)
        ctx.rep.check(at + "/stage_" + std::to_string(k) + "/sandwich_violation", s.stages[k].sandwich_violation,
                      "<=", 0.0);
}

void solver_convergence(Context& ctx, const std::string& at) {
    const Solution& s = ctx.solution();
    ctx.rep.check(at + "/residual", s.residual, "<", ctx.cfg.tol.residual);
    const double allowed = ctx.cfg.tol.monotone_factor * ctx.cfg.solver.tol;
    for (std::size_t k = 1; k < s.stages.size(); ++k)
        ctx.rep.check(at + "/stage_" + std::to_string(k) + "/max_increase", s.stages[k].max_increase, "<=", allowed);
    // 512 × 512 equivalent resolution, counted in nodes
    std::size_t live = 0;
    for (const Node& n : s.grid->nodes()) live += n.role != NodeRole::Unused;
    ctx.rep.check(at + "/live_nodes", double(live), ">=", 512.0 * 512.0);
    ctx.rep.timing_check("solve_budget", s.seconds, ctx.cfg.tol.runtime_seconds);
}

std::vector<CircleRow> circle_rows(Context& ctx) { return blowup_check(ctx.solution(), ctx.cfg.solver.probe_radii); }

void puncture_asymptotics(Context& ctx, const std::string& at) {
    const auto rows = circle_rows(ctx);
    std::map<int, std::vector<CircleRow>> by_pole;
    for (const CircleRow& r : rows) by_pole[r.pole].push_back(r);
    for (const auto& [pole, rs] : by_pole) {
        const std::string p = at + "/pole_" + std::to_string(pole);
        for (std::size_t k = 0; k < rs.size(); ++k)
            ctx.rep.note(p + "/r_" + fmt(rs[k].radius), {{"sup_u", rs[k].sup_u}, {"sup_zuz", rs[k].sup_zuz}});
        for (std::size_t k = 1; k < rs.size(); ++k) {
            const std::string r = "r_" + fmt(rs[k].radius);
            ctx.rep.check(p + "/sup_u_drop_" + r, rs[k - 1].sup_u - rs[k].sup_u, ">", 0.0);
            ctx.rep.check(p + "/sup_zuz_drop_" + r, rs[k - 1].sup_zuz - rs[k].sup_zuz, ">", 0.0);
        }
        ctx.rep.check(p + "/sup_u_innermost", rs.back().sup_u, "<", ctx.cfg.tol.puncture_sup);
        ctx.rep.check(p + "/sup_zuz_innermost", rs.back().sup_zuz, "<", ctx.cfg.tol.puncture_sup);
    }
}

void metric_asymptotics(Context& ctx, const std::string& at) {
    const auto rows = circle_rows(ctx);
    double r_min = INFINITY;
    for (const CircleRow& r : rows) r_min = std::min(r_min, r.radius);
    for (const CircleRow& r : rows) {
        if (r.radius != r_min) continue;
        const std::string p = at + "/pole_" + std::to_string(r.pole);
        ctx.rep.note(p + "/radius", r.radius);
        ctx.rep.check(p + "/max_ratio_excess", r.max_ratio - 1.0, "<=", ctx.cfg.tol.metric_ratio);
        ctx.rep.check(p + "/min_ratio_deficit", 1.0 - r.min_ratio, "<=", ctx.cfg.tol.metric_ratio);
    }
}

void bryant_curvature(Context& ctx, const std::string& at) {
    const Solution& s = ctx.solution();
    const ScalarField dev = bryant_check(s.u, s.h, ctx.cfg.cubic());
    int nodes = 0;
    for (double v : dev.values) nodes += std::isfinite(v);
    ctx.rep.note(at + "/nodes", nodes);
    ctx.rep.check(at + "/max_deviation", max_finite_abs(dev.values), "<", ctx.cfg.tol.bryant);
    write_field_csv((ctx.out / "fields" / "curvature_deviation.csv").string(), dev);
}

void flat_control(Context& ctx, const std::string& at) {
    const HolonomyResult h = loop_holonomy(FlatData(), circle(0.0, 1.0), ctx.cfg.transport);
    ctx.drift(h.det_drift);
    const double floor = ctx.flat_floor();
    ctx.rep.note(at + "/noise_floor", floor);
    ctx.rep.equals(at + "/class", to_string(classify(h.map, calibrated_thresholds(floor)).tag),
                   to_string(HolonomyTag::Identity));
}

// Holonomy on a ladder of loops; `windings` also asserts winding +1 on each.
void holonomy_ladder(Context& ctx, const std::string& at, const std::vector<Subject>& subjects, bool windings) {
    const double floor = ctx.flat_floor();
    const TransportOptions opt = ctx.cfg.transport;
    auto jobs = per_subject(subjects, [&](const Subject& s) {
        std::vector<LoopReport> v;
        for (double y : s.ladder) v.push_back(analyze_loop(*s.data, y, 0.0, floor, opt));
        return v;
    });
    const Tolerances& tol = ctx.cfg.tol;
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        const std::string p = at + "/" + subjects[i].label;
        std::vector<LoopReport> loops;
        try {
            loops = jobs[i].get();
        } catch (const Error& e) {
            ctx.rep.error(p, e);
            continue;
        }
        std::vector<std::pair<std::string, std::vector<Eigen::Vector2d>>> curves;
        for (std::size_t k = 0; k < loops.size(); ++k) {
            const LoopReport& r = loops[k];
            const std::string q = p + "/y_" + level_tag(r.y);
            const AffineMap2& m = r.holonomy.map;
            ctx.drift(r.holonomy.det_drift);
            ctx.drift(r.dev_inf.det_drift);
            ctx.rep.note(q + "/linear", {{m.linear(0, 0), m.linear(0, 1)}, {m.linear(1, 0), m.linear(1, 1)}});
            ctx.rep.note(q + "/translation", {m.translation[0], m.translation[1]});
            ctx.rep.note(q + "/trace_minus_2", m.linear.trace() - 2.0);
            ctx.rep.note(q + "/nilpotent_norm", r.cls.nilpotent_norm);
            ctx.rep.note(q + "/noise", r.noise);
            ctx.rep.note(q + "/thresholds", {{"unipotent", r.thresholds.unipotent},
                                             {"nilpotent", r.thresholds.nilpotent},
                                             {"translation", r.thresholds.translation}});
            ctx.rep.note(q + "/limit_point", {r.dev_inf.point[0], r.dev_inf.point[1]});
            ctx.rep.note(q + "/fixed_point_residual", r.fixed_point_residual);
            ctx.rep.check(q + "/eigenvalue_deviation", r.cls.eig_deviation, "<", tol.eigenvalue);
            if (k > 0)
                ctx.rep.check(q + "/eigenvalue_deviation_drop", loops[k - 1].cls.eig_deviation - r.cls.eig_deviation,
                              ">", 0.0);
            ctx.rep.equals(q + "/class", to_string(r.cls.tag), to_string(HolonomyTag::ParabolicWithFixedPoint));
            const Json cal = synthetic_calibration(r, ctx.rng);
            ctx.rep.check(q + "/synthetic_calibration", cal["correct"].get<double>() / cal["total"].get<double>(),
                          ">=", 1.0);
            ctx.rep.check(q + "/det_drift", r.holonomy.det_drift, "<", tol.det_drift);
            if (windings) {
                ctx.rep.equals(q + "/winding", r.winding.winding, 1);
                ctx.rep.note(q + "/winding_raw", r.winding.raw);
            }
            curves.push_back({"y = " + fmt(r.y), r.winding.curve});
            write_curve_csv(ctx.out / "fields" / ("developed_" + subjects[i].label + "_y" + level_tag(r.y) + ".csv"),
                            r.winding.curve);
        }
        write_curves_svg(ctx.out / "plots" / ("developed_" + subjects[i].label + ".svg"),
                         "developed loops, " + subjects[i].label, curves);
    }
}

void winding_levels(Context& ctx, const std::string& at, const std::vector<Subject>& subjects) {
    const double floor = ctx.flat_floor();
    const TransportOptions opt = ctx.cfg.transport;
    const std::vector<double> levels = ctx.cfg.winding_levels;
    auto jobs = per_subject(subjects, [&](const Subject&s) {
        std::vector<LoopReport> v;
        for (double y : levels) v.push_back(analyze_loop(*s.data, y, 0.0, floor, opt));
        return v;
    });
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        const std::string p = at + "/" + subjects[i].label;
        try {
            for (const LoopReport& r : jobs[i].get()) {
                const std::string q = p + "/y_" + level_tag(r.y);
                ctx.drift(r.holonomy.det_drift);
                ctx.drift(r.dev_inf.det_drift);
                ctx.rep.equals(q + "/winding", r.winding.winding, 1);
                ctx.rep.note(q + "/raw", r.winding.raw);
                ctx.rep.note(q + "/crossing_slope", r.winding.crossing_slope);
            }
        } catch (const Error& e) {
            ctx.rep.error(p, e);
        }
    }
}

void decay_law(Context& ctx, const std::string& at, const std::vector<Subject>& subjects, double y1, double y2) {
    const TransportOptions opt = ctx.cfg.transport;
    auto jobs = per_subject(subjects, [&](const Subject& s) { return decay_rate(*s.data, 0.0, y1, y2, opt); });
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        const std::string p = at + "/" + subjects[i].label;
        try {
            const DecayFit f = jobs[i].get();
            ctx.rep.note(p + "/slope", f.slope);
            ctx.rep.note(p + "/interval", {y1, y2});
            ctx.rep.check(p + "/slope_error", std::abs(f.slope + 1.0), "<=", ctx.cfg.tol.decay_slope);
        } catch (const Error& e) {
            ctx.rep.error(p, e);
        }
    }
}

void blaschke_round_trip(Context& ctx, const std::string& at) {
    const double k = ctx.cfg.blaschke_k;
    const HoloPair pair = model_fg(ModelData::standard(16, k));
    double metric_err = 0.0, cubic_err = 0.0;
    for (double r : {1e-3, 1e-5, 1e-9})
        for (double th : {0.0, 1.0, 2.5, -2.0}) {
            const cplx z = std::polar(r, th);
            const double closed = std::abs(std::log(r * r)) - 4.0 * pi - 2.0 * k;
            metric_err = std::max(metric_err, std::abs(metric_from_fg(pair, z) - closed));
            cubic_err = std::max(cubic_err, std::abs(cubic_from_fg(pair, z) * z - 1.0));
        }
    ctx.rep.check(at + "/metric_error", metric_err, "<=", ctx.cfg.tol.blaschke_metric);
    ctx.rep.check(at + "/cubic_error", cubic_err, "<=", ctx.cfg.tol.blaschke_cubic);
    holonomy_ladder(ctx, at + "/transport", {ctx.blaschke_subject()}, true);
    decay_law(ctx, at + "/decay", {ctx.blaschke_subject()}, ctx.cfg.blaschke_decay_from, ctx.cfg.blaschke_decay_to);
}

void mirror_symmetry(Context& ctx, const std::string& at) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const cplx j0(0.0, 4.0 * std::sqrt(pi));
    Series j(12);
    j[0] = j0;
    for (int n = 1; n < 4; ++n) j[n] = 0.2 * cplx(U(ctx.rng), U(ctx.rng)) * j0;
    const HoloPair p = model_fg(ModelData::from_j(j, ctx.cfg.blaschke_k));
    const HoloPair m = mirror(p);
    int metric_changed = 0, cubic_not_negated = 0;
    std::ofstream csv(ctx.out / "fields" / "mirror_samples.csv");
    csv.precision(17);
    csv << "re_z,im_z,metric,metric_mirror,re_U,im_U,re_U_mirror,im_U_mirror\n";
    for (int s = 0; s < 32; ++s) {
        const cplx z = std::polar(std::pow(10.0, -4.5 + 1.5 * U(ctx.rng)), pi * U(ctx.rng));
        const double a = metric_from_fg(p, z), b = metric_from_fg(m, z);
        const cplx ua = cubic_from_fg(p, z), ub = cubic_from_fg(m, z);
        metric_changed += a != b;
        cubic_not_negated += ub != -ua;
        csv << z.real() << ',' << z.imag() << ',' << a << ',' << b << ',' << ua.real() << ',' << ua.imag() << ','
            << ub.real() << ',' << ub.imag() << '\n';
    }
    ctx.rep.equals(at + "/metric_changed_samples", metric_changed, 0);
    ctx.rep.equals(at + "/cubic_not_negated_samples", cubic_not_negated, 0);
    const HoloPair mm = mirror(m);
    const bool involution = mm.F.plain.coeffs() == p.F.plain.coeffs() &&
                            mm.F.log_part.coeffs() == p.F.log_part.coeffs() &&
                            mm.G.plain.coeffs() == p.G.plain.coeffs() && mm.G.log_part.coeffs() == p.G.log_part.coeffs();
    ctx.rep.equals(at + "/mirror_twice_is_identity", involution, true);
}

void monge_ampere(Context& ctx, const std::string& at, const std::vector<Subject>& subjects) {
    const RunConfig& c = ctx.cfg;
    auto jobs = per_subject(subjects, [&](const Subject& s) {
        return monge_ampere_check(*s.data, c.ma_nodes, 0.0, c.ma_level, c.ma_width, c.transport);
    });
    for (std::size_t i = 0; i < subjects.size(); ++i) {
        const std::string p = at + "/" + subjects[i].label;
        try {
            const MongeAmpereStats st = jobs[i].get();
            ctx.drift(st.det_drift);
            ctx.rep.note(p + "/mean_residual", st.hessian.mean_residual);
            ctx.rep.note(p + "/nodes", st.hessian.nodes);
            ctx.rep.check(p + "/max_residual", st.hessian.max_residual, "<", c.tol.monge_ampere);
        } catch (const Error& e) {
            ctx.rep.error(p, e);
        }
    }
}

void greens_suite(Context& ctx, const std::string& at) {
    const double tol = ctx.cfg.tol.quadrature;
    double worst = 0.0;
    int points = 0;
    for (double r : {0.01, 0.1, 0.5, 1.0, 3.0})
        for (double rho : {0.02, 0.2, 0.7, 2.0}) {
            worst = std::max(worst, inner_integral(r, rho).error());
            ++points;
        }
    ctx.rep.note(at + "/inner_integral_points", points);
    ctx.rep.check(at + "/inner_integral_error", worst, "<=", tol);
    double gp = 0.0;
    for (double r : {std::exp(-1.0), std::exp(-2.0), 0.05, 0.2, 0.01}) gp = std::max(gp, g_prime(r).error());
    ctx.rep.check(at + "/g_prime_error", gp, "<=", tol);

    const RationalCubicDifferential U = ctx.cfg.cubic();
    std::vector<double> constants;
    std::vector<std::vector<double>> rows;
    std::optional<PoissonSolution> last;
    for (const auto& [n, nt] : ctx.cfg.greens_grids) {
        GridParams gp_ = ctx.cfg.solver.grid;
        gp_.cartesian_n = n;
        gp_.ntheta = nt;
        auto g = CompositeGrid::build(ChartAtlas::build(U, gp_), -12.0);
        PoissonSolution s = solve_poisson(barrier_poisson_problem(g));
        const std::string q = at + "/poisson_" + std::to_string(n) + "x" + std::to_string(nt);
        ctx.rep.note(q + "/imbalance", s.imbalance);
        std::vector<double> dev;
        double mx = 0.0;
        for (const AsymptoteRow& r : s.asymptote) {
            dev.push_back(r.sup_deviation);
            mx = std::max(mx, std::isfinite(r.sup_deviation) ? r.sup_deviation : INFINITY);
        }
        ctx.rep.note(q + "/sup_deviation", mx);
        ctx.rep.equals(q + "/sup_deviation_finite", std::isfinite(mx), true);
        rows.push_back(dev);
        last = std::move(s);
    }
    for (std::size_t k = 1; k < rows.size(); ++k) {
        double change = 0.0;
        if (rows[k].size() != rows[k - 1].size()) change = INFINITY;
        for (std::size_t i = 0; i < rows[k].size() && std::isfinite(change); ++i)
            change = std::max(change, std::abs(rows[k][i] - rows[k - 1][i]));
        ctx.rep.check(at + "/asymptote_change_" + std::to_string(k), change, "<=", ctx.cfg.tol.asymptote_change);
    }
    if (last) {
        write_field_csv((ctx.out / "fields" / "greens_potential.csv").string(), last->f);
        write_field_svg((ctx.out / "plots" / "greens_potential.svg").string(), last->f, 2.0, 120, "f");
    }
}

void drift_summary(Context& ctx, const std::string& at) {
    ctx.rep.check(at + "/max_det_drift", ctx.max_drift, "<", ctx.cfg.tol.det_drift);
}

void validate_cubic(Context& ctx, const std::string& at) {
    const RationalCubicDifferential U = ctx.cfg.cubic();
    const DivisorCounts c = validate_divisor(U);
    ctx.rep.note(at + "/pole_count", c.pole_count);
    ctx.rep.note(at + "/zero_count", c.zero_count);
    ctx.rep.equals(at + "/degree", c.zero_count - c.pole_count, -6);
    const auto poles = find_poles(U);
    const auto zeros = find_zeros(U);
    std::ofstream csv(ctx.out / "fields" / "divisor.csv");
    csv.precision(17);
    csv << "kind,re,im,infinity,re_residue,im_residue\n";
    for (std::size_t j = 0; j < poles.size(); ++j) {
        const Pole& p = poles[j];
        ctx.rep.note(at + "/poles/pole_" + std::to_string(j),
                     {{"location", point_json(p.location)}, {"residue", cplx_json(p.residue)}});
        csv << "pole," << p.location.z.real() << ',' << p.location.z.imag() << ',' << p.location.infinity << ','
            << p.residue.real() << ',' << p.residue.imag() << '\n';
    }
    for (std::size_t j = 0; j < zeros.size(); ++j) {
        ctx.rep.note(at + "/zeros/zero_" + std::to_string(j), point_json(zeros[j]));
        csv << "zero," << zeros[j].z.real() << ',' << zeros[j].z.imag() << ',' << zeros[j].infinity << ",0,0\n";
    }
}

void ensure_dirs(const fs::path& out) {
    std::error_code ec;
    for (const char* d : {"fields", "plots"}) fs::create_directories(out / d, ec);
    const fs::path probe = out / ".write_probe";
    std::ofstream t(probe);
    if (ec || !t) throw ConfigError("output directory " + out.string() + " is not writable");
    t.close();
    fs::remove(probe, ec);
}

struct Criterion {
    int id;
    const char* title;
    const char* section;
    std::function<void(Context&, const std::string&)> body;
};

std::vector<Criterion> criteria_table() {
    return {
        {1, "model identity converges at second order", "model_identity", model_identity},
        {2, "barrier certificates and sandwich", "barriers", barrier_certificates},
        {3, "solver convergence, monotonicity and budget", "solver", solver_convergence},
        {4, "puncture asymptotics of u", "puncture", puncture_asymptotics},
        {5, "metric asymptotics at the poles", "metric_asymptotics", metric_asymptotics},
        {6, "determinant first integral along every path", "determinant", drift_summary},
        {7, "parabolic holonomy on the ladder", "holonomy",
         [](Context& c, const std::string& at) {
             flat_control(c, at + "/flat_control");
             holonomy_ladder(c, at, c.solved_subjects(), false);
         }},
        {8, "winding number +1 at two radii", "winding",
         [](Context& c, const std::string& at) { winding_levels(c, at, c.solved_subjects()); }},
        {9, "decay law of the developing map", "decay",
         [](Context& c, const std::string& at) {
             auto s = c.solved_subjects();
             s.insert(s.begin(), c.model_subject());
             decay_law(c, at, s, c.cfg.decay_from, c.cfg.decay_to);
         }},
        {10, "closed-form model pair round trip", "blaschke", blaschke_round_trip},
        {11, "mirror transform", "mirror", mirror_symmetry},
        {12, "Monge-Ampere on transported patches", "monge_ampere",
         [](Context& c, const std::string& at) {
             auto s = c.solved_subjects();
             s.insert(s.begin(), c.blaschke_subject());
             monge_ampere(c, at, s);
         }},
        {13, "Green's function suite", "greens", greens_suite},
        {14, "curvature -4 of the cubic-form metric", "curvature", bryant_curvature},
    };
}

std::string describe_failures(const Report& rep, std::size_t from) {
    const Json& f = rep.json()["failures"];
    std::string out;
    for (std::size_t i = from; i < f.size() && i < from + 3; ++i) out += (out.empty() ? "" : "; ") + f[i].get<std::string>();
    if (f.size() > from + 3) out += "; ...";
    return out;
}

}  // namespace

// ------------------------------------------------------------------ config

RationalCubicDifferential RunConfig::cubic() const {
    if (!poles.empty()) return RationalCubicDifferential::from_divisor(poles, zeros, scale);
    RationalCubicDifferential U(numerator, denominator);
    return scale == 1.0 ? U : U.scaled(scale);
}

void RunConfig::validate() const {
    if (poles.empty() && (numerator.empty() || denominator.empty()))
        throw ConfigError("cubic differential needs a numerator and a denominator");
    if (scale == 0.0) throw ConfigError("cubic scale must be nonzero");
    solver.validate();
    const GridParams& g = solver.grid;
    if (g.cartesian_n < 8 || g.ntheta < 8) throw ConfigError("grid too coarse");
    if (!(g.T_min < g.fine_T_min && g.fine_T_min < 0.0) || !(g.growth >= 1.0))
        throw ConfigError("radial grid needs T_min < fine_T_min < 0 and growth >= 1");
    if (solver.stages.back() < g.T_min) throw ConfigError("deepest excision lies below the grid");
    if (!(transport.max_step > 0.0) || transport.min_steps < 1) throw ConfigError("transport step must be positive");
    for (const auto* v : {&ladder, &blaschke_ladder, &winding_levels}) {
        if (v->empty()) throw ConfigError("loop ladders must be nonempty");
        for (double y : *v)
            if (!(y > 0.0)) throw ConfigError("loop heights must be positive");
    }
    if (!(decay_from < decay_to) || !(blaschke_decay_from < blaschke_decay_to))
        throw ConfigError("decay interval is empty");
    if (ma_nodes < 5 || !(ma_width > 0.0)) throw ConfigError("Monge-Ampere patch too small");
    if (greens_grids.empty()) throw ConfigError("greens check needs at least one grid");
    if (model_rows.size() < 2) throw ConfigError("model identity needs at least two grids");
    for (std::size_t k = 1; k < model_rows.size(); ++k)
        if (model_rows[k] <= model_rows[k - 1]) throw ConfigError("model grids must be refinements");
    if (pole < -1) throw ConfigError("pole index must be >= 0 (or -1 for all)");
    const Json t = tolerances_json(tol);
    for (auto it = t.begin(); it != t.end(); ++it)
        if (!(it->get<double>() > 0.0)) throw ConfigError("tolerance " + it.key() + " must be positive");
    if (out_dir.empty()) throw ConfigError("output directory is empty");
}

Json RunConfig::to_json() const {
    Json cubic_j = {{"numerator", Json::array()}, {"denominator", Json::array()}, {"poles", Json::array()},
                    {"zeros", Json::array()}, {"scale", cplx_json(scale)}};
    for (cplx c : numerator) cubic_j["numerator"].push_back(cplx_json(c));
    for (cplx c : denominator) cubic_j["denominator"].push_back(cplx_json(c));
    for (const auto& p : poles) cubic_j["poles"].push_back(point_json(p));
    for (const auto& p : zeros) cubic_j["zeros"].push_back(point_json(p));
    const GridParams& g = solver.grid;
    return {
        {"cubic", cubic_j},
        {"grid",
         {{"cartesian_n", g.cartesian_n},
          {"half_width", g.half_width},
          {"active_radius", g.active_radius},
          {"ntheta", g.ntheta},
          {"dT", g.dT},
          {"fine_T_min", g.fine_T_min},
          {"growth", g.growth},
          {"T_min", g.T_min},
          {"patch_fraction", g.patch_fraction},
          {"hole_fraction", g.hole_fraction},
          {"blend_fraction", g.blend_fraction},
          {"series_order", g.series_order}}},
        {"solver",
         {{"stages", solver.stages},
          {"tol", solver.tol},
          {"max_newton", solver.max_newton},
          {"monotone_tol", solver.monotone_tol},
          {"strict_monotone", solver.strict_monotone},
          {"alpha", solver.alpha},
          {"probe_radii", solver.probe_radii}}},
        {"transport",
         {{"max_step", transport.max_step},
          {"min_steps", transport.min_steps},
          {"source", source_name(source)},
          {"blaschke_k", blaschke_k},
          {"ladder", ladder},
          {"blaschke_ladder", blaschke_ladder},
          {"winding_levels", winding_levels},
          {"decay", {decay_from, decay_to}},
          {"blaschke_decay", {blaschke_decay_from, blaschke_decay_to}},
          {"pole", pole}}},
        {"monge_ampere", {{"nodes", ma_nodes}, {"level", ma_level}, {"width", ma_width}}},
        {"greens", {{"grids", greens_grids}}},
        {"model", {{"rows", model_rows}}},
        {"tolerances", tolerances_json(tol)},
        {"seed", seed},
    };
}

RunConfig RunConfig::from_json(const Json& j) {
    RunConfig c;
    Fields top(j, "config");
    top.sub("cubic", [&](Fields& f) {
        f.get("numerator", c.numerator);
        f.get("denominator", c.denominator);
        f.get("poles", c.poles);
        f.get("zeros", c.zeros);
        f.get("scale", c.scale);
    });
    top.sub("grid", [&](Fields& f) {
        GridParams& g = c.solver.grid;
        f.get("cartesian_n", g.cartesian_n);
        f.get("half_width", g.half_width);
        f.get("active_radius", g.active_radius);
        f.get("ntheta", g.ntheta);
        f.get("dT", g.dT);
        f.get("fine_T_min", g.fine_T_min);
        f.get("growth", g.growth);
        f.get("T_min", g.T_min);
        f.get("patch_fraction", g.patch_fraction);
        f.get("hole_fraction", g.hole_fraction);
        f.get("blend_fraction", g.blend_fraction);
        f.get("series_order", g.series_order);
    });
    top.sub("solver", [&](Fields& f) {
        f.get("stages", c.solver.stages);
        f.get("tol", c.solver.tol);
        f.get("max_newton", c.solver.max_newton);
        f.get("monotone_tol", c.solver.monotone_tol);
        f.get("strict_monotone", c.solver.strict_monotone);
        f.get("alpha", c.solver.alpha);
        f.get("probe_radii", c.solver.probe_radii);
    });
    top.sub("transport", [&](Fields& f) {
        f.get("max_step", c.transport.max_step);
        f.get("min_steps", c.transport.min_steps);
        std::string src = source_name(c.source);
        f.get("source", src);
        if (src == "auto") c.source = FrameSource::Auto;
        else if (src == "model") c.source = FrameSource::Model;
        else if (src == "blaschke") c.source = FrameSource::Blaschke;
        else if (src == "solved") c.source = FrameSource::Solved;
        else throw ConfigError("config.transport.source: unknown source " + src);
        f.get("blaschke_k", c.blaschke_k);
        f.get("ladder", c.ladder);
        f.get("blaschke_ladder", c.blaschke_ladder);
        f.get("winding_levels", c.winding_levels);
        std::array<double, 2> d{c.decay_from, c.decay_to}, bd{c.blaschke_decay_from, c.blaschke_decay_to};
        f.get("decay", d);
        f.get("blaschke_decay", bd);
        c.decay_from = d[0], c.decay_to = d[1];
        c.blaschke_decay_from = bd[0], c.blaschke_decay_to = bd[1];
        f.get("pole", c.pole);
    });
    top.sub("monge_ampere", [&](Fields& f) {
        f.get("nodes", c.ma_nodes);
        f.get("level", c.ma_level);
        f.get("width", c.ma_width);
    });
    top.sub("greens", [&](Fields& f) { f.get("grids", c.greens_grids); });
    top.sub("model", [&](Fields& f) { f.get("rows", c.model_rows); });
    top.sub("tolerances", [&](Fields& f) {
        Tolerances& t = c.tol;
        f.get("model_order", t.model_order);
        f.get("residual", t.residual);
        f.get("monotone_factor", t.monotone_factor);
        f.get("runtime_seconds", t.runtime_seconds);
        f.get("puncture_sup", t.puncture_sup);
        f.get("metric_ratio", t.metric_ratio);
        f.get("det_drift", t.det_drift);
        f.get("eigenvalue", t.eigenvalue);
        f.get("decay_slope", t.decay_slope);
        f.get("blaschke_metric", t.blaschke_metric);
        f.get("blaschke_cubic", t.blaschke_cubic);
        f.get("monge_ampere", t.monge_ampere);
        f.get("quadrature", t.quadrature);
        f.get("asymptote_change", t.asymptote_change);
        f.get("bryant", t.bryant);
    });
    top.get("seed", c.seed);
    top.finish();
    return c;
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path);
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return from_json(j);
}

std::uint64_t config_hash(const RunConfig& config) {
    // FNV-1a over the canonical dump
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : config.to_json().dump()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

// ------------------------------------------------------------------ report

Report::Report(const RunConfig& config) {
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(config)));
    root_["provenance"] = {{"version", SFCY_VERSION},
                           {"compiler", __VERSION__},
                           {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                         "." + std::to_string(EIGEN_MINOR_VERSION)},
                           {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                        std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
                           {"config_hash", hash},
                           {"seed", config.seed}};
    root_["config"] = config.to_json();
    root_["failures"] = Json::array();
}

Json& Report::section(const std::string& path) { return root_[Json::json_pointer("/" + path)]; }

bool Report::record(Json& where, const std::string& path, Json entry, bool ok) {
    ++assertions_;
    entry["pass"] = ok;
    if (!ok) {
        ++failures_;
        std::string line = path;
        if (entry.contains("relation"))
            line += " = " + entry["value"].dump() + " (required " + entry["relation"].get<std::string>() + " " +
                    entry["tolerance"].dump() + ")";
        else if (entry.contains("expected"))
            line += " = " + entry["value"].dump() + " (expected " + entry["expected"].dump() + ")";
        root_["failures"].push_back(line);
    }
    where[Json::json_pointer("/" + path)] = std::move(entry);
    return ok;
}

bool Report::check(const std::string& path, double value, const std::string& relation, double tolerance) {
    bool ok;
    if (relation == "<") ok = value < tolerance;
    else if (relation == "<=") ok = value <= tolerance;
    else if (relation == ">") ok = value > tolerance;
    else if (relation == ">=") ok = value >= tolerance;
    else throw ConfigError("unknown relation " + relation);
    return record(root_, path, {{"value", value}, {"relation", relation}, {"tolerance", tolerance}}, ok);
}

bool Report::equals(const std::string& path, const Json& value, const Json& expected) {
    return record(root_, path, {{"value", value}, {"expected", expected}}, value == expected);
}

void Report::note(const std::string& path, const Json& value) {
    root_[Json::json_pointer("/" + path)] = {{"value", value}, {"tolerance", nullptr}};
}

void Report::timing(const std::string& key, double seconds) { root_["timing"][key] = seconds; }

bool Report::timing_check(const std::string& key, double seconds, double limit) {
    Json& t = root_["timing"];
    return record(t, key, {{"value", seconds}, {"relation", "<"}, {"tolerance", limit}}, seconds < limit);
}

void Report::error(const std::string& where, const std::exception& e) {
    const auto* err = dynamic_cast<const Error*>(&e);
    record(root_, where + "/error",
           {{"kind", err ? err->kind() : std::string("std::exception")}, {"message", e.what()}}, false);
    root_["failures"].back() = where + ": " + e.what();
}

void Report::write(const std::string& path) const {
    Json j = root_;
    j["summary"] = {{"assertions", assertions_}, {"failures", failures_}, {"pass", failures_ == 0}};
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << '\n';
}

// -------------------------------------------------------------- subcommands

const std::vector<std::string>& subcommands() {
    static const std::vector<std::string> names{"validate", "solve",        "holonomy",  "winding",
                                                "mirror",   "greens-check", "verify-all"};
    return names;
}

Report verify_all(const RunConfig& config, std::vector<CriterionResult>* criteria) {
    config.validate();
    ensure_dirs(config.out_dir);
    Report rep(config);
    Context ctx(config, rep);
    rep.note("subcommand", "verify-all");
    // the drift summary reads what the transport criteria accumulated, so it runs last
    std::vector<Criterion> table = criteria_table();
    std::stable_partition(table.begin(), table.end(), [](const Criterion& c) { return c.id != 6; });
    std::vector<CriterionResult> results;
    for (const Criterion& c : table) {
        const int before = rep.failures(), checks = rep.assertions();
        const std::size_t first_failure = rep.json()["failures"].size();
        const std::string at = std::string("criteria/") + c.section;
        try {
            c.body(ctx, at);
            if (c.id == 3) ctx.write_solution_fields();
        } catch (const Error& e) {
            rep.error(at, e);
        }
        CriterionResult r{c.id, c.title, rep.failures() == before, ""};
        r.detail = r.pass ? std::to_string(rep.assertions() - checks) + " checks"
                          : describe_failures(rep, first_failure);
        results.push_back(r);
    }
    std::sort(results.begin(), results.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    Json& list = rep.section("criteria/summary");
    list = Json::array();
    for (const auto& r : results) list.push_back({{"id", r.id}, {"title", r.title}, {"pass", r.pass}});
    rep.write((fs::path(config.out_dir) / "report.json").string());
    if (criteria) *criteria = std::move(results);
    return rep;
}

Report run(const std::string& subcommand, const RunConfig& config) {
    if (subcommand == "verify-all") return verify_all(config);
    if (std::find(subcommands().begin(), subcommands().end(), subcommand) == subcommands().end())
        throw ConfigError("unknown subcommand " + subcommand);
    config.validate();
    ensure_dirs(config.out_dir);
    Report rep(config);
    Context ctx(config, rep);
    rep.note("subcommand", subcommand);
    try {
        if (subcommand == "validate") {
            validate_cubic(ctx, "divisor");
        } else if (subcommand == "solve") {
            validate_cubic(ctx, "divisor");
            barrier_certificates(ctx, "barriers");
            solver_convergence(ctx, "solver");
            puncture_asymptotics(ctx, "puncture");
            metric_asymptotics(ctx, "metric_asymptotics");
            bryant_curvature(ctx, "curvature");
            ctx.write_solution_fields();
        } else if (subcommand == "holonomy") {
            flat_control(ctx, "holonomy/flat_control");
            holonomy_ladder(ctx, "holonomy", ctx.configured_subjects(), true);
            drift_summary(ctx, "determinant");
        } else if (subcommand == "winding") {
            winding_levels(ctx, "winding", ctx.configured_subjects());
            drift_summary(ctx, "determinant");
        } else if (subcommand == "mirror") {
            blaschke_round_trip(ctx, "blaschke");
            mirror_symmetry(ctx, "mirror");
            monge_ampere(ctx, "monge_ampere", {ctx.blaschke_subject()});
            drift_summary(ctx, "determinant");
        } else if (subcommand == "greens-check") {
            greens_suite(ctx, "greens");
        }
    } catch (const Error& e) {
        rep.error(subcommand, e);
    }
    rep.write((fs::path(config.out_dir) / "report.json").string());
    return rep;
}

}  // namespace sfcy
