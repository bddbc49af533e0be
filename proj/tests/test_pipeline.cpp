#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "sfcy/errors.hpp"
#include "sfcy/pipeline.hpp"

using namespace sfcy;
namespace fs = std::filesystem;

namespace {

std::string scratch(const std::string& name) {
    return (fs::temp_directory_path() / "sfcy_test_pipeline" / name).string();
}

RunConfig model_config(const std::string& out) {
    RunConfig c;
    c.numerator = {1.0};
    c.denominator = {0.0, 1.0};
    c.source = FrameSource::Model;
    c.out_dir = scratch(out);
    return c;
}

Json without_timing(const std::string& path) {
    std::ifstream in(path);
    Json j = Json::parse(in);
    j.erase("timing");
    return j;
}

}  // namespace

TEST_CASE("configuration round trip") {
    const RunConfig d;
    const Json j = d.to_json();
    const RunConfig back = RunConfig::from_json(j);
    CHECK(back.to_json() == j);
    CHECK(config_hash(back) == config_hash(d));

    Json partial = {{"grid", {{"cartesian_n", 64}}}, {"cubic", {{"numerator", {{0.0, 1.0}}}}}};
    const RunConfig p = RunConfig::from_json(partial);
    CHECK(p.solver.grid.cartesian_n == 64);
    CHECK(p.solver.grid.ntheta == d.solver.grid.ntheta);
    CHECK(p.numerator == std::vector<cplx>{cplx(0.0, 1.0)});
    CHECK(config_hash(p) != config_hash(d));

    Json declared = {{"cubic", {{"poles", {1.0, "inf"}}, {"zeros", Json::array()}}}};
    const RunConfig q = RunConfig::from_json(declared);
    REQUIRE(q.poles.size() == 2);
    CHECK(q.poles[1].infinity);
}

TEST_CASE("configuration errors") {
    CHECK_THROWS_AS(RunConfig::from_json({{"grd", {{"cartesian_n", 64}}}}), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json({{"grid", {{"cartesian", 64}}}}), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json({{"grid", {{"cartesian_n", "many"}}}}), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json({{"transport", {{"source", "guess"}}}}), ConfigError);
    CHECK_THROWS_AS(RunConfig::from_json({{"cubic", {{"poles", {"north"}}}}}), ConfigError);
    CHECK_THROWS_AS(RunConfig::load(scratch("missing.json")), ConfigError);
    RunConfig c;
    c.tol.eigenvalue = 0.0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c = RunConfig();
    c.solver.stages = {-5, -10, -5000};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    CHECK_THROWS_AS(run("develop", RunConfig()), ConfigError);
}

TEST_CASE("report bookkeeping") {
    Report r{RunConfig()};
    CHECK(r.check("a/x", 1.0, "<", 2.0));
    CHECK(!r.check("a/y", 2.0, "<", 2.0));
    CHECK(r.check("a/z", 2.0, "<=", 2.0));
    CHECK(r.equals("b", "Identity", "Identity"));
    r.note("c", 3.0);
    CHECK(r.assertions() == 4);
    CHECK(r.failures() == 1);
    CHECK(r.json()["a"]["y"]["tolerance"] == 2.0);
    CHECK(r.json()["a"]["y"]["relation"] == "<");
    CHECK(r.json()["c"]["tolerance"].is_null());
    CHECK(r.json()["failures"].size() == 1);
    CHECK_THROWS_AS(r.check("d", 1.0, "~", 1.0), ConfigError);
}

TEST_CASE("validate on six simple poles") {
    RunConfig c;
    c.out_dir = scratch("validate");
    const Report r = run("validate", c);
    CHECK(r.passed());
    CHECK(r.json()["divisor"]["pole_count"]["value"] == 6);
    CHECK(r.json()["divisor"]["zero_count"]["value"] == 0);
    CHECK(fs::exists(fs::path(c.out_dir) / "report.json"));
    CHECK(fs::exists(fs::path(c.out_dir) / "fields" / "divisor.csv"));
}

TEST_CASE("solve rejects a five-pole divisor") {
    RunConfig c;
    for (int k = 0; k < 5; ++k) c.poles.push_back(ExtPoint::at(std::polar(1.0, 2.0 * 3.141592653589793 * k / 5)));
    c.out_dir = scratch("five");
    const Report r = run("solve", c);
    CHECK(!r.passed());
    CHECK(r.json()["solve"]["error"]["kind"] == "DegreeMismatch");
}

TEST_CASE("holonomy of the pure model") {
    const RunConfig c = model_config("model");
    const Report r = run("holonomy", c);
    CHECK(r.passed());
    for (const char* y : {"y_6", "y_8", "y_10"}) {
        CHECK(r.json()["holonomy"]["model"][y]["class"]["value"] == "ParabolicWithFixedPoint");
        CHECK(r.json()["holonomy"]["model"][y]["winding"]["value"] == 1);
    }
    CHECK(r.json()["holonomy"]["flat_control"]["class"]["value"] == "Identity");
    CHECK(fs::exists(fs::path(c.out_dir) / "plots" / "developed_model.svg"));

    // same config and seed: identical report apart from wall-clock entries
    const RunConfig c2 = model_config("model_again");
    run("holonomy", c2);
    CHECK(without_timing(c.out_dir + "/report.json") == without_timing(c2.out_dir + "/report.json"));

    // auto source picks the model for U = dz³/z
    RunConfig a = model_config("model_auto");
    a.source = FrameSource::Auto;
    const Report ra = run("winding", a);
    CHECK(ra.passed());
    CHECK(ra.json()["source"]["value"] == "model");
}

TEST_CASE("mirror and closed-form pair") {
    RunConfig c = model_config("mirror");
    c.source = FrameSource::Blaschke;
    const Report r = run("mirror", c);
    CHECK(r.passed());
    CHECK(r.json()["mirror"]["metric_changed_samples"]["value"] == 0);
    CHECK(r.json()["mirror"]["mirror_twice_is_identity"]["value"] == true);
}

TEST_CASE("greens check") {
    RunConfig c;
    c.out_dir = scratch("greens");
    const Report r = run("greens-check", c);
    CHECK(r.passed());
    CHECK(fs::exists(fs::path(c.out_dir) / "fields" / "greens_potential.csv"));
}

TEST_CASE("closed-form pair with k = -2pi is the model") {
    RunConfig c = model_config("shifted");
    c.blaschke_k = -2.0 * 3.141592653589793;
    c.blaschke_ladder = {6.0, 8.0, 10.0};
    const Report r = run("mirror", c);
    CHECK(r.passed());
    CHECK(r.json()["blaschke"]["metric_error"]["value"].get<double>() < 1e-10);
}
