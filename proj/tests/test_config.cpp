#include "dupire/config.hpp"
#include "dupire/curve.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <sstream>

using namespace dupire;

TEST_CASE("model specs parse for every family") {
    CHECK(parse_model(R"({"model":"heston","params":{"a":0.04,"b":-0.6,"c":0.3,"rho":-0.7,"v0":0.06}})")
              .family() == Family::Heston);
    CHECK(parse_model(R"({"model":"bs","params":{"variance":0.04}})").family() == Family::BsTimeDep);
    const ModelSpec steps =
        parse_model(R"({"model":"bs","params":{"start_times":[0,1],"variances":[0.04,0.09]}})");
    CHECK(steps.as<BsTimeDepParams>().variances.size() == 2);
    CHECK(parse_model(R"({"model":"kou","params":{"sigma":0.2,"lambda":10,"p":0.3,
        "lambda_plus":50,"lambda_minus":25}})")
              .family() == Family::Kou);
    CHECK(parse_model(R"({"model":"vargamma","params":{"sigma":0.26,"theta":-0.2,"nu":0.05}})")
              .family() == Family::VarianceGamma);
    CHECK(parse_model(R"({"model":"nig","params":{"alpha":10,"beta":0,"delta":0.1}})").family() ==
          Family::Nig);
    const ModelSpec h = parse_model(
        R"({"model":"heston","params":{"a":0.04,"b":-0.6,"c":0.3,"rho":-0.7,"v0":0.06,"s0":100}})");
    CHECK(h.spot() == 100.0);
}

TEST_CASE("config errors") {
    CHECK_THROWS_AS(parse_model("{"), ConfigError);
    CHECK_THROWS_AS(parse_model(R"({"model":"sabr","params":{}})"), ConfigError);
    CHECK_THROWS_AS(parse_model(R"({"model":"bs","params":{"variance":0.04,"vol":1}})"), ConfigError);
    CHECK_THROWS_AS(parse_model(R"({"model":"heston","params":{"a":0.04}})"), ConfigError);
    CHECK_THROWS_AS(parse_model(R"({"model":"bs","params":{"variance":"x"}})"), ConfigError);
    CHECK_THROWS_AS(parse_model(R"({"model":"bs","params":{"variance":-1}})"), ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"model":{"model":"bs","params":{"variance":0.04}},"T":0})"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_run_config(R"({"model":{"model":"bs","params":{"variance":0.04}},"methods":["fast"]})"),
        ConfigError);
    CHECK_THROWS_AS(parse_run_config(R"({"model":{"model":"bs","params":{"variance":0.04}},
        "quadrature":{"rel_tol":0}})"),
                    ConfigError);
    CHECK_THROWS_AS(load_run_config("/nonexistent/config.json"), ConfigError);
}

TEST_CASE("run config fields") {
    const RunConfig cfg = parse_run_config(R"({
        "model": {"model": "kou", "params": {"sigma":0.2,"lambda":10,"p":0.3,"lambda_plus":50,"lambda_minus":25}},
        "k_grid": {"min": 1, "max": 2.5, "count": 4},
        "T_grid": [0.5, 1],
        "methods": ["saddle", "exact", "saddle"],
        "quadrature": {"contour_re": 3, "rel_tol": 1e-8, "check_symmetry": true, "max_evals": 1000},
        "output": "out.csv"})");
    CHECK(cfg.k_grid.points() == std::vector<double>{1.0, 1.5, 2.0, 2.5});
    CHECK(cfg.T_grid == std::vector<double>{0.5, 1.0});
    CHECK(cfg.methods == std::vector<VolMethod>{VolMethod::Exact, VolMethod::Saddle});
    CHECK(*cfg.quadrature.contour_re == 3.0);
    CHECK(cfg.quadrature.rel_tol == 1e-8);
    CHECK(cfg.quadrature.check_symmetry);
    CHECK(cfg.quadrature.max_evals == 1000);
    CHECK(*cfg.output == "out.csv");

    const RunConfig bare = parse_run_config(R"({"model":"bs","params":{"variance":0.04}})");
    CHECK(bare.k_grid.count == 0);
    CHECK(bare.methods.size() == 3);
    CHECK_THROWS_AS(validate_for_curve(bare), ConfigError);
}

TEST_CASE("method lists") {
    CHECK(parse_methods("exact, asymptote") ==
          std::vector<VolMethod>{VolMethod::Exact, VolMethod::Asymptote});
    CHECK_THROWS_AS(parse_methods(""), ConfigError);
    CHECK_THROWS_AS(parse_methods("exact,bogus"), ConfigError);
}

TEST_CASE("figure presets") {
    for (const char* name : {"heston", "kou", "vargamma"}) {
        const RunConfig cfg = figure_preset(name);
        CHECK(cfg.k_grid.count == 50);
        CHECK(cfg.k_grid.min == 0.3);
        CHECK(cfg.k_grid.max == 3.0);
        CHECK_NOTHROW(validate_for_curve(cfg));
    }
    CHECK_THROWS_AS(figure_preset("nig"), ConfigError);
    RunConfig nig(fx::nig_sample());
    nig.k_grid = {1.0, 2.0, 3};
    nig.methods = {VolMethod::Saddle};
    CHECK_THROWS_AS(validate_for_curve(nig), ConfigError);
}

TEST_CASE("curve csv is ordered and deterministic") {
    RunConfig cfg(fx::bs(0.04));
    cfg.k_grid = {-1.0, 1.0, 5};
    cfg.T_grid = {0.5, 2.0};
    cfg.methods = {VolMethod::Saddle, VolMethod::Asymptote};
    std::ostringstream one, two;
    write_curve_csv(one, cfg, compute_curve(cfg, 4));
    write_curve_csv(two, cfg, compute_curve(cfg, 1));
    CHECK(one.str() == two.str());
    std::istringstream lines(one.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "T,k,exact,saddle,asymptote");
    std::getline(lines, line);
    CHECK(line == "0.5,-1,,0.040000000000000001,0.040000000000000001");
    int rows = 0;
    while (std::getline(lines, line)) ++rows;
    CHECK(rows == 9);
}

TEST_CASE("per-point failures become nan") {
    RunConfig cfg(fx::vg_fig3());
    cfg.k_grid = {0.5, 2.0, 4};
    cfg.methods = {VolMethod::Asymptote, VolMethod::Saddle};
    const CurveResult r = compute_curve(cfg, 2);
    CHECK(r.evaluated == 8);
    CHECK(std::isnan(r.rows[0].asymptote));  // k/T <= 1
    CHECK(std::isfinite(r.rows[3].asymptote));
    CHECK(std::isfinite(r.rows[0].saddle));
    CHECK(r.failures.size() == 2);
    std::ostringstream out;
    write_curve_csv(out, cfg, r);
    CHECK(out.str().find("nan") != std::string::npos);
    CHECK(format_double(-kInf) == "-inf");
}
