#include "doctest.h"

#include <cmath>
#include <string>

#include "bubblesolve/cli/config.hpp"
#include "bubblesolve/cli/run.hpp"

using namespace bubblesolve;
using namespace bubblesolve::cli;

namespace {

const char* kSamuelsonSteady = R"({
  "model": "samuelson",
  "run": "steady",
  "params": {"a": 3.0, "b": 1.0, "beta": 0.5, "G": 1.2, "G_d": 1.0, "D0": 0.01}
})";

std::string find_line(const std::string& text, const std::string& needle) {
    std::size_t pos = text.find(needle);
    if (pos == std::string::npos) return {};
    std::size_t end = text.find('\n', pos);
    return text.substr(pos, end - pos);
}

}  // namespace

TEST_CASE("config validation rejects unknown keys and bad values") {
    CHECK_THROWS_AS(parse_config(R"({"model": "samuelson", "params": {}, "pet": 1})"), ToolkitError);
    CHECK_THROWS_AS(parse_config(R"({"model": "samuelson", "params": {"a":3,"b":1,"beta":0.5,"G":1.2,"frob":2}})"),
                    ToolkitError);
    CHECK_THROWS_AS(parse_config(R"({"model": "nosuch", "params": {}})"), ToolkitError);
    CHECK_THROWS_AS(parse_config(R"({"model": "samuelson", "run": "warp", "params": {"a":3,"b":1,"beta":0.5,"G":1.2}})"),
                    ToolkitError);
    CHECK_THROWS_AS(parse_config("not json at all"), ToolkitError);

    // Leverage constraint violation is a config error naming phi.
    try {
        parse_config(R"({
          "model": "leverage",
          "params": {"beta": 0.96, "pi": 0.5, "lambda": 2.0, "delta": 0.1, "G": 1.02,
                     "production": {"type": "cobb_douglas", "A": 1.0, "alpha": 0.33}}
        })");
        CHECK(false);
    } catch (const ToolkitError& e) {
        CHECK(e.code() == ErrorCode::ConfigInvalid);
        CHECK(std::string(e.what()).find("phi") != std::string::npos);
        CHECK(exit_status(e.code()) == 2);
    }

    // Empty sweep grid.
    CHECK_THROWS_AS(parse_config(R"({
      "model": "samuelson", "run": "sweep",
      "params": {"a":3,"b":1,"beta":0.5,"G":1.2,"G_d":1.0,"D0":0.01},
      "sweep": {"parameter": "G_d", "values": []}
    })"),
                    ToolkitError);

    // Probability mass must sum to one.
    CHECK_THROWS_AS(parse_config(R"({
      "model": "storage_risk",
      "params": {"beta": 0.9, "z_dist": [{"value": 0.5, "prob": 0.9}]}
    })"),
                    ToolkitError);
}

TEST_CASE("samuelson steady scenario reports both fixed points with verdicts") {
    ScenarioConfig cfg = parse_config(kSamuelsonSteady);
    RunOutput out = run_scenario(cfg);
    std::string text = out.report.dump();
    CHECK(out.exit_code() == 0);
    CHECK(text.find("\"fundamental\"") != std::string::npos);
    CHECK(text.find("\"bubbly\"") != std::string::npos);
    CHECK(text.find("LocallyDeterminate") != std::string::npos);
    CHECK(text.find("FundamentalEliminated") != std::string::npos);
    CHECK(find_line(text, "\"overall\"").find("LocallyDeterminate") != std::string::npos);
    // The bubbly point is (1/3, 0).
    CHECK(text.find("0.3333333333") != std::string::npos);
}

TEST_CASE("reports are byte-identical across repeated in-process runs") {
    for (const char* config : {kSamuelsonSteady}) {
        ScenarioConfig cfg = parse_config(config);
        std::string a = run_scenario(cfg).report.dump();
        std::string b = run_scenario(parse_config(config)).report.dump();
        CHECK(a == b);
    }
}

TEST_CASE("samuelson dividend-growth sweep flags elimination on the open interval") {
    ScenarioConfig cfg = parse_config(R"({
      "model": "samuelson", "run": "sweep",
      "params": {"a": 3.0, "b": 1.0, "beta": 0.5, "G": 1.2, "G_d": 1.0, "D0": 0.01},
      "sweep": {"parameter": "G_d", "from": 0.7, "to": 1.3, "step": 0.05}
    })");
    RunOutput out = run_sweep_rows(cfg);
    CHECK(out.row_errors == 0);
    CHECK(cfg.sweep->grid.size() == 13);
    // Eliminated exactly when 0.8 < G_d < 1.2, endpoints excluded.
    for (std::size_t i = 0; i < cfg.sweep->grid.size(); ++i) {
        double gd = cfg.sweep->grid[i];
        ScenarioConfig pt = cfg;
        apply_sweep_value(pt, "G_d", gd);
        bool expect = gd > 0.8 && gd < 1.2;
        auto row = cli::detail::sweep_row(pt);
        bool found = false;
        for (const auto& [k, v] : row)
            if (k == "eliminated") {
                found = true;
                CHECK(v.flag == expect);
            }
        CHECK(found);
    }
    // CSV table: header plus one line per grid point.
    int lines = 0;
    for (char c : out.csv)
        if (c == '\n') ++lines;
    CHECK(lines == 14);
    CHECK(out.csv.rfind("G_d,", 0) == 0);
}

TEST_CASE("sweep rows record row-level errors and continue") {
    ScenarioConfig cfg = parse_config(R"({
      "model": "samuelson", "run": "sweep",
      "params": {"a": 3.0, "b": 1.0, "beta": 0.5, "G": 1.2, "G_d": 1.0, "D0": 0.01},
      "sweep": {"parameter": "beta", "values": [0.5, -1.0, 0.6]}
    })");
    RunOutput out = run_sweep_rows(cfg);
    CHECK(out.row_errors == 1);
    CHECK(out.exit_code() == 3);
    std::string text = out.report.dump();
    CHECK(text.find("ConfigInvalid") != std::string::npos);
}

TEST_CASE("path and verify scenarios") {
    ScenarioConfig cfg = parse_config(R"({
      "model": "samuelson", "run": "verify",
      "params": {"a": 3.0, "b": 1.0, "beta": 0.5, "G": 1.2, "G_d": 1.0, "D0": 0.01},
      "horizon": 120, "tolerances": {"verify": 1e-9}
    })");
    RunOutput out = run_scenario(cfg);
    CHECK(out.verification_pass);
    CHECK(out.exit_code() == 0);
    std::string text = out.report.dump();
    CHECK(text.find("\"residuals\"") != std::string::npos);
    CHECK(text.find("\"elimination_certificate\"") != std::string::npos);
    CHECK(text.find("\"pass\": true") != std::string::npos);

    // Closed-form verification at a dividendless initial price.
    ScenarioConfig cf = parse_config(R"({
      "model": "samuelson", "run": "verify",
      "params": {"a": 3.0, "b": 1.0, "beta": 0.5, "G": 1.2},
      "initial": {"P0": 0.2}, "horizon": 50, "tolerances": {"verify": 1e-10}
    })");
    CHECK(run_scenario(cf).exit_code() == 0);

    // Missing initial price for the dividendless path is a config error.
    ScenarioConfig nop0 = parse_config(R"({
      "model": "samuelson", "run": "path",
      "params": {"a": 3.0, "b": 1.0, "beta": 0.5, "G": 1.2}
    })");
    CHECK_THROWS_AS(run_scenario(nop0), ToolkitError);
}

TEST_CASE("leverage scenarios") {
    ScenarioConfig steady = parse_config(R"({
      "model": "leverage", "run": "steady",
      "params": {"beta": 0.96, "pi": 0.1, "lambda": 5.0, "delta": 0.1, "G": 1.02,
                 "production": {"type": "cobb_douglas", "A": 1.0, "alpha": 0.3333333333333333}}
    })");
    std::string text = run_scenario(steady).report.dump();
    CHECK(find_line(text, "\"R\": 0.9").size() > 0);  // fundamental rate 1 - delta

    ScenarioConfig det = parse_config(R"({
      "model": "leverage", "run": "determinacy",
      "params": {"beta": 0.96, "pi": 0.1, "lambda": 5.0, "delta": 0.1, "G": 1.02, "D": 0.01,
                 "production": {"type": "cobb_douglas", "A": 1.0, "alpha": 0.3333333333333333}}
    })");
    RunOutput d = run_scenario(det);
    CHECK(d.report.dump().find("LocallyDeterminate") != std::string::npos);

    ScenarioConfig verify = parse_config(R"({
      "model": "leverage", "run": "verify",
      "params": {"beta": 0.96, "pi": 0.1, "lambda": 5.0, "delta": 0.1, "G": 1.02, "D": 0.05,
                 "production": {"type": "cobb_douglas", "A": 1.0, "alpha": 0.3333333333333333}},
      "initial": {"y0": 1.8}, "horizon": 100, "tolerances": {"verify": 1e-9}
    })");
    RunOutput v = run_scenario(verify);
    CHECK(v.verification_pass);
    CHECK(v.exit_code() == 0);
}

TEST_CASE("reduced-form scenarios") {
    ScenarioConfig ko = parse_config(R"({
      "model": "kocherlakota", "run": "steady",
      "params": {"a": 2.0, "b": 1.0, "beta": 0.9, "gamma": 2.0, "G": 1.05}
    })");
    std::string kot = run_scenario(ko).report.dump();
    CHECK(kot.find("0.30625") != std::string::npos);
    CHECK(kot.find("\"low_interest\": true") != std::string::npos);

    ScenarioConfig det = parse_config(R"({
      "model": "kocherlakota", "run": "determinacy",
      "params": {"a": 2.0, "b": 1.0, "beta": 0.9, "gamma": 2.0, "G": 1.05}
    })");
    CHECK_THROWS_AS(run_scenario(det), ToolkitError);

    ScenarioConfig sr = parse_config(R"({
      "model": "storage_risk", "run": "steady",
      "params": {"beta": 0.9, "z_dist": [{"value": 0.5, "prob": 0.5}, {"value": 2.0, "prob": 0.5}]}
    })");
    std::string srt = run_scenario(sr).report.dump();
    CHECK(srt.find("\"bubble_condition\": true") != std::string::npos);
    CHECK(find_line(srt, "\"R_f\": 0.8").size() > 0);

    ScenarioConfig cu = parse_config(R"({
      "model": "reduced_form_custom", "run": "steady",
      "params": {"growth_slope": 0.5, "growth_intercept": 0.3,
                 "saving_slope": 1.0, "saving_intercept": -0.4,
                 "bracket_lo": 0.05, "bracket_hi": 2.0}
    })");
    std::string cut = run_scenario(cu).report.dump();
    CHECK(find_line(cut, "\"R_b\"").find("0.6") != std::string::npos);
}

TEST_CASE("tirole scenario") {
    ScenarioConfig cfg = parse_config(R"({
      "model": "tirole", "run": "determinacy",
      "params": {
        "production": {"type": "cobb_douglas", "A": 1.0, "alpha": 0.3, "delta": 1.0},
        "utility": {"type": "log", "beta": 0.9},
        "G": 1.05, "G_d": 1.0, "D0": 0.001
      }
    })");
    RunOutput out = run_scenario(cfg);
    std::string text = out.report.dump();
    CHECK(text.find("\"predicted_determinate\": true") != std::string::npos);
    CHECK(text.find("\"positive_bubble\": true") != std::string::npos);
    CHECK(find_line(text, "\"overall\"").find("LocallyDeterminate") != std::string::npos);
}

TEST_CASE("plot script generation") {
    ScenarioConfig cfg = parse_config(R"({
      "model": "samuelson", "run": "sweep",
      "params": {"a": 3.0, "b": 1.0, "beta": 0.5, "G": 1.2, "G_d": 1.0, "D0": 0.01},
      "sweep": {"parameter": "G_d", "values": [0.9, 1.0]}
    })");
    std::string script = plot_script(cfg, "out.csv");
    CHECK(script.find("gnuplot") != std::string::npos);
    CHECK(script.find("out.csv") != std::string::npos);
    CHECK(script.find("G_d") != std::string::npos);
}

TEST_CASE("tirole eis sweep flips the prediction exactly once at the bound") {
    ScenarioConfig cfg = parse_config(R"({
      "model": "tirole", "run": "sweep",
      "params": {
        "production": {"type": "ces", "A": 3.0, "theta": 0.15, "elasticity": 0.15, "delta": 1.0},
        "utility": {"type": "crra", "beta": 0.9, "sigma": 1.0},
        "G": 1.05, "G_d": 1.0, "D0": 0.0001
      },
      "sweep": {"parameter": "eis", "from": 0.1, "to": 2.0, "step": 0.1}
    })");
    RunOutput out = run_sweep_rows(cfg);
    CHECK(out.row_errors == 0);
    int flips = 0;
    bool prev = false, first = true;
    for (std::size_t i = 0; i < cfg.sweep->grid.size(); ++i) {
        ScenarioConfig pt = cfg;
        apply_sweep_value(pt, "eis", cfg.sweep->grid[i]);
        bool det = false, suff = false, found = false;
        for (const auto& [k, v] : cli::detail::sweep_row(pt)) {
            if (k == "predicted_determinate") {
                det = v.flag;
                found = true;
            }
            if (k == "suff_cond_positive") suff = v.flag;
        }
        REQUIRE(found);
        CHECK(det == suff);  // the two characterizations agree pointwise
        if (!first && det != prev) ++flips;
        prev = det;
        first = false;
    }
    CHECK(flips == 1);
}

TEST_CASE("verification failures map to exit code 4") {
    ScenarioConfig cfg = parse_config(R"({
      "model": "samuelson", "run": "verify",
      "params": {"a": 3.0, "b": 1.0, "beta": 0.5, "G": 1.2},
      "initial": {"P0": 0.2}, "horizon": 40, "tolerances": {"verify": 1e-30}
    })");
    RunOutput out = run_scenario(cfg);
    CHECK(!out.verification_pass);
    CHECK(out.exit_code() == 4);
}

TEST_CASE("tirole path selection through the CLI layer") {
    ScenarioConfig cfg = parse_config(R"({
      "model": "tirole", "run": "verify",
      "params": {
        "production": {"type": "cobb_douglas", "A": 1.0, "alpha": 0.3, "delta": 1.0},
        "utility": {"type": "log", "beta": 0.9},
        "G": 1.05, "G_d": 1.0, "D0": 0.0005
      },
      "initial": {"k0": 0.16}, "horizon": 250, "tolerances": {"verify": 1e-7}
    })");
    RunOutput out = run_scenario(cfg);
    CHECK(out.verification_pass);
    std::string text = out.report.dump();
    CHECK(text.find("\"sign_changes_found\": 1") != std::string::npos);
    CHECK(text.find("\"pass\": true") != std::string::npos);

    // Missing k0 is a config error.
    ScenarioConfig nok0 = parse_config(R"({
      "model": "tirole", "run": "path",
      "params": {
        "production": {"type": "cobb_douglas", "A": 1.0, "alpha": 0.3, "delta": 1.0},
        "utility": {"type": "log", "beta": 0.9},
        "G": 1.05, "G_d": 1.0, "D0": 0.0005
      }
    })");
    CHECK_THROWS_AS(run_scenario(nok0), ToolkitError);
}
