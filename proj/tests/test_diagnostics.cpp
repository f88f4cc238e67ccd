#include "doctest.h"

#include <cmath>

#include "bubblesolve/diag/necessity.hpp"
#include "bubblesolve/diag/verify.hpp"
#include "bubblesolve/dynsys/path.hpp"
#include "bubblesolve/dynsys/steady.hpp"
#include "bubblesolve/reduced/reduced_form.hpp"
#include "test_support.hpp"

using namespace bubblesolve;
namespace sam = bubblesolve::models::samuelson;
namespace lev = bubblesolve::models::leverage;
namespace ti = bubblesolve::models::tirole;

namespace {
sam::Params sam_example() { return {.a = 3.0, .b = 1.0, .beta = 0.5, .G = 1.2, .G_d = 1.0, .D0 = 0.0}; }
}

TEST_CASE("closed-form bubbly path verifies to round-off") {
    sam::Params p = sam_example();
    sam::Path path = sam::closed_form(p, 0.25, 40);
    diag::ResidualReport rep = diag::verify_samuelson(p, path, 1e-10);
    CHECK(rep.pass);
    CHECK(rep.overall_max < 1e-10);
}

TEST_CASE("autarkic path: no-arbitrage skipped, euler holds exactly") {
    sam::Params p = sam_example();
    sam::Path path = sam::closed_form(p, 0.0, 30);
    diag::ResidualReport rep = diag::verify_samuelson(p, path, 1e-12);
    CHECK(rep.pass);
    for (const auto& c : rep.conditions) {
        if (c.name == "no_arbitrage") CHECK(c.skipped);
        if (c.name == "euler") CHECK(c.max < 1e-12);
    }
}

TEST_CASE("injected saddle path verifies; dividends enter the old's budget") {
    sam::Params p = sam_example();
    p.D0 = 1e-2;
    sam::Injected inj = sam::make_injected(p);
    dynsys::SteadyState target = dynsys::find_fixed_point(inj.system, {0.3, 0.0}, 1e-14, 100);
    dynsys::EquilibriumPath xi = dynsys::solve_saddle_path(inj.system, {p.D0}, target, 120, 1e-6);
    sam::Path path = sam::to_levels(p, xi.states);
    diag::ResidualReport rep = diag::verify_samuelson(p, path, 1e-9);
    CHECK(rep.pass);
}

TEST_CASE("fault injection flips the verifier") {
    sam::Params p = sam_example();
    sam::Path path = sam::closed_form(p, 0.25, 40);

    // A price bump of 1e-3 at t = 5 must push the euler residual at t in
    // {4, 5} above 1e-4 and fail the report at any reasonable tolerance.
    sam::Path bad = path;
    bad.P[5] += 1e-3;
    bad.R[4] = bad.P[5] / bad.P[4];
    bad.R[5] = bad.P[6] / bad.P[5];
    // consumption series left at their unperturbed values
    diag::ResidualReport rep = diag::verify_samuelson(p, bad, 1e-8);
    CHECK(!rep.pass);
    for (const auto& c : rep.conditions)
        if (c.name == "euler") {
            CHECK(c.per_period[4] > 1e-4);
            CHECK(c.per_period[5] > 1e-4);
        }

    // Any single-coordinate relative perturbation of 10x the tolerance is
    // caught (residuals are scaled by the period's endowment).
    for (int t : {3, 17, 30}) {
        sam::Path mutated = path;
        mutated.c_y[static_cast<std::size_t>(t)] *= 1.0 + 1e-7;
        CHECK(!diag::verify_samuelson(p, mutated, 1e-8).pass);
        sam::Path mutated2 = path;
        mutated2.c_o[static_cast<std::size_t>(t)] *= 1.0 + 1e-7;
        CHECK(!diag::verify_samuelson(p, mutated2, 1e-8).pass);
    }
}

TEST_CASE("tirole path verification") {
    ti::Params p;
    p.production = models::with_undepreciated_capital(models::cobb_douglas(1.0, 0.3), 1.0);
    p.utility = models::log_utility(0.9);
    p.G = 1.05;
    p.G_d = 1.0;
    p.D0 = 1e-4;
    ti::BubblyState bs = ti::bubbly_state(p);
    dynsys::MapSystem map = ti::make_map(p);

    std::vector<Vec> states;
    Vec x{bs.k_b * 0.98, bs.bubble * 1.01, 1e-5};
    states.push_back(x);
    for (int t = 0; t < 25; ++t) {
        x = map.map(x);
        states.push_back(x);
    }
    diag::ResidualReport rep = diag::verify_tirole(p, states, 1e-9);
    CHECK(rep.pass);

    states[10][1] += 1e-4;
    CHECK(!diag::verify_tirole(p, states, 1e-9).pass);
    CHECK_THROWS_AS(diag::verify_tirole(p, std::vector<Vec>{{0.1, 0.0}}, 1e-9), ToolkitError);
}

TEST_CASE("leverage path verification") {
    lev::Params p;
    p.beta = 0.96;
    p.pi = 0.1;
    p.lambda = 5.0;
    p.delta = 0.1;
    p.G = 1.02;
    p.production = models::cobb_douglas(1.0, 1.0 / 3.0);
    p.D = 0.05;
    lev::Injected inj = lev::make_injected(p);
    lev::SimulatedPath sp = lev::simulate_injected(p, 0.95 * inj.y_b, 80);
    diag::ResidualReport rep = diag::verify_leverage(p, sp, 1e-10);
    CHECK(rep.pass);

    sp.y[20] *= 1.001;
    CHECK(!diag::verify_leverage(p, sp, 1e-10).pass);
}

TEST_CASE("elimination certificates") {
    // Geometric growth at ratio 1.25: eliminated, and the partial sums carry
    // the predicted growth factor.
    diag::NecessityCertificate cert = diag::certify_elimination(0.8, 1.0, 1.2, 0.01);
    CHECK(cert.eliminated);
    CHECK(cert.growth_factor_ok);
    CHECK(cert.partial_sums[0] < cert.partial_sums[1]);
    CHECK(cert.partial_sums[1] < cert.partial_sums[2]);
    double predicted = 990.0 * std::log10(1.25);
    CHECK(cert.log10_sums[2] - cert.log10_sums[0] >= predicted - 0.01);

    // Convergent sums when the rate exceeds the dividend growth: pinned
    // under the geometric limit and essentially there by horizon 1000.
    diag::NecessityCertificate conv = diag::certify_elimination(1.3, 1.0, 1.2, 0.01);
    CHECK(!conv.eliminated);
    double bound = 0.01 / (1.0 - 1.0 / 1.3);
    CHECK(conv.partial_sums[2] <= bound * (1.0 + 1e-12));
    CHECK(conv.partial_sums[2] > bound * (1.0 - 1e-9));

    CHECK_THROWS_AS(diag::certify_elimination(0.8, 1.0, 1.2, 0.0), ToolkitError);

    // Extreme ratios overflow the raw sums but not the log route.
    diag::NecessityCertificate big = diag::certify_elimination(0.01, 2.0, 3.0, 1.0);
    CHECK(std::isinf(big.partial_sums[2]));
    CHECK(std::isfinite(big.log10_sums[2]));
    CHECK(big.growth_factor_ok);
}

TEST_CASE("certificate verdicts agree with the necessity detector") {
    auto g = testsupport::rng(71);
    for (int i = 0; i < 1000; ++i) {
        double R = std::exp(testsupport::uniform(g, std::log(0.05), std::log(5.0)));
        double Gd = std::exp(testsupport::uniform(g, std::log(0.05), std::log(5.0)));
        double G = std::exp(testsupport::uniform(g, std::log(0.05), std::log(5.0)));
        bool a = diag::certify_elimination(R, Gd, G, 0.01).eliminated;
        bool b = reduced::check_necessity(R, Gd, G).eliminated();
        CHECK(a == b);
    }
}
