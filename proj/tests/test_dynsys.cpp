#include "doctest.h"

#include <cmath>

#include "bubblesolve/dynsys/determinacy.hpp"
#include "bubblesolve/dynsys/path.hpp"
#include "bubblesolve/dynsys/steady.hpp"
#include "bubblesolve/dynsys/system.hpp"
#include "test_support.hpp"

using namespace bubblesolve;
using namespace bubblesolve::dynsys;

namespace {

// The dividend-injected exchange-economy map used across these tests:
//   x1' = b x1 / (beta a - (1+beta) x1) - q x2,   x2' = q x2
// with q = G_d / G. Fixed points (0,0) and ((beta a - b)/(1+beta), 0).
MapSystem example_system(double a, double b, double beta, double G, double G_d) {
    double q = G_d / G;
    MapSystem sys;
    sys.dimension = 2;
    sys.predetermined = {1};
    sys.map = [=](const Vec& x) -> Vec {
        return {b * x[0] / (beta * a - (1.0 + beta) * x[0]) - q * x[1], q * x[1]};
    };
    sys.free_bracket = {0.0, beta * a / (1.0 + beta)};
    sys.admissible = [=](const Vec& x) {
        return x[0] >= 0.0 && x[0] < beta * a / (1.0 + beta);
    };
    return sys;
}

}  // namespace

TEST_CASE("find_fixed_point recovers both fixed points of the example map") {
    MapSystem sys = example_system(3.0, 1.0, 0.5, 1.2, 1.0);
    SteadyState bubbly = find_fixed_point(sys, {0.3, 0.0}, 1e-14, 100);
    CHECK(std::abs(bubbly.point[0] - 1.0 / 3.0) <= 1e-12);
    CHECK(std::abs(bubbly.point[1]) <= 1e-14);
    CHECK(bubbly.residual_norm <= 1e-12);
    CHECK(testsupport::spectra_match(bubbly.eigenvalues, {{1.5, 0.0}, {5.0 / 6.0, 0.0}}, 1e-9));
    CHECK(bubbly.verdict.classification == Classification::LocallyDeterminate);

    SteadyState fundamental = find_fixed_point(sys, {1e-6, 0.0}, 1e-14, 100);
    CHECK(std::abs(fundamental.point[0]) <= 1e-12);
    CHECK(testsupport::spectra_match(fundamental.eigenvalues, {{2.0 / 3.0, 0.0}, {5.0 / 6.0, 0.0}},
                                     1e-9));
    CHECK(fundamental.verdict.classification == Classification::Indeterminate);
}

TEST_CASE("find_fixed_point on a 1-D contraction") {
    MapSystem sys;
    sys.dimension = 1;
    sys.predetermined = {};
    sys.map = [](const Vec& x) -> Vec { return {0.5 * x[0]}; };
    SteadyState ss = find_fixed_point(sys, {1.0}, 1e-13, 50);
    CHECK(std::abs(ss.point[0]) <= 1e-12);
    CHECK(ss.verdict.classification == Classification::Indeterminate);  // stable root, nothing predetermined
}

TEST_CASE("find_fixed_point error paths") {
    MapSystem sys;
    sys.dimension = 1;
    sys.predetermined = {};
    sys.map = [](const Vec& x) -> Vec { return {x[0] + std::exp(x[0])}; };  // no fixed point
    CHECK_THROWS_AS(find_fixed_point(sys, {0.0}, 1e-12, 10), ToolkitError);

    MapSystem flat;
    flat.dimension = 1;
    flat.predetermined = {};
    // No fixed point, and the Newton step is singular at the guess.
    flat.map = [](const Vec& x) -> Vec { return {x[0] + (x[0] - 1.0) * (x[0] - 1.0) + 1.0}; };
    CHECK_THROWS_AS(find_fixed_point(flat, {1.0}, 1e-12, 50), ToolkitError);
}

TEST_CASE("classify_determinacy examples and counting identity") {
    auto v1 = classify_determinacy({{1.5, 0.0}, {0.8333, 0.0}}, 1);
    CHECK(v1.classification == Classification::LocallyDeterminate);

    auto v2 = classify_determinacy({{0.5, 0.0}, {0.5, 0.0}}, 1);
    CHECK(v2.classification == Classification::Indeterminate);

    auto v3 = classify_determinacy({{1.0, 0.0}}, 1);
    CHECK(v3.classification == Classification::NonHyperbolic);

    auto v4 = classify_determinacy({{1.2, 0.0}, {1.7, 0.0}}, 1);
    CHECK(v4.classification == Classification::NoConvergentPath);

    // Counting identity on random spectra, complex entries included.
    auto g = testsupport::rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        int n = 1 + static_cast<int>(trial % 5);
        Spectrum eigs;
        for (int i = 0; i < n; ++i)
            eigs.emplace_back(testsupport::uniform(g, -2.0, 2.0), testsupport::uniform(g, -1.0, 1.0));
        int pc = static_cast<int>(trial % (n + 1));
        auto v = classify_determinacy(eigs, pc, 1e-8);
        CHECK(v.stable_count + v.unstable_count + v.on_circle_count == n);
        if (v.on_circle_count == 0) {
            CHECK((v.classification == Classification::LocallyDeterminate) ==
                  (v.stable_count == pc));
            CHECK((v.classification == Classification::Indeterminate) == (v.stable_count > pc));
            CHECK((v.classification == Classification::NoConvergentPath) == (v.stable_count < pc));
        } else {
            CHECK(v.classification == Classification::NonHyperbolic);
        }
    }
}

TEST_CASE("jacobian_fd matches analytic derivatives") {
    // Example map at its bubbly fixed point.
    MapSystem sys = example_system(3.0, 1.0, 0.5, 1.2, 1.0);
    Mat J = jacobian_fd(sys, {1.0 / 3.0, 0.0}, 1e-6);
    Mat expected{{1.5, -5.0 / 6.0}, {0.0, 5.0 / 6.0}};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(std::abs(J(i, j) - expected(i, j)) < 1e-6);

    // Identity map: derivative is the identity.
    MapSystem ident;
    ident.dimension = 3;
    ident.map = [](const Vec& x) { return x; };
    Mat Ji = jacobian_fd(ident, {0.3, -2.0, 7.0});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(Ji(i, j) - (i == j ? 1.0 : 0.0)) < 1e-9);

    // Scalar square: d/dx x^2 = 4 at x = 2.
    MapSystem sq;
    sq.dimension = 1;
    sq.map = [](const Vec& x) -> Vec { return {x[0] * x[0]}; };
    Mat Js = jacobian_fd(sq, {2.0}, 1e-6);
    CHECK(std::abs(Js(0, 0) - 4.0) < 1e-6);

    MapSystem bad;
    bad.dimension = 1;
    bad.map = [](const Vec& x) -> Vec { return {std::sqrt(x[0] - 1.0)}; };  // NaN below 1
    CHECK_THROWS_AS(jacobian_fd(bad, {1.0}, 1e-3), ToolkitError);
}

TEST_CASE("implicit jacobian of an explicitly linear implicit system") {
    // H(x, y) = y - A x  =>  Dh = A.
    Mat A{{0.3, 1.0, 0.0}, {-0.2, 0.9, 0.4}, {0.0, 0.0, 0.7}};
    ImplicitSystem sys;
    sys.dimension = 3;
    sys.predetermined = {0, 2};
    sys.residual = [A](const Vec& x, const Vec& y) -> Vec {
        Vec ax = matvec(A, x);
        return {y[0] - ax[0], y[1] - ax[1], y[2] - ax[2]};
    };
    Mat Dh = implicit_jacobian_fd(sys, {0.1, 0.2, 0.3});
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(Dh(i, j) - A(i, j)) < 1e-8);
}

TEST_CASE("saddle path on a linear saddle has a closed-form selected coordinate") {
    // x' = [[2, 1], [0, 0.5]] x: stable direction (1, -1.5), so the unique
    // converging initial state with x2 = d has x1 = -d / 1.5.
    MapSystem sys;
    sys.dimension = 2;
    sys.predetermined = {1};
    Mat A{{2.0, 1.0}, {0.0, 0.5}};
    sys.map = [A](const Vec& x) { return matvec(A, x); };
    sys.analytic_jacobian = [A](const Vec&) { return A; };
    sys.free_bracket = {0.0, 1.0};

    SteadyState target = find_fixed_point(sys, {0.01, 0.0}, 1e-13, 50);
    CHECK(target.verdict.classification == Classification::LocallyDeterminate);

    double d0 = -0.15;
    EquilibriumPath path = solve_saddle_path(sys, {d0}, target, 60, 1e-8);
    CHECK(std::abs(path.selected_free_value - 0.1) < 1e-10);
    CHECK(path.terminal_deviation <= 1e-8);
    CHECK(path.states[0][1] == d0);
    CHECK(path.max_step_residual <= 1e-10);

    // Forward re-iteration reproduces the raw (pre-stabilization) segment bit
    // for bit, because that segment is the orbit of its own initial state.
    int upto = path.stabilized_from < 0 ? path.horizon() : path.stabilized_from - 1;
    Vec x = path.states[0];
    for (int t = 0; t < upto; ++t) {
        x = sys.map(x);
        CHECK(inf_norm(x - path.states[static_cast<std::size_t>(t) + 1]) == 0.0);
    }
}

TEST_CASE("saddle path errors") {
    MapSystem sys;
    sys.dimension = 2;
    sys.predetermined = {1};
    Mat A{{0.5, 0.0}, {0.0, 0.4}};  // sink: indeterminate with one predetermined coordinate
    sys.map = [A](const Vec& x) { return matvec(A, x); };
    sys.free_bracket = {0.0, 1.0};
    SteadyState sink = find_fixed_point(sys, {0.1, 0.1}, 1e-13, 50);
    CHECK(sink.verdict.classification == Classification::Indeterminate);
    CHECK_THROWS_AS(solve_saddle_path(sys, {0.1}, sink, 10, 1e-8), ToolkitError);
}

TEST_CASE("constant path when starting at the steady state") {
    MapSystem sys;
    sys.dimension = 2;
    sys.predetermined = {0, 1};  // everything predetermined: pure forward orbit
    Mat A{{0.9, 0.0}, {0.0, 0.5}};
    sys.map = [A](const Vec& x) { return matvec(A, x); };
    SteadyState target = find_fixed_point(sys, {0.01, 0.01}, 1e-13, 50);
    EquilibriumPath path = solve_saddle_path(sys, {0.0, 0.0}, target, 5, 1e-12);
    for (const auto& s : path.states) CHECK(inf_norm(s) == 0.0);
}

TEST_CASE("backward iteration round-trips through the forward map") {
    MapSystem sys = example_system(3.0, 1.0, 0.5, 1.2, 1.0);
    double q = 1.0 / 1.2;
    auto inverse = [&](const Vec& eta) -> Vec {
        double u = eta[0] + eta[1];
        REQUIRE(u > 0.0);
        double xi1 = 0.5 * 3.0 * u / (1.0 + 1.5 * u);
        return {xi1, eta[1] / q};
    };
    Vec terminal{1.0 / 3.0 - 1e-4, 1e-9};
    EquilibriumPath path = backward_iterate(inverse, terminal, 50, sys.map);
    CHECK(path.states.size() == 51);
    CHECK(inf_norm(path.states[50] - terminal) == 0.0);
    CHECK(path.max_step_residual <= 1e-10);

    EquilibriumPath trivial = backward_iterate(inverse, terminal, 0, sys.map);
    CHECK(trivial.states.size() == 1);
    CHECK(inf_norm(trivial.states[0] - terminal) == 0.0);
}

TEST_CASE("perturbing the selected free coordinate makes the terminal deviation grow") {
    MapSystem sys = example_system(3.0, 1.0, 0.5, 1.2, 1.0);
    SteadyState target = find_fixed_point(sys, {0.3, 0.0}, 1e-14, 100);
    double d0 = 1e-3;
    EquilibriumPath path = solve_saddle_path(sys, {d0}, target, 40, 1e-4);
    double x_star = path.selected_free_value;

    for (double eps : {1e-4, -1e-4}) {
        Vec x{x_star + eps, d0};
        double dev0 = std::abs(eps);
        for (int t = 0; t < 12; ++t) x = sys.map(x);
        double dev = inf_norm(x - target.point);
        CHECK(dev > dev0);  // divergence along the unstable eigenvector
    }
}

TEST_CASE("classify_determinacy accepts a steady state directly") {
    MapSystem sys = example_system(3.0, 1.0, 0.5, 1.2, 1.0);
    SteadyState ss = find_fixed_point(sys, {0.3, 0.0}, 1e-13, 100);
    auto v = classify_determinacy(ss, 1, 1e-8);
    CHECK(v.classification == Classification::LocallyDeterminate);
    CHECK(v.stable_count + v.unstable_count + v.on_circle_count == 2);
}
