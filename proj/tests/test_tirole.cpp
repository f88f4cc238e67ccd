#include "doctest.h"

#include <cmath>

#include "bubblesolve/models/tirole.hpp"
#include "test_support.hpp"

using namespace bubblesolve;
namespace ti = bubblesolve::models::tirole;
using bubblesolve::models::cobb_douglas;
using bubblesolve::models::ces;
using bubblesolve::models::crra;
using bubblesolve::models::log_utility;
using bubblesolve::models::with_undepreciated_capital;

namespace {

// An instance in the low-interest regime: R_f < G and a positive bubble.
ti::Params valid_instance() {
    ti::Params p;
    p.production = with_undepreciated_capital(cobb_douglas(1.0, 0.3), 1.0);
    p.utility = log_utility(0.9);
    p.G = 1.05;
    p.G_d = 1.0;
    p.D0 = 1e-3;
    p.N0 = 1.0;
    return p;
}

// The high-interest instance used by the verification suite: standard-looking
// parameters under which the dividendless economy is dynamically efficient.
ti::Params efficient_instance() {
    ti::Params p;
    p.production = with_undepreciated_capital(cobb_douglas(1.0, 1.0 / 3.0), 0.1);
    p.utility = log_utility(0.9);
    p.G = 1.05;
    p.G_d = 1.0;
    p.D0 = 1e-3;
    p.N0 = 1.0;
    return p;
}

double cd_log_kf(double A, double alpha, double beta, double G) {
    return std::pow(beta * A * (1.0 - alpha) / (G * (1.0 + beta)), 1.0 / (1.0 - alpha));
}

}  // namespace

TEST_CASE("young consumption: log utility closed form, independent of k'") {
    ti::Params p = valid_instance();
    double k = 0.2;
    double om = models::wage(p.production, k);
    double expected = om / 1.9;
    CHECK(std::abs(ti::consumption_young(p, k, 0.15) - expected) < 1e-10);
    CHECK(std::abs(ti::consumption_young(p, k, 0.45) - expected) < 1e-10);
}

TEST_CASE("young consumption: CRRA closed form") {
    ti::Params p = valid_instance();
    double sigma = 2.5, beta = 0.9;
    p.utility = crra(beta, sigma);
    double k = 0.2, kp = 0.3;
    double om = models::wage(p.production, k);
    double fp = p.production.fp(kp);
    // M = f' gives c2/c1 = (beta f')^(1/sigma), so c = om f' / (f' + (beta f')^(1/sigma)).
    double expected = om * fp / (fp + std::pow(beta * fp, 1.0 / sigma));
    CHECK(std::abs(ti::consumption_young(p, k, kp) - expected) < 1e-10);
}

TEST_CASE("consumption partials match finite differences") {
    for (auto util : {log_utility(0.9), crra(0.9, 0.6), crra(0.9, 3.0)}) {
        ti::Params p = valid_instance();
        p.utility = util;
        double k = 0.18, kp = 0.21, h = 1e-6;
        ti::CyPartials cp = ti::cy_partials(p, k, kp);
        double fd1 = (ti::consumption_young(p, k + h, kp) - ti::consumption_young(p, k - h, kp)) /
                     (2.0 * h);
        double fd2 = (ti::consumption_young(p, k, kp + h) - ti::consumption_young(p, k, kp - h)) /
                     (2.0 * h);
        CHECK(std::abs(cp.c1 - fd1) < 1e-6 * std::max(1.0, std::abs(fd1)));
        CHECK(std::abs(cp.c2 - fd2) < 1e-6 * std::max(1.0, std::abs(fd2)));
    }
}

TEST_CASE("steady states of the low-interest instance") {
    ti::Params p = valid_instance();
    ti::BubblyState bs = ti::bubbly_state(p);
    CHECK(std::abs(p.production.fp(bs.k_b) - p.G) < 1e-11);
    CHECK(std::abs(bs.k_b - std::pow(0.3 / 1.05, 1.0 / 0.7)) < 1e-11);
    CHECK(bs.positive());

    ti::FundamentalState fs = ti::k_fundamental(p, bs.k_b);
    CHECK(fs.above_bubbly);  // k_b < k_f in the low-interest regime
    CHECK(std::abs(fs.k_f - cd_log_kf(1.0, 0.3, 0.9, 1.05)) < 1e-9);
    CHECK(fs.R_f < p.G);

    // Both steady states zero the residual system.
    dynsys::ImplicitSystem sys = ti::make_system(p);
    Vec xb = bs.point();
    CHECK(inf_norm(sys.residual(xb, xb)) < 1e-10);
    Vec xf{fs.k_f, 0.0, 0.0};
    CHECK(inf_norm(sys.residual(xf, xf)) < 1e-10);
}

TEST_CASE("the efficient instance reverses the steady-state ordering") {
    ti::Params p = efficient_instance();
    ti::BubblyState bs = ti::bubbly_state(p);
    ti::FundamentalState fs = ti::k_fundamental(p, bs.k_b);
    CHECK(std::abs(fs.k_f - cd_log_kf(1.0, 1.0 / 3.0, 0.9, 1.05)) < 1e-9);
    CHECK(!fs.above_bubbly);      // k_f < k_b: no room for a bubble
    CHECK(fs.R_f > p.G);          // dynamically efficient
    CHECK(!bs.positive());        // the stationary asset value is negative
    CHECK(!reduced::check_necessity(fs.R_f, p.G_d, p.G).eliminated());
}

TEST_CASE("bubbly Jacobian: analytic blocks, finite differences, closed form agree") {
    ti::Params p = valid_instance();
    ti::BubblyState bs = ti::bubbly_state(p);
    ti::JacobianBlocks jb = ti::analytic_jacobian_bubbly(p, bs);
    dynsys::ImplicitSystem sys = ti::make_system(p);
    Mat fd = dynsys::implicit_jacobian_fd(sys, bs.point());
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(fd(i, j) - jb.Dh(i, j)) < 1e-6);

    // f'(k_b) = G at the solved ratio, so the closed form applies.
    Mat cf = ti::closed_form_dh(jb.p, jb.q, jb.r, jb.s);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(std::abs(cf(i, j) - jb.Dh(i, j)) < 1e-9);

    // Sign pattern of the blocks and the eigenvalue split.
    CHECK(jb.p > 0.0);
    CHECK(jb.q > 0.0);
    CHECK(jb.q < 1.0);
    CHECK(jb.r > 0.0);
    CHECK(jb.s > 0.0);
    auto eigs = eigenvalues(jb.Dh);
    int above = 0, inside = 0;
    for (auto ev : eigs) {
        CHECK(std::abs(ev.imag()) < 1e-12);
        if (ev.real() > 1.0)
            ++above;
        else if (ev.real() > 0.0 && ev.real() < 1.0)
            ++inside;
    }
    CHECK(above == 1);
    CHECK(inside == 2);

    // With capital and the dividend scale predetermined, the split is saddle
    // determinacy.
    auto verdict = dynsys::classify_determinacy(eigs, 2);
    CHECK(verdict.classification == dynsys::Classification::LocallyDeterminate);
}

TEST_CASE("forward map agrees with the implicit system") {
    ti::Params p = valid_instance();
    ti::BubblyState bs = ti::bubbly_state(p);
    dynsys::MapSystem map = ti::make_map(p);
    dynsys::ImplicitSystem sys = ti::make_system(p);

    Vec fixed = map.map(bs.point());
    CHECK(inf_norm(fixed - bs.point()) < 1e-10);

    Vec xi{bs.k_b * 1.07, bs.bubble * 0.8, 1e-4};
    Vec eta = map.map(xi);
    CHECK(inf_norm(sys.residual(xi, eta)) < 1e-10);
}

TEST_CASE("determinacy bound: below one, below the Cobb-Douglas closed bound, log passes") {
    ti::Params p = valid_instance();
    ti::BubblyState bs = ti::bubbly_state(p);
    double bound = ti::eis_bound(p, bs.k_b);
    CHECK(bound < 1.0);
    double closed = ti::cobb_douglas_closed_bound(p);
    CHECK(bound <= closed + 1e-12);
    CHECK(closed < 1.0);
    CHECK(ti::eis_value(p, bs.k_b) == doctest::Approx(1.0));
    CHECK(ti::eis_value(p, bs.k_b) > bound);  // log utility predicts determinacy

    ti::Params e = efficient_instance();
    ti::BubblyState bse = ti::bubbly_state(e);
    double bound_e = ti::eis_bound(e, bse.k_b);
    CHECK(bound_e < 1.0);
    CHECK(bound_e <= ti::cobb_douglas_closed_bound(e) + 1e-12);
}

TEST_CASE("EIS bound and the sufficiency condition agree as booleans on a grid") {
    auto g = testsupport::rng(43);
    int disagreements = 0;
    for (int trial = 0; trial < 100; ++trial) {
        ti::Params p;
        double A = testsupport::uniform(g, 0.5, 2.0);
        double alpha = testsupport::uniform(g, 0.2, 0.45);
        double delta = testsupport::uniform(g, 0.05, 1.0);
        double beta = testsupport::uniform(g, 0.5, 1.0);
        double sigma = testsupport::uniform(g, 0.25, 4.0);
        p.production = with_undepreciated_capital(cobb_douglas(A, alpha), delta);
        p.utility = crra(beta, sigma);
        p.G = testsupport::uniform(g, 1.0, 1.1);
        p.G_d = 1.0;
        p.D0 = 1e-4;
        double k_b = ti::k_bubbly(p);
        CHECK(ti::eis_bound(p, k_b) < 1.0);  // always strict: f'' < 0
        bool via_bound = ti::eis_value(p, k_b) > ti::eis_bound(p, k_b);
        bool via_suff = ti::suff_cond_value(p, k_b) > 0.0;
        if (via_bound != via_suff) ++disagreements;
    }
    CHECK(disagreements == 0);
}

TEST_CASE("reduced-form adapter: R_f from bisection matches f'(k_f)") {
    ti::Params p = valid_instance();
    ti::BubblyState bs = ti::bubbly_state(p);
    ti::FundamentalState fs = ti::k_fundamental(p, bs.k_b);
    reduced::ReducedFormEconomy econ = ti::make_reduced_form(p);
    double R_f = reduced::solve_fundamental_rate(econ, fs.R_f * 0.5, p.G, 1e-12);
    CHECK(std::abs(R_f - fs.R_f) < 1e-9);
    double R_b = reduced::solve_bubbly_rate(econ, R_f, 10.0, 1e-10);
    CHECK(std::abs(R_b - p.G) < 1e-9);
}

TEST_CASE("analysis bundle ties the pieces together") {
    ti::Params p = valid_instance();
    ti::Analysis an = ti::analyze(p);
    CHECK(an.predicted_determinate);
    CHECK(an.necessity.eliminated());
    CHECK(an.bubbly.positive());
    CHECK(an.overall == dynsys::Classification::LocallyDeterminate);
    CHECK(an.bubbly_steady.verdict.stable_count == 2);
    CHECK(an.bubbly_steady.verdict.unstable_count == 1);

    // Error path: preferences with no marginal-rate crossing have no interior
    // consumption choice, which surfaces through the bound as well.
    ti::Params broken = p;
    broken.utility.M = [](double, double) { return 1e-9; };
    CHECK_THROWS_AS(ti::eis_bound(broken, 0.2), ToolkitError);
}


TEST_CASE("saddle structure holds across randomized low-interest instances") {
    // Full-depreciation Cobb-Douglas instances with a low capital share stay
    // inside the low-interest regime; the eigenvalue split and sign pattern
    // must hold at each of them.
    auto g = testsupport::rng(77);
    int valid = 0;
    for (int trial = 0; trial < 60 && valid < 25; ++trial) {
        ti::Params p;
        double alpha = testsupport::uniform(g, 0.22, 0.31);
        double beta = testsupport::uniform(g, 0.85, 0.98);
        p.production = with_undepreciated_capital(cobb_douglas(1.0, alpha), 1.0);
        p.utility = log_utility(beta);
        p.G = testsupport::uniform(g, 1.01, 1.08);
        p.D0 = 1e-4;
        ti::BubblyState bs = ti::bubbly_state(p);
        ti::FundamentalState fs = ti::k_fundamental(p, bs.k_b);
        if (!(fs.R_f < p.G) || !bs.positive()) continue;  // outside the regime; skip
        ++valid;
        p.G_d = 0.5 * (fs.R_f + p.G);  // inside the elimination window
        ti::JacobianBlocks jb = ti::analytic_jacobian_bubbly(p, bs);
        CHECK(jb.p > 0.0);
        CHECK(jb.q > 0.0);
        CHECK(jb.q < 1.0);
        CHECK(jb.r > 0.0);
        CHECK(jb.s > 0.0);
        auto eigs = eigenvalues(jb.Dh);
        int above = 0, inside = 0;
        for (auto ev : eigs) {
            if (ev.real() > 1.0) ++above;
            if (ev.real() > 0.0 && ev.real() < 1.0) ++inside;
        }
        CHECK(above == 1);
        CHECK(inside == 2);
        CHECK(dynsys::classify_determinacy(eigs, 2).classification ==
              dynsys::Classification::LocallyDeterminate);
    }
    CHECK(valid >= 25);
}
