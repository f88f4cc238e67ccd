#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "bubblesolve/core/errors.hpp"
#include "bubblesolve/core/linalg.hpp"
#include "bubblesolve/dynsys/system.hpp"
#include "bubblesolve/reduced/reduced_form.hpp"

namespace bubblesolve::models::samuelson {

// Two-period OLG exchange economy with log preferences, endowments
// (a G^t, b G^t) and a unit-supply asset, optionally paying dividends
// D_t = D0 G_d^t.
struct Params {
    double a = 0.0;     // young endowment coefficient
    double b = 0.0;     // old endowment coefficient
    double beta = 0.0;  // time preference
    double G = 0.0;     // gross endowment growth
    double G_d = 1.0;   // gross dividend growth
    double D0 = 0.0;    // initial dividend

    void validate() const {
        if (!(a > 0.0) || !(b > 0.0) || !(beta > 0.0) || !(G > 0.0))
            throw ToolkitError(ErrorCode::ConfigInvalid, "samuelson requires a, b, beta, G > 0");
        if (D0 < 0.0) throw ToolkitError(ErrorCode::ConfigInvalid, "samuelson requires D0 >= 0");
        if (D0 > 0.0 && !(G_d > 0.0))
            throw ToolkitError(ErrorCode::ConfigInvalid, "samuelson requires G_d > 0 when D0 > 0");
    }
};

// Balanced-growth (detrended) bubble price, the largest sustainable value.
inline double bubbly_price_coeff(const Params& p) { return (p.beta * p.a - p.b) / (1.0 + p.beta); }

// Autarky interest rate, also the fundamental-equilibrium rate.
inline double fundamental_rate(const Params& p) { return p.b * p.G / (p.beta * p.a); }

// One step of the detrended price recursion p' = b p / (beta a - (1+beta) p).
inline double detrended_price_step(const Params& p, double price) {
    return p.b * price / (p.beta * p.a - (1.0 + p.beta) * price);
}

// Price and allocation series under perfect foresight.
struct Path {
    int periods = 0;          // series run t = 0..periods
    std::vector<double> P;    // asset price
    std::vector<double> p;    // detrended price G^{-t} P_t
    std::vector<double> D;    // dividend
    std::vector<double> c_y;  // consumption when young
    std::vector<double> c_o;  // consumption when old
    std::vector<double> R;    // gross interest rate, t = 0..periods-1
};

// Closed-form price path of the dividendless economy. P0 = 0 selects the
// autarkic equilibrium (the 1/0 convention is handled by this explicit
// branch, never through floating-point infinities).
inline Path closed_form(const Params& prm, double P0, int T) {
    prm.validate();
    if (prm.D0 != 0.0)
        throw ToolkitError(ErrorCode::PreconditionFailed, "closed form applies to the D0 = 0 economy");
    double coeff = bubbly_price_coeff(prm);
    bool bubbly_possible = prm.beta * prm.a > prm.b;
    if (P0 < 0.0 || (bubbly_possible && P0 > coeff * (1.0 + 1e-14)) || (!bubbly_possible && P0 != 0.0))
        throw ToolkitError(ErrorCode::InvalidInitialPrice,
                           "P0 must lie in [0, " + std::to_string(bubbly_possible ? coeff : 0.0) + "]");

    Path path;
    path.periods = T;
    path.P.resize(static_cast<std::size_t>(T) + 1);
    path.p.resize(static_cast<std::size_t>(T) + 1);
    path.D.assign(static_cast<std::size_t>(T) + 1, 0.0);
    path.c_y.resize(static_cast<std::size_t>(T) + 1);
    path.c_o.resize(static_cast<std::size_t>(T) + 1);
    path.R.resize(static_cast<std::size_t>(T));

    double growth_t = 1.0;  // G^t
    if (P0 == 0.0) {
        for (int t = 0; t <= T; ++t) {
            path.p[t] = 0.0;
            path.P[t] = 0.0;
            path.c_y[t] = prm.a * growth_t;
            path.c_o[t] = prm.b * growth_t;
            growth_t *= prm.G;
        }
        double R_aut = fundamental_rate(prm);
        for (int t = 0; t < T; ++t) path.R[t] = R_aut;
        return path;
    }

    double slope = prm.beta * prm.a / prm.b;          // growth factor of 1/p
    double offset = (1.0 + prm.beta) / (prm.beta * prm.a - prm.b);
    double C = 1.0 / P0 - offset;
    double slope_t = 1.0;  // slope^t
    for (int t = 0; t <= T; ++t) {
        path.p[t] = 1.0 / (slope_t * C + offset);
        path.P[t] = path.p[t] * growth_t;
        path.c_y[t] = (prm.a - path.p[t]) * growth_t;
        path.c_o[t] = (prm.b + path.p[t]) * growth_t;
        slope_t *= slope;
        growth_t *= prm.G;
    }
    for (int t = 0; t < T; ++t) path.R[t] = path.P[t + 1] / path.P[t];
    return path;
}

// ---------------------------------------------------------------------------
// Dividend-injected economy as a two-dimensional autonomous system in
// xi = (detrended price, detrended dividend scale). The dividend coordinate
// is predetermined; the price coordinate is free.
// ---------------------------------------------------------------------------

struct Injected {
    Params params;
    dynsys::MapSystem system;
    reduced::NecessityVerdict necessity;  // R_f < G_d < G gate for eliminating the fundamental state
    bool necessity_ok = false;

    [[nodiscard]] Vec fundamental_point() const { return {0.0, 0.0}; }
    [[nodiscard]] Vec bubbly_point() const { return {bubbly_price_coeff(params), 0.0}; }
};

inline Mat injected_jacobian(const Params& prm, const Vec& xi) {
    double den = prm.beta * prm.a - (1.0 + prm.beta) * xi[0];
    double q = prm.G_d / prm.G;
    return Mat{{prm.b * prm.beta * prm.a / (den * den), -q}, {0.0, q}};
}

inline Injected make_injected(const Params& prm) {
    prm.validate();
    if (!(prm.D0 > 0.0))
        throw ToolkitError(ErrorCode::PreconditionFailed, "dividend injection requires D0 > 0");

    Injected inj;
    inj.params = prm;
    double upper = prm.beta * prm.a / (1.0 + prm.beta);  // pole of the price recursion
    double q = prm.G_d / prm.G;

    dynsys::MapSystem sys;
    sys.dimension = 2;
    sys.predetermined = {1};
    sys.map = [prm, q](const Vec& xi) -> Vec {
        double den = prm.beta * prm.a - (1.0 + prm.beta) * xi[0];
        return {prm.b * xi[0] / den - q * xi[1], q * xi[1]};
    };
    sys.analytic_jacobian = [prm](const Vec& xi) { return injected_jacobian(prm, xi); };
    sys.inverse = [prm](const Vec& eta) -> Vec {
        // Solve h(xi) = eta for xi; u is the detrended cum-dividend value the
        // young must be willing to pay for, which requires a positive price.
        double u = eta[0] + eta[1];
        if (!(u > 0.0))
            throw ToolkitError(ErrorCode::InverseUndefined,
                               "inverse requires a positive price plus dividend value");
        double xi1 = prm.beta * prm.a * u / (prm.b + (1.0 + prm.beta) * u);
        double xi2 = eta[1] * prm.G / prm.G_d;
        return {xi1, xi2};
    };
    sys.admissible = [prm, upper](const Vec& xi) {
        return xi[0] >= 0.0 && xi[0] < upper && xi[1] >= 0.0;
    };
    sys.free_bracket = {0.0, upper};
    sys.predetermined_autonomous = true;  // the dividend coordinate decays on its own
    inj.system = std::move(sys);

    inj.necessity = reduced::check_necessity(fundamental_rate(prm), prm.G_d, prm.G);
    inj.necessity_ok = inj.necessity.eliminated();
    return inj;
}

// Euler-implied gross interest rate along a path in xi coordinates.
inline double interest_rate(const Params& prm, const Vec& xi_t, const Vec& xi_next) {
    return (prm.G / prm.beta) * (prm.b + xi_next[0] + xi_next[1]) / (prm.a - xi_t[0]);
}

// Limiting interest rate of a converging path in xi coordinates.
inline double interest_limit(const Params& prm, const std::vector<Vec>& states,
                             double conv_tol = 1e-8) {
    if (states.size() < 3)
        throw ToolkitError(ErrorCode::NotConvergent, "path too short to take a limit");
    std::size_t T = states.size() - 1;
    double R_last = interest_rate(prm, states[T - 1], states[T]);
    double R_prev = interest_rate(prm, states[T - 2], states[T - 1]);
    if (std::abs(R_last - R_prev) > conv_tol * std::max(1.0, std::abs(R_last)))
        throw ToolkitError(ErrorCode::NotConvergent, "interest rate still moving at the horizon");
    return R_last;
}

// Levels representation of a path in xi coordinates starting at t = 0.
inline Path to_levels(const Params& prm, const std::vector<Vec>& states) {
    Path path;
    int T = static_cast<int>(states.size()) - 1;
    path.periods = T;
    path.P.resize(static_cast<std::size_t>(T) + 1);
    path.p.resize(static_cast<std::size_t>(T) + 1);
    path.D.resize(static_cast<std::size_t>(T) + 1);
    path.c_y.resize(static_cast<std::size_t>(T) + 1);
    path.c_o.resize(static_cast<std::size_t>(T) + 1);
    path.R.resize(static_cast<std::size_t>(T));
    double growth_t = 1.0;
    for (int t = 0; t <= T; ++t) {
        double xi1 = states[static_cast<std::size_t>(t)][0];
        double xi2 = states[static_cast<std::size_t>(t)][1];
        path.p[t] = xi1;
        path.P[t] = xi1 * growth_t;
        path.D[t] = xi2 * growth_t;
        path.c_y[t] = (prm.a - xi1) * growth_t;
        path.c_o[t] = (prm.b + xi1 + xi2) * growth_t;
        growth_t *= prm.G;
    }
    for (int t = 0; t < T; ++t) {
        double Pt = path.P[t];
        path.R[t] = Pt > 0.0 ? (path.P[t + 1] + path.D[t + 1]) / Pt : fundamental_rate(prm);
    }
    return path;
}

// ---------------------------------------------------------------------------
// Pareto comparison of the dividendless equilibria indexed by P0.
// ---------------------------------------------------------------------------

// Generation utility as a function of the detrended price, up to a term
// independent of it; its derivative is positive on (0, beta a / (1+beta)).
inline double generation_utility_kernel(const Params& prm, double p) {
    return (1.0 + prm.beta) * std::log(prm.a - p) -
           prm.beta * std::log(prm.beta * prm.a - (1.0 + prm.beta) * p);
}

inline double generation_utility_kernel_prime(const Params& prm, double p) {
    return (1.0 + prm.beta) * p /
           ((prm.a - p) * (prm.beta * prm.a - (1.0 + prm.beta) * p));
}

struct ParetoReport {
    double initial_old_diff = 0.0;               // log(b + P0') - log(b + P0)
    std::vector<double> generation_diff;         // utility difference per generation t = 0..T
    double min_kernel_prime = 0.0;               // min of the utility-kernel derivative on a grid
    bool all_positive = false;
};

// Generation utility differences are evaluated as the integral of the
// (positive) kernel derivative between the two detrended prices. A direct
// log difference of the two consumption streams loses all significant digits
// once both paths have decayed close to autarky; the quadrature form keeps
// full relative precision and a manifestly correct sign at any horizon. The
// price separation itself propagates in product form for the same reason.
inline ParetoReport pareto_compare(const Params& prm, double P0_low, double P0_high, int T,
                                   int grid_points = 100) {
    prm.validate();
    if (!(prm.beta * prm.a > prm.b))
        throw ToolkitError(ErrorCode::PreconditionFailed, "requires beta*a > b");
    double coeff = bubbly_price_coeff(prm);
    if (P0_low < 0.0 || P0_high > coeff * (1.0 + 1e-14) || P0_low > P0_high)
        throw ToolkitError(ErrorCode::InvalidInitialPrice, "need 0 <= P0_low <= P0_high <= bubbly value");

    Path lo = closed_form(prm, P0_low, T + 1);
    Path hi = closed_form(prm, P0_high, T + 1);

    ParetoReport rep;
    rep.initial_old_diff = std::log1p((P0_high - P0_low) / (prm.b + P0_low));
    rep.generation_diff.resize(static_cast<std::size_t>(T) + 1);
    bool strict = P0_low < P0_high;
    rep.all_positive = strict;

    double slope = prm.beta * prm.a / prm.b;  // growth factor of reciprocal detrended prices
    double offset = (1.0 + prm.beta) / (prm.beta * prm.a - prm.b);
    double C_hi = P0_high > 0.0 ? 1.0 / P0_high - offset : 0.0;
    double C_gap = (P0_low > 0.0 && P0_high > 0.0)
                       ? (P0_high - P0_low) / (P0_low * P0_high)  // C_lo - C_hi, cancellation-free
                       : 0.0;
    double slope_t = 1.0;
    for (int t = 0; t <= T; ++t) {
        double p_lo = lo.p[t];
        double p_hi = hi.p[t];
        double gap;  // p_hi - p_lo, in stable form
        if (!strict)
            gap = 0.0;
        else if (P0_low == 0.0)
            gap = p_hi;
        else
            gap = slope_t * C_gap / ((slope_t * C_hi + offset) * (slope_t * (C_gap + C_hi) + offset));
        // Composite Simpson quadrature of the kernel derivative over the gap.
        const int panels = 64;
        double integral = 0.0;
        if (gap > 0.0) {
            double h = gap / (2 * panels);
            double acc = generation_utility_kernel_prime(prm, p_lo) +
                         generation_utility_kernel_prime(prm, p_lo + gap);
            for (int i = 1; i < 2 * panels; ++i)
                acc += (i % 2 == 1 ? 4.0 : 2.0) *
                       generation_utility_kernel_prime(prm, p_lo + h * i);
            integral = acc * h / 3.0;
        }
        rep.generation_diff[static_cast<std::size_t>(t)] = integral;
        if (strict && integral <= 0.0) {
            rep.all_positive = false;
            throw ToolkitError(ErrorCode::OrderViolation,
                               "generation " + std::to_string(t) + " utility difference " +
                                   std::to_string(integral) + " is not positive");
        }
        slope_t *= slope;
    }

    rep.min_kernel_prime = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= grid_points; ++i) {
        double p = coeff * static_cast<double>(i) / (grid_points + 1);
        rep.min_kernel_prime = std::min(rep.min_kernel_prime, generation_utility_kernel_prime(prm, p));
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Reduced-form adapter: constant growth G and saving rate
// s(R) = (beta - b G / (a R)) / (1 + beta).
// ---------------------------------------------------------------------------

inline reduced::ReducedFormEconomy make_reduced_form(const Params& prm) {
    prm.validate();
    reduced::ReducedFormEconomy econ;
    econ.name = "samuelson";
    econ.growth = [G = prm.G](double) { return G; };
    econ.saving = [prm](double R) {
        if (!(R > 0.0)) throw ToolkitError(ErrorCode::NonFiniteSaving, "saving undefined for R <= 0");
        return reduced::Interval((prm.beta - prm.b * prm.G / (prm.a * R)) / (1.0 + prm.beta));
    };
    econ.growth_jump_bound = 1e-12;  // exactly constant
    econ.assumption1_threshold = prm.G;
    return econ;
}

inline std::pair<double, double> fundamental_bracket(const Params& prm) {
    double rf = fundamental_rate(prm);
    return {0.5 * rf, 2.0 * std::max(prm.G, rf)};
}

}  // namespace bubblesolve::models::samuelson
