#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bubblesolve/core/errors.hpp"
#include "bubblesolve/core/linalg.hpp"
#include "bubblesolve/core/roots.hpp"
#include "bubblesolve/dynsys/steady.hpp"
#include "bubblesolve/dynsys/system.hpp"
#include "bubblesolve/models/production.hpp"
#include "bubblesolve/models/utility.hpp"
#include "bubblesolve/reduced/reduced_form.hpp"

namespace bubblesolve::models::tirole {

// OLG production economy: young earn the wage, save in capital and a
// unit-supply asset, firms pay factor returns. The production spec is the
// total gross return f(k) + (1-delta) k form (see with_undepreciated_capital),
// so the risk-free rate is f'(k) directly.
struct Params {
    ProductionSpec production;
    UtilitySpec utility;
    double G = 0.0;    // gross population growth
    double G_d = 1.0;  // gross dividend growth
    double D0 = 0.0;   // initial dividend
    double N0 = 1.0;   // initial cohort size

    void validate() const {
        if (!(G > 0.0) || !(N0 > 0.0))
            throw ToolkitError(ErrorCode::ConfigInvalid, "tirole requires G > 0 and N0 > 0");
        if (D0 < 0.0) throw ToolkitError(ErrorCode::ConfigInvalid, "tirole requires D0 >= 0");
        if (D0 > 0.0 && !(G_d > 0.0))
            throw ToolkitError(ErrorCode::ConfigInvalid, "tirole requires G_d > 0 when D0 > 0");
        if (!production.f || !utility.M)
            throw ToolkitError(ErrorCode::ConfigInvalid, "tirole requires production and utility specs");
    }
};

// Young consumption c^y(k, k') from the first-order condition
// M(c, f'(k') (w(k) - c)) = f'(k'), solved by bisection on (0, w(k)).
// The FOC is monotone in c under strict quasi-concavity.
inline double consumption_young(const Params& prm, double k, double kprime) {
    double om = wage(prm.production, k);
    if (!(om > 0.0))
        throw ToolkitError(ErrorCode::FocSolveFailed, "nonpositive wage at k = " + std::to_string(k));
    double fp = prm.production.fp(kprime);
    if (!(fp > 0.0))
        throw ToolkitError(ErrorCode::FocSolveFailed, "nonpositive return at k' = " + std::to_string(kprime));
    auto g = [&](double c) { return prm.utility.M(c, fp * (om - c)) - fp; };
    double lo = 1e-12 * om, hi = (1.0 - 1e-12) * om;
    double glo = g(lo), ghi = g(hi);
    if (!((glo > 0.0 && ghi < 0.0) || (glo < 0.0 && ghi > 0.0) || glo == 0.0 || ghi == 0.0))
        throw ToolkitError(ErrorCode::FocSolveFailed, "no root of the consumption FOC in (0, w)");
    BisectOptions opt;
    opt.xtol = 1e-14 * std::max(1.0, om);
    opt.max_iter = 200;
    return bisect(g, lo, hi, opt);
}

// Partials of c^y by the implicit function theorem on the FOC.
struct CyPartials {
    double c1 = 0.0;  // d c^y / d k
    double c2 = 0.0;  // d c^y / d k'
};

inline CyPartials cy_partials(const Params& prm, double k, double kprime) {
    double c = consumption_young(prm, k, kprime);
    double om = wage(prm.production, k);
    double om_p = -k * prm.production.fpp(k);
    double fp = prm.production.fp(kprime);
    double fpp = prm.production.fpp(kprime);
    double second = fp * (om - c);
    double M1 = prm.utility.M1(c, second);
    double M2 = prm.utility.M2(c, second);
    double denom = M1 - fp * M2;  // negative under quasi-concavity
    CyPartials out;
    out.c1 = -M2 * fp * om_p / denom;
    out.c2 = -(M2 * (om - c) - 1.0) * fpp / denom;
    return out;
}

// Capital-labor ratio of the bubbly balanced growth path: f'(k_b) = G.
inline double k_bubbly(const Params& prm) {
    auto g = [&](double k) { return prm.production.fp(k) - prm.G; };
    double lo = 1e-10;
    if (!(g(lo) > 0.0))
        throw ToolkitError(ErrorCode::NoRoot, "f'(0+) does not exceed G; no bubbly ratio");
    double hi = 1.0;
    int guard = 0;
    while (g(hi) > 0.0) {
        hi *= 2.0;
        if (++guard > 200) throw ToolkitError(ErrorCode::NoRoot, "f' stays above G out to huge k");
    }
    BisectOptions opt;
    opt.xtol = 1e-14 * std::max(1.0, hi);
    opt.max_iter = 300;
    return bisect(g, lo, hi, opt);
}

// Excess saving of the young at a stationary ratio k: w(k) - c^y(k,k) - G k.
// Zeros are fundamental steady states.
inline double stationary_excess_saving(const Params& prm, double k) {
    return wage(prm.production, k) - consumption_young(prm, k, k) - prm.G * k;
}

// All fundamental ratios found by grid scan plus refinement on (lo, hi).
// Grid points where the inner solves fail (wage underflow at extreme ratios)
// are skipped rather than aborting the scan.
inline std::vector<double> fundamental_roots(const Params& prm, double lo, double hi,
                                             int scan_points = 2000) {
    auto psi = [&](double k) -> double {
        try {
            return stationary_excess_saving(prm, k);
        } catch (const ToolkitError&) {
            return std::numeric_limits<double>::quiet_NaN();
        }
    };
    std::vector<double> roots;
    for (auto [a, b] : scan_sign_changes(psi, lo, hi, scan_points)) {
        BisectOptions opt;
        opt.xtol = 1e-13 * std::max(1.0, b);
        opt.max_iter = 300;
        roots.push_back(bisect(psi, a, b, opt));
    }
    return roots;
}

struct FundamentalState {
    double k_f = 0.0;
    double R_f = 0.0;                   // f'(k_f)
    std::vector<double> all_roots;
    bool above_bubbly = false;          // k_f > k_b (the low-interest ordering)
};

// Fundamental ratio: the smallest root above k_b when one exists (the
// low-interest ordering k_b < k_f); otherwise the largest root below it.
inline FundamentalState k_fundamental(const Params& prm, double k_b) {
    FundamentalState st;
    st.all_roots = fundamental_roots(prm, 1e-6 * k_b, 100.0 * k_b);
    if (st.all_roots.empty())
        throw ToolkitError(ErrorCode::NoRoot, "no stationary ratio with zero excess saving found");
    double best_above = 0.0, best_below = 0.0;
    bool have_above = false, have_below = false;
    for (double r : st.all_roots) {
        if (r > k_b * (1.0 + 1e-10)) {
            if (!have_above || r < best_above) best_above = r;
            have_above = true;
        } else {
            if (!have_below || r > best_below) best_below = r;
            have_below = true;
        }
    }
    if (have_above) {
        st.k_f = best_above;
        st.above_bubbly = true;
    } else {
        st.k_f = best_below;
        st.above_bubbly = false;
    }
    st.R_f = prm.production.fp(st.k_f);
    return st;
}

struct BubblyState {
    double k_b = 0.0;
    double bubble = 0.0;  // per-capita asset value w(k_b) - c^y(k_b,k_b) - G k_b
    [[nodiscard]] Vec point() const { return {k_b, bubble, 0.0}; }
    [[nodiscard]] bool positive() const { return bubble > 0.0; }
};

inline BubblyState bubbly_state(const Params& prm) {
    BubblyState st;
    st.k_b = k_bubbly(prm);
    st.bubble = stationary_excess_saving(prm, st.k_b);
    return st;
}

// ---------------------------------------------------------------------------
// Equilibrium system in xi = (k, P/N, D/N): no-arbitrage between capital and
// the asset, asset market clearing, dividend growth.
// ---------------------------------------------------------------------------

inline dynsys::ImplicitSystem make_system(const Params& prm) {
    prm.validate();
    dynsys::ImplicitSystem sys;
    sys.dimension = 3;
    sys.predetermined = {0, 2};  // capital and the dividend scale are inherited
    double q = prm.G_d / prm.G;
    sys.residual = [prm, q](const Vec& xi, const Vec& eta) -> Vec {
        double H1 = eta[1] + eta[2] - (xi[1] / prm.G) * prm.production.fp(eta[0]);
        double H2 = xi[1] + prm.G * eta[0] + consumption_young(prm, xi[0], eta[0]) -
                    wage(prm.production, xi[0]);
        double H3 = eta[2] - q * xi[2];
        return {H1, H2, H3};
    };
    return sys;
}

// Forward map obtained by solving the implicit system for the next state:
// capital from market clearing (inner 1-D solve), the dividend scale from its
// own law of motion, the asset value from no-arbitrage.
inline dynsys::MapSystem make_map(const Params& prm) {
    prm.validate();
    double q = prm.G_d / prm.G;
    dynsys::MapSystem sys;
    sys.dimension = 3;
    sys.predetermined = {0, 2};
    sys.map = [prm, q](const Vec& xi) -> Vec {
        double rhs = wage(prm.production, xi[0]) - xi[1];
        if (!(rhs > 0.0))
            throw ToolkitError(ErrorCode::FocSolveFailed,
                               "asset value exhausts the wage; no capital market clearing");
        auto phi = [&](double kp) {
            return prm.G * kp + consumption_young(prm, xi[0], kp) - rhs;
        };
        double lo = 1e-12, hi = rhs / prm.G + 1.0;
        int guard = 0;
        while (phi(hi) < 0.0) {
            hi *= 2.0;
            if (++guard > 100)
                throw ToolkitError(ErrorCode::FocSolveFailed, "no clearing capital stock found");
        }
        if (phi(lo) > 0.0)
            throw ToolkitError(ErrorCode::FocSolveFailed, "clearing requires nonpositive capital");
        BisectOptions opt;
        opt.xtol = 1e-14 * std::max(1.0, hi);
        opt.max_iter = 300;
        double kp = bisect(phi, lo, hi, opt);
        double eta3 = q * xi[2];
        double eta2 = (xi[1] / prm.G) * prm.production.fp(kp) - eta3;
        return {kp, eta2, eta3};
    };
    sys.admissible = [prm](const Vec& xi) {
        return xi[0] > 0.0 && xi[1] >= 0.0 && xi[2] >= 0.0 && xi[1] < wage(prm.production, xi[0]);
    };
    return sys;
}

// ---------------------------------------------------------------------------
// Jacobian of the implied forward map at the bubbly steady state, by
// implicit differentiation with analytic partials. With
//   p = w'(k_b) - c1,  q = G_d/G,  r = -(bubble/G) f''(k_b),  s = G + c2,
// the blocks are
//   D_xi H  = [[0, -f'(k_b)/G, 0], [c1 - w', 1, 0], [0, 0, -q]]
//   D_eta H = [[r, 1, 1], [s, 0, 0], [0, 0, 1]]
// and Dh = -(D_eta H)^{-1} D_xi H. When f'(k_b) = G exactly this reduces to
//   [[p/s, -1/s, 0], [-p r/s, 1 + r/s, -q], [0, 0, q]].
// ---------------------------------------------------------------------------

struct JacobianBlocks {
    double p = 0.0, q = 0.0, r = 0.0, s = 0.0;
    Mat D_xi, D_eta, Dh;
};

inline JacobianBlocks analytic_jacobian_bubbly(const Params& prm, const BubblyState& st) {
    CyPartials cp = cy_partials(prm, st.k_b, st.k_b);
    double om_p = -st.k_b * prm.production.fpp(st.k_b);
    double fp = prm.production.fp(st.k_b);
    JacobianBlocks jb;
    jb.p = om_p - cp.c1;
    jb.q = prm.G_d / prm.G;
    jb.r = -(st.bubble / prm.G) * prm.production.fpp(st.k_b);
    jb.s = prm.G + cp.c2;
    jb.D_xi = Mat{{0.0, -fp / prm.G, 0.0}, {cp.c1 - om_p, 1.0, 0.0}, {0.0, 0.0, -jb.q}};
    jb.D_eta = Mat{{jb.r, 1.0, 1.0}, {jb.s, 0.0, 0.0}, {0.0, 0.0, 1.0}};
    Mat neg_inv = invert(jb.D_eta);
    jb.Dh = matmul(neg_inv, jb.D_xi);
    for (double& v : jb.Dh.a) v = -v;
    return jb;
}

inline Mat closed_form_dh(double p, double q, double r, double s) {
    return Mat{{p / s, -1.0 / s, 0.0}, {-p * r / s, 1.0 + r / s, -q}, {0.0, 0.0, q}};
}

// ---------------------------------------------------------------------------
// Determinacy bound on the elasticity of intertemporal substitution:
// determinate when eps exceeds 1 + (G^2/f'') * w / (c^y (w - c^y)) at k_b.
// The bound is strictly below 1 because f'' < 0.
// ---------------------------------------------------------------------------

inline double eis_bound(const Params& prm, double k_b) {
    double om = wage(prm.production, k_b);
    double c = consumption_young(prm, k_b, k_b);
    if (!(c > 0.0) || !(c < om))
        throw ToolkitError(ErrorCode::DegenerateConsumption, "c^y must lie strictly inside (0, w)");
    return 1.0 + (prm.G * prm.G / prm.production.fpp(k_b)) * om / (c * (om - c));
}

// Equivalent sufficiency condition G + dc^y/dk' > 0, the quantity s above.
inline double suff_cond_value(const Params& prm, double k_b) {
    return prm.G + cy_partials(prm, k_b, k_b).c2;
}

inline double eis_value(const Params& prm, double k_b) {
    double om = wage(prm.production, k_b);
    double c = consumption_young(prm, k_b, k_b);
    return eis_at(prm.utility, c, prm.production.fp(k_b) * (om - c));
}

// Closed Cobb-Douglas sufficient bound involving only exogenous parameters:
// 1 - (4 alpha / (1-alpha)^2) (1 - (1-delta)/G)^{-2}.
inline double cobb_douglas_closed_bound(const Params& prm) {
    if (!prm.production.is_cobb_douglas)
        throw ToolkitError(ErrorCode::PreconditionFailed, "closed bound needs Cobb-Douglas production");
    double al = prm.production.alpha;
    double de = prm.production.depreciation;
    double gap = 1.0 - (1.0 - de) / prm.G;
    return 1.0 - (4.0 * al / ((1.0 - al) * (1.0 - al))) / (gap * gap);
}

// ---------------------------------------------------------------------------
// Full analysis bundle used by the CLI and the verification suite.
// ---------------------------------------------------------------------------

struct Analysis {
    BubblyState bubbly;
    FundamentalState fundamental;
    double eis = 0.0;
    double bound = 0.0;
    double suff_cond = 0.0;
    bool predicted_determinate = false;
    reduced::NecessityVerdict necessity;
    dynsys::SteadyState bubbly_steady;  // implicit-differentiation Jacobian and verdict
    dynsys::Classification overall = dynsys::Classification::Indeterminate;
};

inline Analysis analyze(const Params& prm) {
    prm.validate();
    Analysis an;
    an.bubbly = bubbly_state(prm);
    an.fundamental = k_fundamental(prm, an.bubbly.k_b);
    an.eis = eis_value(prm, an.bubbly.k_b);
    an.bound = eis_bound(prm, an.bubbly.k_b);
    an.suff_cond = suff_cond_value(prm, an.bubbly.k_b);
    an.predicted_determinate = an.eis > an.bound;
    an.necessity = reduced::check_necessity(an.fundamental.R_f, prm.G_d, prm.G);

    dynsys::ImplicitSystem sys = make_system(prm);
    an.bubbly_steady = dynsys::implicit_steady_state(sys, an.bubbly.point());
    an.overall = an.bubbly_steady.verdict.classification;
    if (an.overall == dynsys::Classification::LocallyDeterminate &&
        !(an.necessity.eliminated() && an.bubbly.positive()))
        an.overall = dynsys::Classification::Indeterminate;
    return an;
}

// Reduced-form adapter: constant growth G, saving rate
// s(R) = 1 - (c^y(k,k) + G k) / w(k) at k = (f')^{-1}(R).
inline reduced::ReducedFormEconomy make_reduced_form(const Params& prm) {
    prm.validate();
    reduced::ReducedFormEconomy econ;
    econ.name = "tirole";
    econ.growth = [G = prm.G](double) { return G; };
    econ.saving = [prm](double R) {
        auto g = [&](double k) { return prm.production.fp(k) - R; };
        double lo = 1e-10, hi = 1.0;
        if (!(g(lo) > 0.0)) throw ToolkitError(ErrorCode::NonFiniteSaving, "rate above f'(0+)");
        int guard = 0;
        while (g(hi) > 0.0) {
            hi *= 2.0;
            if (++guard > 200) throw ToolkitError(ErrorCode::NonFiniteSaving, "rate below f'(inf)");
        }
        double k = bisect(g, lo, hi, {.xtol = 1e-13 * std::max(1.0, hi), .ftol = 0.0, .max_iter = 300});
        double om = wage(prm.production, k);
        return reduced::Interval(1.0 - (consumption_young(prm, k, k) + prm.G * k) / om);
    };
    econ.growth_jump_bound = 1e-12;
    econ.assumption1_threshold = prm.G;
    return econ;
}

}  // namespace bubblesolve::models::tirole
