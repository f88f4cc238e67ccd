#pragma once

#include <cmath>
#include <functional>

#include "bubblesolve/core/eigen.hpp"
#include "bubblesolve/core/linalg.hpp"
#include "bubblesolve/core/roots.hpp"
#include "bubblesolve/dynsys/determinacy.hpp"
#include "bubblesolve/dynsys/system.hpp"

namespace bubblesolve::dynsys {

struct SteadyState {
    Vec point;
    double residual_norm = 0.0;  // ||h(x*) - x*||_inf
    Mat jacobian;                // Dh(x*)
    Spectrum eigenvalues;
    DeterminacyVerdict verdict;
};

// Central-difference Jacobian of a map at a point. The step is scaled per
// coordinate by max(1, |x_j|).
inline Mat jacobian_fd(const std::function<Vec(const Vec&)>& map, const Vec& point,
                       double step = 1e-6) {
    const int n = static_cast<int>(point.size());
    Mat J(n, n);
    for (int j = 0; j < n; ++j) {
        double h = step * std::max(1.0, std::abs(point[j]));
        Vec hi = point, lo = point;
        hi[j] += h;
        lo[j] -= h;
        Vec fhi = map(hi);
        Vec flo = map(lo);
        if (!all_finite(fhi) || !all_finite(flo))
            throw ToolkitError(ErrorCode::NonFiniteEvaluation,
                               "map returned non-finite values at a probe point");
        for (int i = 0; i < n; ++i) J(i, j) = (fhi[i] - flo[i]) / (2.0 * h);
    }
    return J;
}

inline Mat jacobian_fd(const MapSystem& system, const Vec& point, double step = 1e-6) {
    return jacobian_fd(system.map, point, step);
}

// Jacobian of the map x -> h(x) implicitly defined by H(x, h(x)) = 0:
// Dh = -(D_eta H)^{-1} D_xi H, with both blocks taken by central differences
// at (point, point), i.e. at a fixed point of h.
inline Mat implicit_jacobian_fd(const ImplicitSystem& system, const Vec& point, double step = 1e-6) {
    const int n = system.dimension;
    Mat Dxi(n, n), Deta(n, n);
    for (int j = 0; j < n; ++j) {
        double h = step * std::max(1.0, std::abs(point[j]));
        Vec hi = point, lo = point;
        hi[j] += h;
        lo[j] -= h;
        Vec r1 = system.residual(hi, point);
        Vec r2 = system.residual(lo, point);
        Vec r3 = system.residual(point, hi);
        Vec r4 = system.residual(point, lo);
        if (!all_finite(r1) || !all_finite(r2) || !all_finite(r3) || !all_finite(r4))
            throw ToolkitError(ErrorCode::NonFiniteEvaluation,
                               "residual returned non-finite values at a probe point");
        for (int i = 0; i < n; ++i) {
            Dxi(i, j) = (r1[i] - r2[i]) / (2.0 * h);
            Deta(i, j) = (r3[i] - r4[i]) / (2.0 * h);
        }
    }
    Mat Dh(n, n);
    for (int j = 0; j < n; ++j) {
        Vec col(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) col[i] = Dxi(i, j);
        Vec x = solve_linear(Deta, col);
        for (int i = 0; i < n; ++i) Dh(i, j) = -x[i];
    }
    return Dh;
}

// Damped Newton iteration on h(x) - x = 0. On success the steady state is
// returned with Jacobian, eigenvalues and a determinacy verdict attached.
inline SteadyState find_fixed_point(const MapSystem& system, Vec guess, double tol = 1e-12,
                                    int max_iter = 100, double margin = 1e-8) {
    system.validate();
    if (!all_finite(guess)) throw ToolkitError(ErrorCode::NonFiniteEvaluation, "guess not finite");
    if (tol <= 0.0) throw ToolkitError(ErrorCode::PreconditionFailed, "tol must be positive");
    if (max_iter < 1) throw ToolkitError(ErrorCode::PreconditionFailed, "max_iter must be >= 1");

    auto residual = [&](const Vec& x) { return system.map(x) - x; };
    std::function<Mat(const Vec&)> jac;
    if (system.analytic_jacobian) {
        jac = [&](const Vec& x) {
            Mat J = system.analytic_jacobian(x);
            for (int i = 0; i < J.n; ++i) J(i, i) -= 1.0;
            return J;
        };
    }
    NewtonOptions opt;
    opt.tol = tol;
    opt.max_iter = max_iter;
    NewtonResult res = newton_solve(residual, jac, std::move(guess), opt);

    SteadyState ss;
    ss.point = res.x;
    ss.residual_norm = res.residual_norm;
    ss.jacobian = system.analytic_jacobian ? system.analytic_jacobian(ss.point)
                                           : jacobian_fd(system, ss.point);
    ss.eigenvalues = eigenvalues(ss.jacobian);
    ss.verdict = classify_determinacy(ss.eigenvalues, system.predetermined_count(), margin);
    return ss;
}

// Steady state of an implicit system from a known fixed point candidate:
// verifies H(x, x) = 0 and attaches the implicit-differentiation Jacobian.
inline SteadyState implicit_steady_state(const ImplicitSystem& system, const Vec& point,
                                         double margin = 1e-8, double fd_step = 1e-6) {
    SteadyState ss;
    ss.point = point;
    ss.residual_norm = inf_norm(system.residual(point, point));
    ss.jacobian = implicit_jacobian_fd(system, point, fd_step);
    ss.eigenvalues = eigenvalues(ss.jacobian);
    ss.verdict = classify_determinacy(ss.eigenvalues, system.predetermined_count(), margin);
    return ss;
}

}  // namespace bubblesolve::dynsys
