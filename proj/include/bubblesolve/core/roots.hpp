#pragma once

#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "bubblesolve/core/errors.hpp"
#include "bubblesolve/core/linalg.hpp"

namespace bubblesolve {

struct BisectOptions {
    double xtol = 1e-12;   // absolute bracket width at which to stop
    double ftol = 0.0;     // optional early stop on |f|
    int max_iter = 200;
};

// Bisection on [lo, hi]; requires f(lo) and f(hi) of opposite (weak) sign.
template <class F>
double bisect(F&& f, double lo, double hi, BisectOptions opt = {}) {
    double flo = f(lo);
    double fhi = f(hi);
    if (!std::isfinite(flo) || !std::isfinite(fhi))
        throw ToolkitError(ErrorCode::NonFiniteEvaluation, "non-finite endpoint in bisection");
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw ToolkitError(ErrorCode::NoSignChange,
                           "no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < opt.max_iter; ++it) {
        mid = 0.5 * (lo + hi);
        double fm = f(mid);
        if (!std::isfinite(fm))
            throw ToolkitError(ErrorCode::NonFiniteEvaluation, "non-finite value in bisection");
        if (fm == 0.0 || (opt.ftol > 0.0 && std::abs(fm) <= opt.ftol)) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo <= opt.xtol) return 0.5 * (lo + hi);
    }
    return mid;
}

// Sign-change brackets of f on a uniform grid of n+1 points over [lo, hi].
// Exact zeros at grid points count as one change.
template <class F>
std::vector<std::pair<double, double>> scan_sign_changes(F&& f, double lo, double hi, int n) {
    std::vector<std::pair<double, double>> brackets;
    double x_prev = lo;
    double f_prev = f(lo);
    for (int i = 1; i <= n; ++i) {
        double x = lo + (hi - lo) * static_cast<double>(i) / n;
        double fx = f(x);
        if (std::isfinite(f_prev) && std::isfinite(fx) &&
            ((f_prev <= 0.0 && fx > 0.0) || (f_prev >= 0.0 && fx < 0.0) ||
             (f_prev > 0.0 && fx <= 0.0) || (f_prev < 0.0 && fx >= 0.0))) {
            if ((f_prev > 0.0) != (fx > 0.0) || f_prev == 0.0 || fx == 0.0)
                brackets.emplace_back(x_prev, x);
        }
        x_prev = x;
        f_prev = fx;
    }
    return brackets;
}

struct NewtonOptions {
    double tol = 1e-12;      // infinity-norm residual target
    int max_iter = 100;
    int max_halvings = 30;   // backtracking: halve the step until the residual decreases
    double fd_step = 1e-7;   // relative step for finite-difference Jacobians
};

struct NewtonResult {
    Vec x;
    double residual_norm = 0.0;
    int iterations = 0;
};

// Damped Newton iteration on a square residual F(x) = 0. `jac` may be empty,
// in which case a forward-difference Jacobian is used.
inline NewtonResult newton_solve(const std::function<Vec(const Vec&)>& residual,
                                 const std::function<Mat(const Vec&)>& jac, Vec x,
                                 NewtonOptions opt = {}) {
    const int n = static_cast<int>(x.size());
    auto fd_jacobian = [&](const Vec& p) {
        Mat J(n, n);
        Vec f0 = residual(p);
        for (int j = 0; j < n; ++j) {
            double h = opt.fd_step * std::max(1.0, std::abs(p[j]));
            Vec q = p;
            q[j] += h;
            Vec f1 = residual(q);
            for (int i = 0; i < n; ++i) J(i, j) = (f1[i] - f0[i]) / h;
        }
        return J;
    };

    Vec f = residual(x);
    if (!all_finite(f))
        throw ToolkitError(ErrorCode::NonFiniteEvaluation, "residual not finite at initial guess");
    double fnorm = inf_norm(f);
    for (int it = 1; it <= opt.max_iter; ++it) {
        if (fnorm <= opt.tol) return {x, fnorm, it - 1};
        Mat J = jac ? jac(x) : fd_jacobian(x);
        Vec step;
        try {
            step = solve_linear(J, f);
        } catch (const ToolkitError&) {
            throw ToolkitError(ErrorCode::SingularJacobian,
                               "Newton step undefined at x with residual " + std::to_string(fnorm));
        }
        double damping = 1.0;
        bool improved = false;
        for (int h = 0; h <= opt.max_halvings; ++h) {
            Vec trial = x - damping * step;
            Vec ft = residual(trial);
            if (all_finite(ft) && inf_norm(ft) < fnorm) {
                x = trial;
                f = ft;
                fnorm = inf_norm(f);
                improved = true;
                break;
            }
            damping *= 0.5;
        }
        if (!improved)
            throw ToolkitError(ErrorCode::NoConvergence,
                               "backtracking stalled at residual " + std::to_string(fnorm));
    }
    if (fnorm <= opt.tol) return {x, fnorm, opt.max_iter};
    throw ToolkitError(ErrorCode::NoConvergence,
                       "Newton did not reach tolerance; residual " + std::to_string(fnorm));
}

}  // namespace bubblesolve
