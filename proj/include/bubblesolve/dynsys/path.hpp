#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "bubblesolve/core/eigen.hpp"
#include "bubblesolve/core/linalg.hpp"
#include "bubblesolve/core/roots.hpp"
#include "bubblesolve/dynsys/steady.hpp"
#include "bubblesolve/dynsys/system.hpp"

namespace bubblesolve::dynsys {

struct EquilibriumPath {
    std::vector<Vec> states;          // states[t], t = 0..horizon
    double max_step_residual = 0.0;   // max_t ||h(x_t) - x_{t+1}||_inf over the returned path
    double terminal_deviation = 0.0;  // ||x_horizon - target||_inf
    int stabilized_from = -1;         // first index where manifold projection engaged; -1 = raw orbit
    // shooting diagnostics
    double selected_free_value = std::numeric_limits<double>::quiet_NaN();
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int sign_changes_found = -1;

    [[nodiscard]] int horizon() const { return static_cast<int>(states.size()) - 1; }
};

// Path of length steps+1 ending at `terminal`, built by repeated application
// of a caller-supplied one-step inverse. When the forward map is passed, the
// per-step forward residual is recorded.
inline EquilibriumPath backward_iterate(const std::function<Vec(const Vec&)>& inverse,
                                        const Vec& terminal, int steps,
                                        const std::function<Vec(const Vec&)>& forward_map = {}) {
    EquilibriumPath path;
    path.states.assign(static_cast<std::size_t>(steps) + 1, Vec{});
    path.states[static_cast<std::size_t>(steps)] = terminal;
    for (int k = steps - 1; k >= 0; --k)
        path.states[static_cast<std::size_t>(k)] = inverse(path.states[static_cast<std::size_t>(k) + 1]);
    if (forward_map) {
        for (int k = 0; k < steps; ++k) {
            Vec fwd = forward_map(path.states[static_cast<std::size_t>(k)]);
            path.max_step_residual =
                std::max(path.max_step_residual, inf_norm(fwd - path.states[static_cast<std::size_t>(k) + 1]));
        }
    }
    return path;
}

namespace detail {

struct SaddleFrame {
    double lambda_u = 0.0;  // the single real unstable eigenvalue
    Vec left;               // left eigenvector of the unstable root (measures the unstable component)
    Vec right;              // right eigenvector (direction of divergence)
    double lr = 0.0;        // <left, right> normalizer
};

inline SaddleFrame saddle_frame(const SteadyState& target, double margin) {
    SaddleFrame fr;
    int unstable = 0;
    for (const Complex& ev : target.eigenvalues) {
        if (std::abs(ev) > 1.0 + margin) {
            ++unstable;
            fr.lambda_u = ev.real();
            if (std::abs(ev.imag()) > 1e-12 * std::max(1.0, std::abs(ev.real())))
                throw ToolkitError(ErrorCode::ShootingFailed, "unstable eigenvalue is complex");
        }
    }
    if (unstable != 1)
        throw ToolkitError(ErrorCode::ShootingFailed,
                           "shooting requires exactly one unstable eigenvalue, found " +
                               std::to_string(unstable));
    fr.right = real_eigenvector(target.jacobian, fr.lambda_u);
    fr.left = real_eigenvector(transpose(target.jacobian), fr.lambda_u);
    fr.lr = dot(fr.left, fr.right);
    if (std::abs(fr.lr) < 1e-12)
        throw ToolkitError(ErrorCode::ShootingFailed, "degenerate eigenvector frame");
    return fr;
}

inline Vec assemble_initial(const MapSystem& system, const Vec& initial_predetermined,
                            double free_value, int free_index) {
    Vec x0(static_cast<std::size_t>(system.dimension), 0.0);
    for (std::size_t k = 0; k < system.predetermined.size(); ++k)
        x0[static_cast<std::size_t>(system.predetermined[k])] = initial_predetermined[k];
    if (free_index >= 0) x0[static_cast<std::size_t>(free_index)] = free_value;
    return x0;
}

}  // namespace detail

// Signed deviation along the unstable direction after iterating the map for
// up to `t_cap` steps from the initial state assembled from the given
// predetermined coordinates and a trial value of the single free coordinate.
// Inadmissible or non-finite excursions terminate the orbit early; the sign
// of the measure at exit is what bisection needs.
inline std::function<double(double)> saddle_shooting_function(const MapSystem& system,
                                                              const Vec& initial_predetermined,
                                                              const SteadyState& target, int t_cap) {
    auto free = system.free_indices();
    if (free.size() != 1)
        throw ToolkitError(ErrorCode::ShootingFailed, "shooting requires exactly one free coordinate");
    int free_index = free[0];
    auto frame = detail::saddle_frame(target, target.verdict.margin);
    double blow_up = 1e6 * std::max(1.0, inf_norm(target.point));
    return [=, &system](double x) {
        Vec state = detail::assemble_initial(system, initial_predetermined, x, free_index);
        double measure = dot(frame.left, state - target.point);
        for (int t = 0; t < t_cap; ++t) {
            if (!system.is_admissible(state)) break;
            Vec next;
            try {
                next = system.map(state);
            } catch (const ToolkitError&) {
                break;  // trial left the domain where the model can clear markets
            }
            if (!all_finite(next) || inf_norm(next) > blow_up) break;
            state = next;
            measure = dot(frame.left, state - target.point);
        }
        return measure;
    };
}

inline int count_sign_changes(const std::function<double(double)>& f, double lo, double hi, int n) {
    int changes = 0;
    double prev = f(lo);
    for (int i = 1; i <= n; ++i) {
        double x = lo + (hi - lo) * static_cast<double>(i) / n;
        double cur = f(x);
        if ((prev > 0.0 && cur <= 0.0) || (prev <= 0.0 && cur > 0.0)) ++changes;
        prev = cur;
    }
    return changes;
}

struct SaddlePathOptions {
    int scan_points = 512;       // coarse scan resolution over the shooting bracket
    int shoot_cap = 400;         // max internal horizon for the shooting functional
    double stabilize_radius = 1e-5;  // engage manifold projection inside this ball (scaled)
};

// Unique path converging to a locally determinate steady state, selected by
// shooting on the free initial coordinate. Once the orbit enters a small
// neighborhood of the target, the unstable component (round-off and curvature
// re-excitation) is projected out each step; the removed magnitude is the
// reported per-step residual. Up to the stabilization index the returned path
// is the exact forward orbit of its own initial state.
inline EquilibriumPath solve_saddle_path(const MapSystem& system, const Vec& initial_predetermined,
                                         const SteadyState& target, int horizon, double tol,
                                         SaddlePathOptions opt = {}) {
    system.validate();
    if (target.verdict.classification != Classification::LocallyDeterminate)
        throw ToolkitError(ErrorCode::NotDeterminate, "target steady state is not locally determinate");
    if (horizon < 1) throw ToolkitError(ErrorCode::PreconditionFailed, "horizon must be >= 1");
    if (static_cast<int>(initial_predetermined.size()) != system.predetermined_count())
        throw ToolkitError(ErrorCode::ShapeMismatch, "predetermined sub-vector has wrong length");

    auto free = system.free_indices();
    EquilibriumPath path;

    Vec x0;
    if (free.empty()) {
        // Fully predetermined initial state: the unique candidate path is the
        // forward orbit itself.
        x0 = detail::assemble_initial(system, initial_predetermined, 0.0, -1);
    } else if (free.size() == 1) {
        double lo = system.free_bracket.first;
        double hi = system.free_bracket.second;
        if (!(hi > lo))
            throw ToolkitError(ErrorCode::ShootingFailed, "system does not declare a shooting bracket");
        int t_cap = std::min(horizon, opt.shoot_cap);
        auto S = saddle_shooting_function(system, initial_predetermined, target, t_cap);
        path.bracket_lo = lo;
        path.bracket_hi = hi;

        // Coarse scan, then bisect the first bracket to machine width.
        double width = hi - lo;
        double inset = 1e-9 * width;
        auto brackets = scan_sign_changes(S, lo + inset, hi - inset, opt.scan_points);
        path.sign_changes_found = static_cast<int>(brackets.size());
        if (brackets.empty()) {
            throw ToolkitError(ErrorCode::ShootingFailed,
                               "no sign change on bracket [" + std::to_string(lo) + ", " +
                                   std::to_string(hi) + "]; S(lo)=" + std::to_string(S(lo + inset)) +
                                   " S(hi)=" + std::to_string(S(hi - inset)));
        }
        double a = brackets.front().first, b = brackets.front().second;
        double fa = S(a);
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (a + b);
            if (mid <= a || mid >= b) break;  // bracket at machine resolution
            double fm = S(mid);
            if (fm == 0.0) {
                a = b = mid;
                break;
            }
            if ((fm > 0.0) == (fa > 0.0)) {
                a = mid;
                fa = fm;
            } else {
                b = mid;
            }
        }
        double x_sel = 0.5 * (a + b);
        path.selected_free_value = x_sel;
        x0 = detail::assemble_initial(system, initial_predetermined, x_sel, free[0]);
    } else {
        throw ToolkitError(ErrorCode::ShootingFailed,
                           "shooting with more than one free coordinate is not supported");
    }

    if (free.size() == 1 && system.dimension == 2 && system.inverse &&
        system.predetermined_autonomous) {
        // Backward construction along the stable manifold: iterate forward to
        // record the (autonomous, hence exact) predetermined block, anchor the
        // free coordinate at the horizon on the linearized stable manifold,
        // then solve the map backwards. Backward steps contract errors by the
        // unstable root, so every step of the result satisfies the map to
        // round-off even at horizons where a forward shot would have diverged.
        int free_index = free[0];
        std::vector<Vec> fwd(static_cast<std::size_t>(horizon) + 1);
        fwd[0] = x0;
        for (int t = 0; t < horizon; ++t) fwd[static_cast<std::size_t>(t) + 1] = system.map(fwd[static_cast<std::size_t>(t)]);

        // Stable direction with a nonzero predetermined component ties the
        // terminal free coordinate to the terminal predetermined state.
        double lambda_s = 0.0;
        for (const Complex& ev : target.eigenvalues)
            if (std::abs(ev) < 1.0 - target.verdict.margin) lambda_s = ev.real();
        Vec r_s = real_eigenvector(target.jacobian, lambda_s);
        int pd = system.predetermined[0];
        Vec terminal = target.point;
        for (int p : system.predetermined)
            terminal[static_cast<std::size_t>(p)] = fwd[static_cast<std::size_t>(horizon)][static_cast<std::size_t>(p)];
        if (std::abs(r_s[static_cast<std::size_t>(pd)]) > 1e-12) {
            double slope = r_s[static_cast<std::size_t>(free_index)] / r_s[static_cast<std::size_t>(pd)];
            terminal[static_cast<std::size_t>(free_index)] =
                target.point[static_cast<std::size_t>(free_index)] +
                slope * (terminal[static_cast<std::size_t>(pd)] - target.point[static_cast<std::size_t>(pd)]);
        }

        path.states.assign(static_cast<std::size_t>(horizon) + 1, Vec{});
        path.states[static_cast<std::size_t>(horizon)] = terminal;
        for (int t = horizon - 1; t >= 0; --t) {
            Vec prev = system.inverse(path.states[static_cast<std::size_t>(t) + 1]);
            for (int p : system.predetermined)
                prev[static_cast<std::size_t>(p)] = fwd[static_cast<std::size_t>(t)][static_cast<std::size_t>(p)];
            path.states[static_cast<std::size_t>(t)] = prev;
        }
        path.stabilized_from = 0;
        path.selected_free_value = path.states[0][static_cast<std::size_t>(free_index)];
        for (int t = 0; t < horizon; ++t) {
            Vec step = system.map(path.states[static_cast<std::size_t>(t)]);
            path.max_step_residual = std::max(
                path.max_step_residual, inf_norm(step - path.states[static_cast<std::size_t>(t) + 1]));
        }
        path.terminal_deviation = inf_norm(path.states[static_cast<std::size_t>(horizon)] - target.point);
        if (path.terminal_deviation > tol)
            throw ToolkitError(ErrorCode::NoConvergence,
                               "terminal deviation " + std::to_string(path.terminal_deviation) +
                                   " exceeds tol at horizon " + std::to_string(horizon));
        return path;
    }

    // Forward orbit with manifold projection near the target.
    bool can_project = false;
    detail::SaddleFrame frame;
    if (!free.empty()) {
        frame = detail::saddle_frame(target, target.verdict.margin);
        can_project = true;
    }
    double scale = std::max(1.0, inf_norm(target.point));
    double r_on = opt.stabilize_radius * scale;

    path.states.reserve(static_cast<std::size_t>(horizon) + 1);
    path.states.push_back(x0);
    bool projecting = false;
    Vec x = x0;
    for (int t = 0; t < horizon; ++t) {
        Vec next = system.map(x);
        if (!all_finite(next))
            throw ToolkitError(ErrorCode::NoConvergence,
                               "orbit left the admissible region at t=" + std::to_string(t + 1));
        if (can_project && !projecting && inf_norm(x - target.point) <= r_on) projecting = true;
        if (projecting) {
            if (path.stabilized_from < 0) path.stabilized_from = t + 1;
            double c = dot(frame.left, next - target.point) / frame.lr;
            for (std::size_t i = 0; i < next.size(); ++i) next[i] -= c * frame.right[i];
            path.max_step_residual = std::max(path.max_step_residual, std::abs(c));
        }
        path.states.push_back(next);
        x = next;
    }
    path.terminal_deviation = inf_norm(x - target.point);
    if (path.terminal_deviation > tol)
        throw ToolkitError(ErrorCode::NoConvergence,
                           "terminal deviation " + std::to_string(path.terminal_deviation) +
                               " exceeds tol at horizon " + std::to_string(horizon));
    return path;
}

}  // namespace bubblesolve::dynsys
