#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "bubblesolve/core/errors.hpp"

namespace bubblesolve::models {

// Intensive-form technology f(y) = F(y, 1) with first and second derivatives.
struct ProductionSpec {
    std::function<double(double)> f;
    std::function<double(double)> fp;
    std::function<double(double)> fpp;
    std::string name;

    // Metadata for closed-form bounds where the functional form is known.
    bool is_cobb_douglas = false;
    double A = 0.0;
    double alpha = 0.0;
    double depreciation = 0.0;   // only meaningful when embedded via with_undepreciated_capital
    bool constant_elasticity = false;
    double elasticity = 0.0;     // elasticity of substitution between capital and labor
};

inline double wage(const ProductionSpec& prod, double y) { return prod.f(y) - y * prod.fp(y); }

// Elasticity of substitution evaluated pointwise from f, f', f'':
// 1/eps = -y f f'' / (f' (f - y f')).
inline double elasticity_at(const ProductionSpec& prod, double y) {
    if (prod.constant_elasticity) return prod.elasticity;
    double f = prod.f(y), fp = prod.fp(y), fpp = prod.fpp(y);
    double om = f - y * fp;
    double inv = -y * f * fpp / (fp * om);
    if (!(inv > 0.0))
        throw ToolkitError(ErrorCode::PreconditionFailed, "elasticity undefined at y");
    return 1.0 / inv;
}

inline ProductionSpec cobb_douglas(double A, double alpha) {
    if (!(A > 0.0) || !(alpha > 0.0) || !(alpha < 1.0))
        throw ToolkitError(ErrorCode::ConfigInvalid, "Cobb-Douglas requires A > 0 and alpha in (0,1)");
    ProductionSpec p;
    p.f = [=](double y) { return A * std::pow(y, alpha); };
    p.fp = [=](double y) { return A * alpha * std::pow(y, alpha - 1.0); };
    p.fpp = [=](double y) { return A * alpha * (alpha - 1.0) * std::pow(y, alpha - 2.0); };
    p.name = "cobb_douglas";
    p.is_cobb_douglas = true;
    p.A = A;
    p.alpha = alpha;
    p.constant_elasticity = true;
    p.elasticity = 1.0;
    return p;
}

// CES technology F(K, L) = A (theta K^rho + (1-theta) L^rho)^(1/rho) in
// intensive form, parametrized by the substitution elasticity eps = 1/(1-rho).
inline ProductionSpec ces(double A, double theta, double eps) {
    if (!(A > 0.0) || !(theta > 0.0) || !(theta < 1.0) || !(eps > 0.0) || eps == 1.0)
        throw ToolkitError(ErrorCode::ConfigInvalid,
                           "CES requires A > 0, theta in (0,1), eps > 0, eps != 1 (use cobb_douglas)");
    double rho = 1.0 - 1.0 / eps;
    ProductionSpec p;
    auto base = [=](double y) { return theta * std::pow(y, rho) + (1.0 - theta); };
    p.f = [=](double y) { return A * std::pow(base(y), 1.0 / rho); };
    p.fp = [=](double y) {
        return A * theta * std::pow(y, rho - 1.0) * std::pow(base(y), 1.0 / rho - 1.0);
    };
    p.fpp = [=](double y) {
        return -A * theta * (1.0 - theta) * (1.0 - rho) * std::pow(y, rho - 2.0) *
               std::pow(base(y), 1.0 / rho - 2.0);
    };
    p.name = "ces";
    p.constant_elasticity = true;
    p.elasticity = eps;
    return p;
}

// Total gross return form f(k) + (1-delta) k used by models in which
// undepreciated capital accrues to its owner alongside output.
inline ProductionSpec with_undepreciated_capital(ProductionSpec base, double delta) {
    if (!(delta >= 0.0) || !(delta <= 1.0))
        throw ToolkitError(ErrorCode::ConfigInvalid, "delta must lie in [0,1]");
    ProductionSpec p;
    auto f0 = base.f;
    auto fp0 = base.fp;
    p.f = [=](double y) { return f0(y) + (1.0 - delta) * y; };
    p.fp = [=](double y) { return fp0(y) + (1.0 - delta); };
    p.fpp = base.fpp;  // linear term has no curvature
    p.name = base.name + "+undepreciated";
    p.is_cobb_douglas = base.is_cobb_douglas;
    p.A = base.A;
    p.alpha = base.alpha;
    p.depreciation = delta;
    p.constant_elasticity = false;  // elasticity metadata refers to the plain technology
    return p;
}

}  // namespace bubblesolve::models
