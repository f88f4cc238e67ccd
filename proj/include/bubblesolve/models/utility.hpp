#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "bubblesolve/core/errors.hpp"

namespace bubblesolve::models {

// Two-period preferences described through the marginal rate of substitution
// M(c1, c2) = U1/U2 and its partials. Strict quasi-concavity requires M1 < 0
// and M2 > 0 on the consumption domain.
struct UtilitySpec {
    std::function<double(double, double)> M;
    std::function<double(double, double)> M1;
    std::function<double(double, double)> M2;
    std::function<double(double, double)> utility;  // U(c1, c2), used for welfare comparisons
    std::string name;
    bool constant_eis = false;
    double eis = 0.0;
};

// Elasticity of intertemporal substitution at a consumption point, from the
// MRS: 1/eps = -c1 M1 / M along the first argument.
inline double eis_at(const UtilitySpec& u, double c1, double c2) {
    if (u.constant_eis) return u.eis;
    double sigma = -c1 * u.M1(c1, c2) / u.M(c1, c2);
    if (!(sigma > 0.0)) throw ToolkitError(ErrorCode::PreconditionFailed, "EIS undefined at (c1,c2)");
    return 1.0 / sigma;
}

inline UtilitySpec log_utility(double beta) {
    if (!(beta > 0.0)) throw ToolkitError(ErrorCode::ConfigInvalid, "beta must be positive");
    UtilitySpec u;
    u.M = [=](double c1, double c2) { return c2 / (beta * c1); };
    u.M1 = [=](double c1, double c2) { return -c2 / (beta * c1 * c1); };
    u.M2 = [=](double c1, double) { return 1.0 / (beta * c1); };
    u.utility = [=](double c1, double c2) { return std::log(c1) + beta * std::log(c2); };
    u.name = "log";
    u.constant_eis = true;
    u.eis = 1.0;
    return u;
}

// Additively separable CRRA preferences u(c1) + beta u(c2) with curvature
// sigma; the elasticity of intertemporal substitution is 1/sigma.
inline UtilitySpec crra(double beta, double sigma) {
    if (!(beta > 0.0) || !(sigma > 0.0))
        throw ToolkitError(ErrorCode::ConfigInvalid, "CRRA requires beta > 0 and sigma > 0");
    UtilitySpec u;
    u.M = [=](double c1, double c2) { return std::pow(c2 / c1, sigma) / beta; };
    u.M1 = [=](double c1, double c2) { return -sigma * std::pow(c2 / c1, sigma) / (beta * c1); };
    u.M2 = [=](double c1, double c2) { return sigma * std::pow(c2 / c1, sigma) / (beta * c2); };
    u.utility = [=](double c1, double c2) {
        if (sigma == 1.0) return std::log(c1) + beta * std::log(c2);
        return (std::pow(c1, 1.0 - sigma) + beta * std::pow(c2, 1.0 - sigma)) / (1.0 - sigma);
    };
    u.name = "crra";
    u.constant_eis = true;
    u.eis = 1.0 / sigma;
    return u;
}

}  // namespace bubblesolve::models
