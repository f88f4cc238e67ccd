#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "bubblesolve/core/errors.hpp"

namespace bubblesolve::diag {

// Finite-horizon certification of the dividend-injection argument: when the
// limiting interest rate sits below the dividend growth rate, the present
// value of the dividend stream grows geometrically without bound, so no
// fundamental-value pricing of the asset is possible; G_d < G keeps the
// dividends asymptotically negligible. The certificate records the partial
// sums of D0 (G_d/R)^t at three horizons and checks their geometric growth
// signature rather than claiming anything symbolic.
struct NecessityCertificate {
    double R_limit = 0.0;
    double G_d = 0.0;
    double G = 0.0;
    double D0 = 0.0;
    std::array<int, 3> horizons{10, 100, 1000};
    std::array<double, 3> partial_sums{};    // saturate to +inf for extreme ratios
    std::array<double, 3> log10_sums{};      // overflow-free route
    bool eliminated = false;
    bool rate_below_dividend_growth = false;
    bool dividends_negligible = false;
    bool growth_factor_ok = true;  // eliminated certificates must out-grow the predicted factor
};

namespace detail {

// log10 of sum_{t=0}^{T} r^t, stable for any r > 0.
inline double log10_geometric_sum(double r, int T) {
    if (r == 1.0) return std::log10(static_cast<double>(T) + 1.0);
    double l10r = std::log10(r);
    if (r > 1.0) {
        // (r^{T+1} - 1)/(r - 1) = r^T * (1 - r^{-(T+1)})/(1 - 1/r)
        return T * l10r + std::log10((1.0 - std::pow(r, -(T + 1.0))) / (1.0 - 1.0 / r));
    }
    return std::log10((1.0 - std::pow(r, T + 1.0)) / (1.0 - r));
}

}  // namespace detail

inline NecessityCertificate certify_elimination(double R_limit, double G_d, double G, double D0,
                                                double factor_slack = 0.01) {
    if (!(D0 > 0.0))
        throw ToolkitError(ErrorCode::PreconditionFailed, "certification requires D0 > 0");
    if (!(R_limit > 0.0) || !(G_d > 0.0) || !(G > 0.0))
        throw ToolkitError(ErrorCode::PreconditionFailed, "rates must be positive");

    NecessityCertificate cert;
    cert.R_limit = R_limit;
    cert.G_d = G_d;
    cert.G = G;
    cert.D0 = D0;
    cert.rate_below_dividend_growth = R_limit < G_d;
    cert.dividends_negligible = G_d < G;
    cert.eliminated = cert.rate_below_dividend_growth && cert.dividends_negligible;

    double ratio = G_d / R_limit;
    for (std::size_t i = 0; i < cert.horizons.size(); ++i) {
        int T = cert.horizons[i];
        cert.log10_sums[i] = std::log10(D0) + detail::log10_geometric_sum(ratio, T);
        double sum = 0.0, term = D0;
        for (int t = 0; t <= T; ++t) {
            sum += term;
            term *= ratio;
            if (sum > 1e306) {
                sum = std::numeric_limits<double>::infinity();
                break;
            }
        }
        cert.partial_sums[i] = sum;
    }

    if (cert.eliminated) {
        // The last sum must exceed the first by at least the factor
        // (G_d/R)^(horizon gap), up to the declared slack. Checked in logs so
        // extreme ratios cannot overflow.
        double observed = cert.log10_sums[2] - cert.log10_sums[0];
        double predicted = (cert.horizons[2] - cert.horizons[0]) * std::log10(ratio);
        cert.growth_factor_ok = observed >= predicted + std::log10(1.0 - factor_slack);
    }
    return cert;
}

}  // namespace bubblesolve::diag
