#pragma once

#include <complex>
#include <string>
#include <vector>

#include "bubblesolve/core/eigen.hpp"

namespace bubblesolve::dynsys {

enum class Classification {
    LocallyDeterminate,  // stable count equals predetermined count
    Indeterminate,       // more stable roots than predetermined coordinates
    NoConvergentPath,    // fewer stable roots than predetermined coordinates
    NonHyperbolic,       // an eigenvalue within the margin of the unit circle
};

constexpr const char* to_string(Classification c) noexcept {
    switch (c) {
        case Classification::LocallyDeterminate: return "LocallyDeterminate";
        case Classification::Indeterminate: return "Indeterminate";
        case Classification::NoConvergentPath: return "NoConvergentPath";
        case Classification::NonHyperbolic: return "NonHyperbolic";
    }
    return "Unknown";
}

struct DeterminacyVerdict {
    int stable_count = 0;
    int unstable_count = 0;
    int on_circle_count = 0;
    int predetermined_count = 0;
    double margin = 1e-8;
    Classification classification = Classification::NonHyperbolic;
};

// Counts eigenvalue moduli against the unit circle with a hyperbolicity
// margin: |lambda| within `margin` of 1 is reported NonHyperbolic rather
// than silently classified.
inline DeterminacyVerdict classify_determinacy(const Spectrum& eigenvalues, int predetermined_count,
                                               double margin = 1e-8) {
    DeterminacyVerdict v;
    v.predetermined_count = predetermined_count;
    v.margin = margin;
    for (const Complex& lambda : eigenvalues) {
        double r = std::abs(lambda);
        if (r < 1.0 - margin)
            ++v.stable_count;
        else if (r > 1.0 + margin)
            ++v.unstable_count;
        else
            ++v.on_circle_count;
    }
    if (v.on_circle_count > 0)
        v.classification = Classification::NonHyperbolic;
    else if (v.stable_count == predetermined_count)
        v.classification = Classification::LocallyDeterminate;
    else if (v.stable_count > predetermined_count)
        v.classification = Classification::Indeterminate;
    else
        v.classification = Classification::NoConvergentPath;
    return v;
}

// Overload matching the steady-state object produced by the solvers.
template <class SteadyStateLike>
DeterminacyVerdict classify_determinacy(const SteadyStateLike& state, int predetermined_count,
                                        double margin)
    requires requires(const SteadyStateLike& s) { s.eigenvalues; }
{
    return classify_determinacy(state.eigenvalues, predetermined_count, margin);
}

}  // namespace bubblesolve::dynsys
