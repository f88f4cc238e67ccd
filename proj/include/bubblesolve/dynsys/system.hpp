#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "bubblesolve/core/errors.hpp"
#include "bubblesolve/core/linalg.hpp"

namespace bubblesolve::dynsys {

// Autonomous map x' = h(x) with a declared set of predetermined coordinates
// (those pinned down by history rather than chosen by forward-looking agents).
struct MapSystem {
    int dimension = 0;
    std::function<Vec(const Vec&)> map;
    std::vector<int> predetermined;  // coordinate indices fixed at t = 0

    // Optional extras supplied by model adapters.
    std::function<Mat(const Vec&)> analytic_jacobian;
    std::function<Vec(const Vec&)> inverse;          // one-step inverse of h
    std::function<bool(const Vec&)> admissible;      // economic domain predicate
    std::pair<double, double> free_bracket{0.0, 0.0};  // shooting bracket for a single free coordinate
    bool predetermined_autonomous = false;  // predetermined block evolves independently of free coords

    [[nodiscard]] int predetermined_count() const { return static_cast<int>(predetermined.size()); }

    [[nodiscard]] std::vector<int> free_indices() const {
        std::vector<int> free;
        for (int i = 0; i < dimension; ++i) {
            bool pinned = false;
            for (int p : predetermined)
                if (p == i) pinned = true;
            if (!pinned) free.push_back(i);
        }
        return free;
    }

    [[nodiscard]] bool is_admissible(const Vec& x) const { return !admissible || admissible(x); }

    void validate() const {
        if (dimension <= 0) throw ToolkitError(ErrorCode::ShapeMismatch, "dimension must be positive");
        if (predetermined_count() > dimension)
            throw ToolkitError(ErrorCode::ShapeMismatch, "more predetermined coordinates than dimensions");
        for (int p : predetermined)
            if (p < 0 || p >= dimension)
                throw ToolkitError(ErrorCode::ShapeMismatch, "predetermined index out of range");
    }
};

// Implicit system H(x, x') = 0 of full rank in x', as produced by models whose
// forward map requires an inner solve.
struct ImplicitSystem {
    int dimension = 0;
    std::function<Vec(const Vec&, const Vec&)> residual;
    std::vector<int> predetermined;

    [[nodiscard]] int predetermined_count() const { return static_cast<int>(predetermined.size()); }
};

}  // namespace bubblesolve::dynsys
