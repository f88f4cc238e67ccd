#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "bubblesolve/core/errors.hpp"

namespace bubblesolve {

using Vec = std::vector<double>;

inline bool all_finite(const Vec& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

inline double inf_norm(const Vec& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline Vec operator-(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec operator+(const Vec& a, const Vec& b) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec operator*(double s, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Small dense row-major matrix. All systems in this library have dimension
// at most a handful, so no effort is spent on blocking or sparsity.
struct Mat {
    int n = 0;  // rows
    int m = 0;  // cols
    std::vector<double> a;

    Mat() = default;
    Mat(int rows, int cols) : n(rows), m(cols), a(static_cast<std::size_t>(rows) * cols, 0.0) {}
    Mat(std::initializer_list<std::initializer_list<double>> rows) {
        n = static_cast<int>(rows.size());
        m = n > 0 ? static_cast<int>(rows.begin()->size()) : 0;
        a.reserve(static_cast<std::size_t>(n) * m);
        for (const auto& r : rows)
            for (double x : r) a.push_back(x);
    }

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * m + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * m + j]; }

    static Mat identity(int k) {
        Mat I(k, k);
        for (int i = 0; i < k; ++i) I(i, i) = 1.0;
        return I;
    }
};

inline Vec matvec(const Mat& A, const Vec& x) {
    Vec y(static_cast<std::size_t>(A.n), 0.0);
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.m; ++j) y[i] += A(i, j) * x[j];
    return y;
}

inline Mat matmul(const Mat& A, const Mat& B) {
    Mat C(A.n, B.m);
    for (int i = 0; i < A.n; ++i)
        for (int k = 0; k < A.m; ++k) {
            double aik = A(i, k);
            for (int j = 0; j < B.m; ++j) C(i, j) += aik * B(k, j);
        }
    return C;
}

inline Mat transpose(const Mat& A) {
    Mat T(A.m, A.n);
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.m; ++j) T(j, i) = A(i, j);
    return T;
}

inline double max_abs_entry(const Mat& A) {
    double s = 0.0;
    for (double x : A.a) s = std::max(s, std::abs(x));
    return s;
}

// Solves A x = b by Gaussian elimination with partial pivoting.
// Throws SingularJacobian when a pivot falls below the singularity guard.
inline Vec solve_linear(Mat A, Vec b) {
    const int n = A.n;
    const double scale = std::max(max_abs_entry(A), 1e-300);
    const double tiny = 1e-14 * scale;
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[i] = i;

    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A(r, col)) > std::abs(A(piv, col))) piv = r;
        if (std::abs(A(piv, col)) < tiny)
            throw ToolkitError(ErrorCode::SingularJacobian, "pivot below tolerance in linear solve");
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(A(piv, j), A(col, j));
            std::swap(b[piv], b[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            double f = A(r, col) / A(col, col);
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j) A(r, j) -= f * A(col, j);
            b[r] -= f * b[col];
        }
    }
    Vec x(static_cast<std::size_t>(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = b[i];
        for (int j = i + 1; j < n; ++j) s -= A(i, j) * x[j];
        x[i] = s / A(i, i);
    }
    return x;
}

inline Mat invert(const Mat& A) {
    const int n = A.n;
    Mat inv(n, n);
    for (int j = 0; j < n; ++j) {
        Vec e(static_cast<std::size_t>(n), 0.0);
        e[j] = 1.0;
        Vec col = solve_linear(A, e);
        for (int i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return inv;
}

// Real eigenvector of A for a (simple, real) eigenvalue lambda, computed as
// a null vector of A - lambda I via elimination with full column fallback.
// The result is scaled to unit infinity norm.
inline Vec real_eigenvector(const Mat& A, double lambda) {
    const int n = A.n;
    Mat B = A;
    for (int i = 0; i < n; ++i) B(i, i) -= lambda;

    // Row-reduce; the last pivot column left without a pivot spans the kernel.
    std::vector<int> pivot_col(static_cast<std::size_t>(n), -1);
    int row = 0;
    const double tiny = 1e-10 * std::max(max_abs_entry(B), 1.0);
    for (int col = 0; col < n && row < n; ++col) {
        int piv = row;
        for (int r = row + 1; r < n; ++r)
            if (std::abs(B(r, col)) > std::abs(B(piv, col))) piv = r;
        if (std::abs(B(piv, col)) < tiny) continue;
        if (piv != row)
            for (int j = 0; j < n; ++j) std::swap(B(piv, j), B(row, j));
        for (int r = 0; r < n; ++r) {
            if (r == row) continue;
            double f = B(r, col) / B(row, col);
            if (f == 0.0) continue;
            for (int j = 0; j < n; ++j) B(r, j) -= f * B(row, j);
        }
        pivot_col[row] = col;
        ++row;
    }
    int free_col = -1;
    for (int col = 0; col < n; ++col) {
        bool is_pivot = false;
        for (int r = 0; r < row; ++r)
            if (pivot_col[r] == col) is_pivot = true;
        if (!is_pivot) {
            free_col = col;
            break;
        }
    }
    if (free_col < 0)
        throw ToolkitError(ErrorCode::SingularJacobian, "no kernel direction: eigenvalue not in spectrum?");
    Vec v(static_cast<std::size_t>(n), 0.0);
    v[free_col] = 1.0;
    for (int r = 0; r < row; ++r) {
        int pc = pivot_col[r];
        if (pc >= 0) v[pc] = -B(r, free_col) / B(r, pc);
    }
    double nv = inf_norm(v);
    for (double& x : v) x /= nv;
    return v;
}

}  // namespace bubblesolve
