#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "bubblesolve/core/errors.hpp"
#include "bubblesolve/core/linalg.hpp"

namespace bubblesolve {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

// Roots of lambda^2 - (a+d) lambda + (ad - bc).
inline Spectrum eigenvalues_2x2(double a, double b, double c, double d) {
    double tr = a + d;
    double det = a * d - b * c;
    double disc = tr * tr - 4.0 * det;
    if (disc >= 0.0) {
        double s = std::sqrt(disc);
        return {Complex((tr + s) / 2.0, 0.0), Complex((tr - s) / 2.0, 0.0)};
    }
    double s = std::sqrt(-disc);
    return {Complex(tr / 2.0, s / 2.0), Complex(tr / 2.0, -s / 2.0)};
}

inline Spectrum eigenvalues_2x2(const Mat& A) {
    return eigenvalues_2x2(A(0, 0), A(0, 1), A(1, 0), A(1, 1));
}

namespace detail {

inline double sign_like(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

// Similarity scaling so that row and column norms are comparable.
inline void balance(std::vector<std::vector<double>>& a, int n) {
    const double radix = 2.0, sqrdx = radix * radix;
    bool done = false;
    while (!done) {
        done = true;
        for (int i = 1; i <= n; ++i) {
            double r = 0.0, c = 0.0;
            for (int j = 1; j <= n; ++j)
                if (j != i) {
                    c += std::abs(a[j][i]);
                    r += std::abs(a[i][j]);
                }
            if (c != 0.0 && r != 0.0) {
                double g = r / radix, f = 1.0, s = c + r;
                while (c < g) {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while (c > g) {
                    f /= radix;
                    c /= sqrdx;
                }
                if ((c + r) / f < 0.95 * s) {
                    done = false;
                    g = 1.0 / f;
                    for (int j = 1; j <= n; ++j) a[i][j] *= g;
                    for (int j = 1; j <= n; ++j) a[j][i] *= f;
                }
            }
        }
    }
}

// Reduction to upper Hessenberg form by stabilized elementary similarity.
inline void hessenberg(std::vector<std::vector<double>>& a, int n) {
    for (int m = 2; m < n; ++m) {
        double x = 0.0;
        int i = m;
        for (int j = m; j <= n; ++j) {
            if (std::abs(a[j][m - 1]) > std::abs(x)) {
                x = a[j][m - 1];
                i = j;
            }
        }
        if (i != m) {
            for (int j = m - 1; j <= n; ++j) std::swap(a[i][j], a[m][j]);
            for (int j = 1; j <= n; ++j) std::swap(a[j][i], a[j][m]);
        }
        if (x != 0.0) {
            for (i = m + 1; i <= n; ++i) {
                double y = a[i][m - 1];
                if (y != 0.0) {
                    y /= x;
                    a[i][m - 1] = 0.0;
                    for (int j = m; j <= n; ++j) a[i][j] -= y * a[m][j];
                    for (int j = 1; j <= n; ++j) a[j][m] += y * a[j][i];
                }
            }
        }
    }
    for (int r = 3; r <= n; ++r)
        for (int c = 1; c <= r - 2; ++c) a[r][c] = 0.0;
}

// Francis double-shift QR iteration on an upper Hessenberg matrix.
inline Spectrum hqr(std::vector<std::vector<double>>& a, int nn) {
    Spectrum out;
    out.reserve(static_cast<std::size_t>(nn));
    const double eps = 2.220446049250313e-16;
    double anorm = 0.0;
    for (int i = 1; i <= nn; ++i)
        for (int j = std::max(i - 1, 1); j <= nn; ++j) anorm += std::abs(a[i][j]);
    if (anorm == 0.0) {
        for (int i = 0; i < nn; ++i) out.emplace_back(0.0, 0.0);
        return out;
    }
    int n = nn;
    double t = 0.0;
    while (n >= 1) {
        int its = 0;
        int l;
        do {
            for (l = n; l >= 2; --l) {
                double s = std::abs(a[l - 1][l - 1]) + std::abs(a[l][l]);
                if (s == 0.0) s = anorm;
                if (std::abs(a[l][l - 1]) <= eps * s) {
                    a[l][l - 1] = 0.0;
                    break;
                }
            }
            double x = a[n][n];
            if (l == n) {
                out.emplace_back(x + t, 0.0);
                --n;
            } else {
                double y = a[n - 1][n - 1];
                double w = a[n][n - 1] * a[n - 1][n];
                if (l == n - 1) {
                    double p = 0.5 * (y - x);
                    double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign_like(z, p);
                        out.emplace_back(x + z, 0.0);
                        out.emplace_back(z != 0.0 ? x - w / z : x + z, 0.0);
                    } else {
                        out.emplace_back(x + p, z);
                        out.emplace_back(x + p, -z);
                    }
                    n -= 2;
                } else {
                    if (its == 30)
                        throw ToolkitError(ErrorCode::NoConvergence, "QR iteration exceeded 30 sweeps");
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0, s = 0.0;
                    if (its == 10 || its == 20) {
                        t += x;
                        for (int i = 1; i <= n; ++i) a[i][i] -= x;
                        s = std::abs(a[n][n - 1]) + std::abs(a[n - 1][n - 2]);
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    for (m = n - 2; m >= l; --m) {
                        z = a[m][m];
                        double rr = x - z;
                        double ss = y - z;
                        p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - rr - ss;
                        r = a[m + 2][m + 1];
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        double u = std::abs(a[m][m - 1]) * (std::abs(q) + std::abs(r));
                        double v = std::abs(p) *
                                   (std::abs(a[m - 1][m - 1]) + std::abs(z) + std::abs(a[m + 1][m + 1]));
                        if (u <= eps * v) break;
                    }
                    for (int i = m + 2; i <= n; ++i) {
                        a[i][i - 2] = 0.0;
                        if (i != m + 2) a[i][i - 3] = 0.0;
                    }
                    for (int k = m; k <= n - 1; ++k) {
                        if (k != m) {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = (k != n - 1) ? a[k + 2][k - 1] : 0.0;
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        double s2 = sign_like(std::sqrt(p * p + q * q + r * r), p);
                        if (s2 == 0.0) continue;
                        if (k == m) {
                            if (l != m) a[k][k - 1] = -a[k][k - 1];
                        } else {
                            a[k][k - 1] = -s2 * x;
                        }
                        p += s2;
                        x = p / s2;
                        y = q / s2;
                        z = r / s2;
                        q /= p;
                        r /= p;
                        for (int j = k; j <= n; ++j) {
                            double pp = a[k][j] + q * a[k + 1][j];
                            if (k != n - 1) {
                                pp += r * a[k + 2][j];
                                a[k + 2][j] -= pp * z;
                            }
                            a[k + 1][j] -= pp * y;
                            a[k][j] -= pp * x;
                        }
                        int mmin = n < k + 3 ? n : k + 3;
                        for (int i = l; i <= mmin; ++i) {
                            double pp = x * a[i][k] + y * a[i][k + 1];
                            if (k != n - 1) {
                                pp += z * a[i][k + 2];
                                a[i][k + 2] -= pp * r;
                            }
                            a[i][k + 1] -= pp * q;
                            a[i][k] -= pp;
                        }
                    }
                }
            }
        } while (l < n - 1);
    }
    return out;
}

}  // namespace detail

// General eigenvalue solver (eigenvalues only) for real dense matrices.
inline Spectrum eigenvalues_qr(const Mat& A) {
    if (A.n != A.m) throw ToolkitError(ErrorCode::ShapeMismatch, "eigenvalues of non-square matrix");
    const int n = A.n;
    if (n == 0) return {};
    if (n == 1) return {Complex(A(0, 0), 0.0)};
    std::vector<std::vector<double>> a(static_cast<std::size_t>(n + 1),
                                       std::vector<double>(static_cast<std::size_t>(n + 1), 0.0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a[i + 1][j + 1] = A(i, j);
    detail::balance(a, n);
    detail::hessenberg(a, n);
    Spectrum s = detail::hqr(a, n);
    // Consistent ordering for deterministic reports: descending modulus, then real part.
    std::sort(s.begin(), s.end(), [](const Complex& x, const Complex& y) {
        double ax = std::abs(x), ay = std::abs(y);
        if (ax != ay) return ax > ay;
        if (x.real() != y.real()) return x.real() > y.real();
        return x.imag() > y.imag();
    });
    return s;
}

// Eigenvalues with closed forms for the 1x1 and 2x2 cases and for 3x3
// matrices with an exact block-triangular zero pattern (the shape every
// model Jacobian in this library takes); QR otherwise.
inline Spectrum eigenvalues(const Mat& A) {
    if (A.n != A.m) throw ToolkitError(ErrorCode::ShapeMismatch, "eigenvalues of non-square matrix");
    const int n = A.n;
    if (n == 0) return {};
    if (n == 1) return {Complex(A(0, 0), 0.0)};
    if (n == 2) return eigenvalues_2x2(A);
    if (n == 3) {
        auto combine = [](Spectrum two, double one) {
            two.emplace_back(one, 0.0);
            return two;
        };
        if (A(2, 0) == 0.0 && A(2, 1) == 0.0)
            return combine(eigenvalues_2x2(A(0, 0), A(0, 1), A(1, 0), A(1, 1)), A(2, 2));
        if (A(0, 1) == 0.0 && A(0, 2) == 0.0)
            return combine(eigenvalues_2x2(A(1, 1), A(1, 2), A(2, 1), A(2, 2)), A(0, 0));
        if (A(1, 0) == 0.0 && A(2, 0) == 0.0)
            return combine(eigenvalues_2x2(A(1, 1), A(1, 2), A(2, 1), A(2, 2)), A(0, 0));
        if (A(0, 2) == 0.0 && A(1, 2) == 0.0)
            return combine(eigenvalues_2x2(A(0, 0), A(0, 1), A(1, 0), A(1, 1)), A(2, 2));
    }
    return eigenvalues_qr(A);
}

}  // namespace bubblesolve
