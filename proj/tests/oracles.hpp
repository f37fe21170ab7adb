#pragma once

// Reference computations that share no code with the library: a uniform-grid
// finite-difference eigensolver, adaptive Simpson quadrature and closed forms
// of free hydrogen.

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

namespace detail {
inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double diff = left + right - whole;
    if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
    return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

/// Adaptive Simpson on [a, b], split into `pieces` to start.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12,
                        int pieces = 64) {
    double sum = 0.0;
    const double h = (b - a) / pieces;
    for (int i = 0; i < pieces; ++i) {
        const double lo = a + i * h, hi = lo + h, mid = 0.5 * (lo + hi);
        const double flo = f(lo), fmid = f(mid), fhi = f(hi);
        sum += detail::simpson_step(f, lo, hi, flo, fmid, fhi, h / 6.0 * (flo + 4.0 * fmid + fhi), tol / pieces,
                                    40);
    }
    return sum;
}

/// int_0^inf g(p) dp through p = tan t.
inline double integrate_half_line(const std::function<double(double)>& g, double tol = 1e-12) {
    return integrate(
        [&](double t) {
            if (t >= 0.5 * pi) return 0.0;
            const double c = std::cos(t);
            return g(std::tan(t)) / (c * c);
        },
        0.0, 0.5 * pi, tol);
}

/// Lowest-but-`index` eigenvalue of the uniform finite-difference radial
/// Hamiltonian with N intervals on (0, r_c), by Sturm-sequence bisection.
inline double fd_eigenvalue(int l, double r_c, int N, int index) {
    const double h = r_c / N;
    const int m = N - 1;
    std::vector<double> diag(m);
    for (int i = 0; i < m; ++i) {
        const double r = (i + 1) * h;
        diag[i] = 1.0 / (h * h) + l * (l + 1) / (2.0 * r * r) - 1.0 / r;
    }
    const double off = -0.5 / (h * h);
    auto count_below = [&](double x) {
        int count = 0;
        double q = diag[0] - x;
        if (q < 0) ++count;
        for (int i = 1; i < m; ++i) {
            if (q == 0.0) q = 1e-300;
            q = diag[i] - x - off * off / q;
            if (q < 0) ++count;
        }
        return count;
    };
    double lo = -10.0, hi = 10.0;
    while (count_below(hi) <= index) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (count_below(mid) > index ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

/// Richardson extrapolation of fd_eigenvalue over N, 2N, 4N (error ~ h^2, h^4).
inline double fd_eigenvalue_extrapolated(int l, double r_c, int N, int index) {
    const double e1 = fd_eigenvalue(l, r_c, N, index);
    const double e2 = fd_eigenvalue(l, r_c, 2 * N, index);
    const double e4 = fd_eigenvalue(l, r_c, 4 * N, index);
    const double a = (4.0 * e2 - e1) / 3.0;
    const double b = (4.0 * e4 - e2) / 3.0;
    return (16.0 * b - a) / 15.0;
}

/// Free hydrogen ground state: rho(r) = e^{-2r}/pi and Pi(p) = 8/(pi^2 (1+p^2)^4).
inline double free_1s_momentum_density(double p) { return 8.0 / (pi * pi * std::pow(1.0 + p * p, 4)); }

/// Free hydrogen 2p momentum radial function up to normalization.
inline double free_2p_momentum_shape(double p) { return p / std::pow(1.0 + 4.0 * p * p, 3); }

}  // namespace oracle
