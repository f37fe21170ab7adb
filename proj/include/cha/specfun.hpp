#pragma once

// Special functions and quadrature primitives.

#include <span>
#include <vector>

#include "cha/error.hpp"

namespace cha::specfun {

/// Quadrature rule on the reference interval [-1, 1].
struct QuadratureRule {
    std::vector<double> nodes;    // strictly increasing, symmetric about 0
    std::vector<double> weights;  // all positive
    int order = 0;
};

/// Raised when the 1F1 series exhausts its term budget; carries the arguments.
class KummerConvergenceError : public ConvergenceError {
public:
    KummerConvergenceError(double a, double b, double x);
    double a, b, x;
};

/// Kummer's confluent hypergeometric function 1F1(a; b; x) by the ascending
/// series with compensated summation. Terminates exactly when a is a
/// non-positive integer.
double kummer_1f1(double a, double b, double x);

/// Legendre polynomial P_l(u), |u| <= 1, by the three-term recurrence.
double legendre_p(int l, double u);

/// Legendre polynomial value and derivative at once (no domain check).
void legendre_p_and_derivative(int l, double u, double& p, double& dp);

/// Spherical Bessel function j_l(x) for l in 0..4 and x >= 0.
double sph_bessel_j(int l, double x);

/// Largest argument at which sph_bessel_j(l, .) still uses the power series.
double sph_bessel_series_crossover(int l);

/// Closed trigonometric form of j_l(x) from precomputed 1/x, sin x and cos x.
/// Only valid away from x = 0 (see sph_bessel_series_crossover).
inline double sph_bessel_j_trig(int l, double inv, double s, double c) {
    switch (l) {
    case 0:
        return s * inv;
    case 1:
        return (s * inv - c) * inv;
    case 2: {
        const double inv2 = inv * inv;
        return ((3.0 * inv2 - 1.0) * s - 3.0 * c * inv) * inv;
    }
    case 3: {
        const double inv2 = inv * inv;
        return ((15.0 * inv2 - 6.0) * s * inv - (15.0 * inv2 - 1.0) * c) * inv;
    }
    default: {
        const double inv2 = inv * inv;
        return ((105.0 * inv2 * inv2 - 45.0 * inv2 + 1.0) * s - (105.0 * inv2 - 10.0) * c * inv) * inv;
    }
    }
}

/// Gauss-Legendre rule with `order` nodes.
QuadratureRule gauss_legendre(int order);

/// Same as gauss_legendre but memoized; safe to call concurrently.
const QuadratureRule& cached_gauss_legendre(int order);

/// Gauss-Lobatto-Legendre rule with order+1 nodes, endpoints included.
QuadratureRule gauss_lobatto_legendre(int order);

/// Nodes and weights of a composite rule on a partition of the real line.
struct PanelGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    double integrate(std::span<const double> values) const;
};

/// Apply `rule` on every panel [edges[i], edges[i+1]].
PanelGrid composite_rule(std::span<const double> edges, const QuadratureRule& rule);

/// Partition of [a, b] into panels no wider than `max_width`, with every
/// entry of `breakpoints` (inside (a, b)) used as an edge and panels next to
/// each graded point shrunk geometrically (`levels` times by `ratio`).
std::vector<double> graded_edges(double a, double b, double max_width,
                                 std::span<const double> breakpoints,
                                 std::span<const double> graded_points,
                                 int levels = 10, double ratio = 0.25);

}  // namespace cha::specfun
