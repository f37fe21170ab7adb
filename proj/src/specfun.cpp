#include "cha/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

namespace cha::specfun {

namespace {

constexpr int kKummerMaxTerms = 5000;

bool is_nonpositive_integer(double v) {
    return v <= 0.0 && v == std::floor(v);
}

// Neumaier's variant of Kahan summation.
struct CompensatedSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + carry; }
};

double kummer_series(double a, double b, double x) {
    CompensatedSum acc;
    double term = 1.0;
    acc.add(term);
    for (int k = 0; k < kKummerMaxTerms; ++k) {
        term *= (a + k) / (b + k) * x / (k + 1);
        if (term == 0.0) return acc.value();  // terminating polynomial
        acc.add(term);
        // Terms only shrink monotonically once k exceeds |x| and |a|.
        const bool past_peak = k + 1 > std::abs(x) + std::abs(a);
        if (past_peak && std::abs(term) <= 1e-17 * std::abs(acc.value())) {
            return acc.value();
        }
    }
    throw KummerConvergenceError(a, b, x);
}

}  // namespace

KummerConvergenceError::KummerConvergenceError(double a_, double b_, double x_)
    : ConvergenceError([&] {
          std::ostringstream os;
          os.precision(17);
          os << "1F1 series did not converge within " << kKummerMaxTerms
             << " terms for a=" << a_ << ", b=" << b_ << ", x=" << x_;
          return os.str();
      }()),
      a(a_), b(b_), x(x_) {}

double kummer_1f1(double a, double b, double x) {
    if (is_nonpositive_integer(b)) {
        throw DomainError("kummer_1f1: b must not be a non-positive integer");
    }
    if (x == 0.0 || a == 0.0) return 1.0;
    // Kummer's transformation keeps the series free of cancellation for
    // large negative arguments unless a itself terminates the series.
    if (x < -1.0 && !is_nonpositive_integer(a)) {
        return std::exp(x) * kummer_series(b - a, b, -x);
    }
    return kummer_series(a, b, x);
}

void legendre_p_and_derivative(int l, double u, double& p, double& dp) {
    double p_prev = 1.0;
    double p_curr = u;
    if (l == 0) {
        p = 1.0;
        dp = 0.0;
        return;
    }
    for (int k = 1; k < l; ++k) {
        const double p_next = ((2 * k + 1) * u * p_curr - k * p_prev) / (k + 1);
        p_prev = p_curr;
        p_curr = p_next;
    }
    p = p_curr;
    if (std::abs(u) == 1.0) {
        const double sign = (u > 0.0 || l % 2 == 1) ? 1.0 : -1.0;
        dp = sign * 0.5 * l * (l + 1);
    } else {
        dp = l * (u * p_curr - p_prev) / (u * u - 1.0);
    }
}

double legendre_p(int l, double u) {
    if (l < 0) throw DomainError("legendre_p: l must be non-negative");
    if (!(std::abs(u) <= 1.0)) throw DomainError("legendre_p: |u| must not exceed 1");
    double p, dp;
    legendre_p_and_derivative(l, u, p, dp);
    return p;
}

double sph_bessel_series_crossover(int l) {
    static constexpr double crossover[] = {0.5, 0.5, 1.0, 1.5, 2.0};
    if (l < 0 || l > 4) throw DomainError("sph_bessel_j: order must lie in 0..4");
    return crossover[l];
}

double sph_bessel_j(int l, double x) {
    const double crossover = sph_bessel_series_crossover(l);
    if (x < 0.0) throw DomainError("sph_bessel_j: argument must be non-negative");

    if (x < crossover) {
        // x^l / (2l+1)!! * sum_k (-x^2/2)^k / (k! (2l+3)(2l+5)...(2l+2k+1))
        double prefactor = 1.0;
        for (int k = 1; k <= l; ++k) prefactor *= x / (2 * k + 1);
        const double half_x2 = -0.5 * x * x;
        double term = 1.0;
        double sum = 1.0;
        for (int k = 0; k < 40; ++k) {
            term *= half_x2 / ((k + 1) * (2 * l + 2 * k + 3));
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return prefactor * sum;
    }

    return sph_bessel_j_trig(l, 1.0 / x, std::sin(x), std::cos(x));
}

QuadratureRule gauss_legendre(int order) {
    if (order < 1) throw DomainError("gauss_legendre: order must be positive");
    QuadratureRule rule;
    rule.order = order;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        // Chebyshev-like initial guess for the i-th largest root.
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double p = 0.0, dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            legendre_p_and_derivative(order, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) <= 1e-15) break;
        }
        legendre_p_and_derivative(order, x, p, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[order - 1 - i] = x;
        rule.nodes[i] = -x;
        rule.weights[order - 1 - i] = w;
        rule.weights[i] = w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

const QuadratureRule& cached_gauss_legendre(int order) {
    static std::mutex mutex;
    static std::map<int, std::unique_ptr<const QuadratureRule>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[order];
    if (!slot) slot = std::make_unique<const QuadratureRule>(gauss_legendre(order));
    return *slot;
}

QuadratureRule gauss_lobatto_legendre(int order) {
    if (order < 1) throw DomainError("gauss_lobatto_legendre: order must be positive");
    const int n = order;
    QuadratureRule rule;
    rule.order = n;
    rule.nodes.resize(n + 1);
    rule.weights.resize(n + 1);
    for (int i = 0; i <= n / 2; ++i) {
        double x = std::cos(std::numbers::pi * i / n);
        double pn = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p_prev = 1.0, p_curr = x;
            for (int k = 1; k < n; ++k) {
                const double p_next = ((2 * k + 1) * x * p_curr - k * p_prev) / (k + 1);
                p_prev = p_curr;
                p_curr = p_next;
            }
            if (n == 1) p_prev = 1.0;
            pn = p_curr;
            const double dx = (i == 0) ? 0.0 : (x * pn - p_prev) / ((n + 1) * pn);
            x -= dx;
            if (std::abs(dx) <= 1e-16) break;
        }
        double p, dp;
        legendre_p_and_derivative(n, x, p, dp);
        const double w = 2.0 / (n * (n + 1) * p * p);
        rule.nodes[n - i] = x;
        rule.nodes[i] = -x;
        rule.weights[n - i] = w;
        rule.weights[i] = w;
    }
    if (n % 2 == 0) rule.nodes[n / 2] = 0.0;
    return rule;
}

double PanelGrid::integrate(std::span<const double> values) const {
    CompensatedSum acc;
    for (std::size_t i = 0; i < weights.size(); ++i) acc.add(weights[i] * values[i]);
    return acc.value();
}

PanelGrid composite_rule(std::span<const double> edges, const QuadratureRule& rule) {
    PanelGrid grid;
    if (edges.size() < 2) return grid;
    const std::size_t panels = edges.size() - 1;
    grid.nodes.reserve(panels * rule.nodes.size());
    grid.weights.reserve(panels * rule.nodes.size());
    for (std::size_t i = 0; i < panels; ++i) {
        const double mid = 0.5 * (edges[i] + edges[i + 1]);
        const double half = 0.5 * (edges[i + 1] - edges[i]);
        for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
            grid.nodes.push_back(mid + half * rule.nodes[k]);
            grid.weights.push_back(half * rule.weights[k]);
        }
    }
    return grid;
}

std::vector<double> graded_edges(double a, double b, double max_width,
                                 std::span<const double> breakpoints,
                                 std::span<const double> graded_points,
                                 int levels, double ratio) {
    if (!(b > a)) throw DomainError("graded_edges: empty interval");
    if (!(max_width > 0.0)) throw DomainError("graded_edges: max_width must be positive");
    const double eps = 1e-13 * (b - a);

    std::vector<double> coarse{a, b};
    for (double p : breakpoints) {
        if (p > a + eps && p < b - eps) coarse.push_back(p);
    }
    for (double p : graded_points) {
        if (p > a + eps && p < b - eps) coarse.push_back(p);
    }
    std::sort(coarse.begin(), coarse.end());
    coarse.erase(std::unique(coarse.begin(), coarse.end(),
                             [eps](double x, double y) { return y - x < eps; }),
                 coarse.end());

    std::vector<double> edges;
    for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
        const double lo = coarse[i];
        const double hi = coarse[i + 1];
        const int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_width)));
        for (int k = 0; k < pieces; ++k) edges.push_back(lo + (hi - lo) * k / pieces);
    }
    edges.push_back(coarse.back());

    std::vector<double> extra;
    for (double g : graded_points) {
        if (g < a - eps || g > b + eps) continue;
        auto it = std::lower_bound(edges.begin(), edges.end(), g - eps);
        if (it == edges.end()) continue;
        const std::size_t idx = static_cast<std::size_t>(it - edges.begin());
        if (idx + 1 < edges.size()) {
            const double width = edges[idx + 1] - g;
            for (int k = 1; k <= levels; ++k) extra.push_back(g + width * std::pow(ratio, k));
        }
        if (idx > 0) {
            const double width = g - edges[idx - 1];
            for (int k = 1; k <= levels; ++k) extra.push_back(g - width * std::pow(ratio, k));
        }
    }
    edges.insert(edges.end(), extra.begin(), extra.end());
    std::sort(edges.begin(), edges.end());
    const double tiny = 1e-15 * (b - a);
    edges.erase(std::unique(edges.begin(), edges.end(),
                            [tiny](double x, double y) { return y - x <= tiny; }),
                edges.end());
    edges.front() = a;
    edges.back() = b;
    return edges;
}

}  // namespace cha::specfun
