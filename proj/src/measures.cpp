#include "cha/measures.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <utility>

#include "cha/specfun.hpp"

namespace cha {

namespace {

constexpr int kAngularOrder = 200;

// Zeros of P_l split [-1, 1] so that |P_l|^(2q) is smooth inside each piece.
std::vector<double> legendre_breaks(int l) {
    std::vector<double> edges{-1.0};
    if (l > 0) {
        const auto zeros = specfun::gauss_legendre(l).nodes;
        edges.insert(edges.end(), zeros.begin(), zeros.end());
    }
    edges.push_back(1.0);
    return edges;
}

template <class F>
double integrate_over_u(int l, F&& f) {
    const auto grid =
        specfun::composite_rule(legendre_breaks(l), specfun::cached_gauss_legendre(kAngularOrder));
    double sum = 0.0;
    for (std::size_t i = 0; i < grid.nodes.size(); ++i) sum += grid.weights[i] * f(grid.nodes[i]);
    return sum;
}

double y_l0_scale(int l) { return (2 * l + 1) / (4.0 * std::numbers::pi); }

void check_l(int l) {
    if (l < 0 || l > 4) throw DomainError("angular factors: l must lie in 0..4");
}

double compute_angular_power(int l, double q) {
    const double c = y_l0_scale(l);
    const double radial = integrate_over_u(l, [&](double u) {
        const double p = specfun::legendre_p(l, u);
        return std::pow(p * p, q);
    });
    return 2.0 * std::numbers::pi * std::pow(c, q) * radial;
}

double compute_angular_shannon(int l) {
    const double c = y_l0_scale(l);
    const double integral = integrate_over_u(l, [&](double u) {
        const double y2 = c * std::pow(specfun::legendre_p(l, u), 2);
        return y2 > 0.0 ? -y2 * std::log(y2) : 0.0;
    });
    return 2.0 * std::numbers::pi * integral;
}

struct AngularCache {
    std::mutex mutex;
    std::map<std::pair<int, double>, double> power;
    std::map<int, double> shannon;
};

AngularCache& angular_cache() {
    static AngularCache cache;
    return cache;
}

double entropy_term(double f) { return f > 0.0 ? -f * std::log(f) : 0.0; }

void require_normalized(const DensityProfile& d, const char* what) {
    const double n = d.norm();
    if (!(std::abs(n - 1.0) <= kNormTolerance)) {
        std::ostringstream os;
        os.precision(10);
        os << what << ": density integrates to " << n << ", expected 1";
        throw ContractViolation(os.str());
    }
}

void require_order(double order, const char* name) {
    if (!(order > 0.0) || order == 1.0) {
        std::ostringstream os;
        os << "renyi: order " << name << "=" << order << " must be positive and different from 1";
        throw DomainError(os.str());
    }
}

void require_same_cell(const RadialSolution& rsol, const MomentumSolution& psol) {
    if (!(rsol.state == psol.state) || rsol.r_c != psol.r_c) {
        throw ContractViolation("measures: position and momentum solutions describe different cells");
    }
}

}  // namespace

double angular_power(int l, double q) {
    check_l(l);
    if (!(q > 0.0)) throw DomainError("angular_power: exponent must be positive");
    auto& cache = angular_cache();
    {
        std::lock_guard lock(cache.mutex);
        if (auto it = cache.power.find({l, q}); it != cache.power.end()) return it->second;
    }
    const double value = compute_angular_power(l, q);
    std::lock_guard lock(cache.mutex);
    // First writer wins; a racing recomputation yields the same bits.
    return cache.power.emplace(std::pair{l, q}, value).first->second;
}

double angular_shannon(int l) {
    check_l(l);
    auto& cache = angular_cache();
    {
        std::lock_guard lock(cache.mutex);
        if (auto it = cache.shannon.find(l); it != cache.shannon.end()) return it->second;
    }
    const double value = compute_angular_shannon(l);
    std::lock_guard lock(cache.mutex);
    return cache.shannon.emplace(l, value).first->second;
}

AngularFactors angular_factors(int l, const std::vector<double>& exponents) {
    AngularFactors out;
    out.l = l;
    out.shannon_ang = angular_shannon(l);
    out.power_integrals[1.0] = 1.0;
    for (double q : exponents) {
        if (q != 1.0) out.power_integrals[q] = angular_power(l, q);
    }
    return out;
}

DensityProfile DensityProfile::position(const RadialSolution& sol) {
    DensityProfile d;
    d.l = sol.state.l;
    d.x = sol.r;
    d.weights = sol.weights;
    d.density.resize(sol.values.size());
    for (std::size_t i = 0; i < sol.values.size(); ++i) d.density[i] = sol.values[i] * sol.values[i];
    return d;
}

DensityProfile DensityProfile::momentum(const MomentumSolution& mom) {
    DensityProfile d;
    d.l = mom.state.l;
    d.x = mom.p;
    d.weights = mom.weights;
    d.density.resize(mom.values.size());
    for (std::size_t i = 0; i < mom.values.size(); ++i) d.density[i] = mom.radial_density(i);
    return d;
}

double DensityProfile::norm() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += weights[i] * density[i] * x[i] * x[i];
    return sum;
}

double DensityProfile::radial_power(double q) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sum += weights[i] * std::pow(density[i], q) * x[i] * x[i];
    }
    return sum;
}

double DensityProfile::radial_shannon() const {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += weights[i] * entropy_term(density[i]) * x[i] * x[i];
    return sum;
}

double shannon_entropy(const DensityProfile& d) {
    // Both factors are normalized, so the entropy splits into a sum.
    return d.radial_shannon() + angular_shannon(d.l);
}

double renyi_entropy(const DensityProfile& d, double order) {
    require_order(order, "q");
    const double moment = d.radial_power(order) * angular_power(d.l, order);
    return std::log(moment) / (1.0 - order);
}

double onicescu_energy(const DensityProfile& d) {
    return d.radial_power(2.0) * angular_power(d.l, 2.0);
}

MeasurePair shannon_pair(const RadialSolution& rsol, const MomentumSolution& psol) {
    require_same_cell(rsol, psol);
    const auto dr = DensityProfile::position(rsol);
    const auto dp = DensityProfile::momentum(psol);
    require_normalized(dr, "shannon_pair (r)");
    require_normalized(dp, "shannon_pair (p)");
    return {shannon_entropy(dr), shannon_entropy(dp)};
}

MeasurePair renyi_pair(const RadialSolution& rsol, const MomentumSolution& psol, double alpha,
                       double beta) {
    require_order(alpha, "alpha");
    require_order(beta, "beta");
    require_same_cell(rsol, psol);
    const auto dr = DensityProfile::position(rsol);
    const auto dp = DensityProfile::momentum(psol);
    require_normalized(dr, "renyi_pair (r)");
    require_normalized(dp, "renyi_pair (p)");
    return {renyi_entropy(dr, alpha), renyi_entropy(dp, beta)};
}

double expect_r2(const RadialSolution& sol) {
    double sum = 0.0;
    for (std::size_t i = 0; i < sol.r.size(); ++i) {
        const double r2 = sol.r[i] * sol.r[i];
        sum += sol.weights[i] * sol.values[i] * sol.values[i] * r2 * r2;
    }
    return sum;
}

double expect_inverse_r2(const RadialSolution& sol) {
    double sum = 0.0;
    for (std::size_t i = 0; i < sol.r.size(); ++i) sum += sol.weights[i] * sol.values[i] * sol.values[i];
    return sum;
}

double kinetic_p2(const RadialSolution& sol) {
    const double ll = sol.state.l * (sol.state.l + 1.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < sol.r.size(); ++i) {
        const double r = sol.r[i];
        const double dR = sol.derivatives[i];
        const double R = sol.values[i];
        sum += sol.weights[i] * (dR * dR * r * r + ll * R * R);
    }
    return sum;
}

MeasurePair fisher_pair(const RadialSolution& rsol, const MomentumSolution& psol) {
    require_same_cell(rsol, psol);
    const int m = std::abs(rsol.state.m);
    const int l = rsol.state.l;
    MeasurePair out{4.0 * kinetic_p2(rsol), 4.0 * expect_r2(rsol)};
    if (m != 0) {
        const double inv_p2 = momentum_inverse_p2(psol);
        if (!std::isfinite(inv_p2)) throw QuadratureError("fisher_pair: <p^-2> diverges");
        out.r -= 2.0 * (2 * l + 1) * m * expect_inverse_r2(rsol);
        out.p -= 2.0 * (2 * l + 1) * m * inv_p2;
    }
    return out;
}

MeasurePair onicescu_pair(const RadialSolution& rsol, const MomentumSolution& psol) {
    require_same_cell(rsol, psol);
    const auto dr = DensityProfile::position(rsol);
    const auto dp = DensityProfile::momentum(psol);
    require_normalized(dr, "onicescu_pair (r)");
    require_normalized(dp, "onicescu_pair (p)");
    return {onicescu_energy(dr), onicescu_energy(dp)};
}

MeasureSet assemble_measures(const RadialSolution& rsol, const MomentumSolution& psol, double alpha,
                             double beta) {
    MeasureSet ms;
    ms.state = rsol.state;
    ms.r_c = rsol.r_c;
    ms.energy = rsol.energy;
    ms.alpha = alpha;
    ms.beta = beta;

    const auto s = shannon_pair(rsol, psol);
    const auto r = renyi_pair(rsol, psol, alpha, beta);
    const auto i = fisher_pair(rsol, psol);
    const auto e = onicescu_pair(rsol, psol);
    ms.S_r = s.r, ms.S_p = s.p, ms.S_t = s.r + s.p;
    ms.R_r = r.r, ms.R_p = r.p, ms.R_t = r.r + r.p;
    ms.I_r = i.r, ms.I_p = i.p, ms.I_t = i.r * i.p;
    ms.E_r = e.r, ms.E_p = e.p, ms.E_t = e.r * e.p;

    ms.r2 = expect_r2(rsol);
    ms.p2 = kinetic_p2(rsol);
    ms.inverse_r2 = expect_inverse_r2(rsol);
    ms.inverse_p2 = momentum_inverse_p2(psol);
    ms.p2_momentum = momentum_p2(psol);
    ms.norm_r = DensityProfile::position(rsol).norm();
    ms.norm_p = DensityProfile::momentum(psol).norm();
    return ms;
}

}  // namespace cha
