#pragma once

// Shannon, Renyi, Fisher and Onicescu measures of rho(r) = R(r)^2 |Y_l0|^2
// and Pi(p) = phi(p)^2 |Y_l0|^2. Every integral factors into a radial part
// and an angular part; entropies are in nats.

#include <map>
#include <vector>

#include "cha/momentum.hpp"
#include "cha/radial.hpp"

namespace cha {

struct AngularFactors {
    int l = 0;
    double shannon_ang = 0.0;                // -int |Y_l0|^2 ln |Y_l0|^2 dOmega
    std::map<double, double> power_integrals;  // q -> int |Y_l0|^(2q) dOmega
};

/// Angular integrals for the requested exponents (q = 1 is always present).
AngularFactors angular_factors(int l, const std::vector<double>& exponents);

/// int |Y_l0|^(2q) dOmega, cached per (l, q).
double angular_power(int l, double q);

/// -int |Y_l0|^2 ln |Y_l0|^2 dOmega, cached per l.
double angular_shannon(int l);

/// A radial density f(x) >= 0 on a quadrature grid in x (r or p), to be
/// integrated against x^2 dx and combined with the |Y_l0|^2 angular factor.
struct DensityProfile {
    int l = 0;
    std::vector<double> x;
    std::vector<double> weights;
    std::vector<double> density;

    static DensityProfile position(const RadialSolution& sol);
    static DensityProfile momentum(const MomentumSolution& mom);

    /// int f x^2 dx.
    double norm() const;
    /// int f^q x^2 dx (radial part only).
    double radial_power(double q) const;
    /// -int f ln f x^2 dx (radial part only, 0 ln 0 = 0).
    double radial_shannon() const;
};

double shannon_entropy(const DensityProfile& d);
double renyi_entropy(const DensityProfile& d, double order);
double onicescu_energy(const DensityProfile& d);

struct MeasurePair {
    double r = 0.0;
    double p = 0.0;
};

constexpr double kNormTolerance = 1e-6;

MeasurePair shannon_pair(const RadialSolution& rsol, const MomentumSolution& psol);
MeasurePair renyi_pair(const RadialSolution& rsol, const MomentumSolution& psol, double alpha,
                       double beta);
MeasurePair fisher_pair(const RadialSolution& rsol, const MomentumSolution& psol);
MeasurePair onicescu_pair(const RadialSolution& rsol, const MomentumSolution& psol);

/// Radial moments from the position-space solution.
double expect_r2(const RadialSolution& sol);
double expect_inverse_r2(const RadialSolution& sol);
/// <p^2> from the kinetic integral int [R'^2 + l(l+1) R^2 / r^2] r^2 dr.
double kinetic_p2(const RadialSolution& sol);

struct MeasureSet {
    QuantumState state;
    double r_c = 0.0;
    double energy = 0.0;
    double alpha = 0.6;
    double beta = 3.0;

    double S_r = 0.0, S_p = 0.0, S_t = 0.0;
    double R_r = 0.0, R_p = 0.0, R_t = 0.0;  // R_r at order alpha, R_p at beta
    double I_r = 0.0, I_p = 0.0, I_t = 0.0;
    double E_r = 0.0, E_p = 0.0, E_t = 0.0;

    double r2 = 0.0;           // <r^2>
    double p2 = 0.0;           // <p^2>, kinetic integral
    double inverse_r2 = 0.0;   // <r^-2>
    double inverse_p2 = 0.0;   // <p^-2>
    double p2_momentum = 0.0;  // <p^2> from the momentum density (cross-check)
    double norm_r = 0.0;
    double norm_p = 0.0;
};

MeasureSet assemble_measures(const RadialSolution& rsol, const MomentumSolution& psol,
                             double alpha = 0.6, double beta = 3.0);

}  // namespace cha
