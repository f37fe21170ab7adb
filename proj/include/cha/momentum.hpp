#pragma once

// Momentum-space radial function from the spherical-Bessel (Hankel) transform
//
//   phi(p) = sqrt(2/pi) * int_0^{r_c} R(r) j_l(p r) r^2 dr,
//
// normalized so that int phi^2 p^2 dp = 1. The phase (-i)^l is dropped since
// only |phi|^2 enters any measure.

#include <vector>

#include "cha/radial.hpp"

namespace cha {

struct MomentumOptions {
    double p_max = 0.0;              // a.u.; <= 0 selects max(30, 40 / r_c)
    double tail_tolerance = 1e-7;    // density mass allowed beyond p_max
    int max_raises = 8;              // automatic doublings of p_max
    int r_panel_order = 8;           // nodes per r panel (panel <= pi / (2 p_max))
    int p_panel_order = 16;          // nodes per p panel
    double support_cutoff = 1e-12;   // |u| below this fraction of its peak is dropped

    std::string signature() const;
};

struct MomentumSolution {
    QuantumState state;
    double r_c = 0.0;
    std::vector<double> p;        // a.u., strictly increasing in (0, p_max)
    std::vector<double> weights;
    std::vector<double> values;   // phi(p), normalized: sum w phi^2 p^2 = 1
    double p_max = 0.0;
    double tail_mass = 0.0;       // 1 - int_0^{p_max} phi^2 p^2 dp before renormalizing
    double norm_factor = 1.0;     // rescaling applied to the sqrt(2/pi) transform

    /// Density Pi(p) for the m = 0 angular part at the pole: phi^2 |Y_l0(0)|^2.
    double radial_density(std::size_t i) const { return values[i] * values[i]; }
};

/// Unnormalized amplitude int_0^{r_c} R(r) j_l(p r) r^2 dr with panels no
/// wider than pi / (2p), refined until halving panels changes it < 1e-9.
double transform_point(const RadialSolution& sol, double p);

/// Normalized momentum function on a composite Gauss-Legendre p grid.
MomentumSolution build_momentum(const RadialSolution& sol, const MomentumOptions& opts = {});

/// Default p_max for a confinement radius.
double default_p_max(double r_c);

/// <p^2> from the momentum density, including the hard-wall p^-6 tail
/// beyond p_max.
double momentum_p2(const MomentumSolution& mom);

/// <p^-2> = int phi^2 dp.
double momentum_inverse_p2(const MomentumSolution& mom);

}  // namespace cha
