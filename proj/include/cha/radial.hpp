#pragma once

// Hydrogen atom confined in an impenetrable sphere: radial eigenproblem.
//
// Units are hartree atomic units throughout (Z = 1): lengths in bohr,
// energies in hartree.

#include <string>
#include <string_view>
#include <vector>

#include "cha/error.hpp"

namespace cha {

/// (n, l, m) quantum numbers of one confined level.
struct QuantumState {
    int n = 1;
    int l = 0;
    int m = 0;

    /// Throws DomainError unless 1 <= n, 0 <= l < n, |m| <= l.
    void validate() const;
    /// Spectroscopic label such as "3d"; requires l <= 4.
    std::string label() const;
    /// Parse "1s".."5g" (m = 0). Throws ConfigError on malformed input.
    static QuantumState parse(std::string_view label);
    /// Number of radial nodes, n - l - 1.
    int radial_nodes() const { return n - l - 1; }

    friend bool operator==(const QuantumState&, const QuantumState&) = default;
    friend auto operator<=>(const QuantumState&, const QuantumState&) = default;
};

/// Hard-wall confinement radius in bohr.
struct Confinement {
    double r_c = 1.0;
    void validate() const;
};

struct SolverOptions {
    int grid_points = 400;          // polynomial order of the mapped Lobatto grid
    double map_ratio = 1.0;         // 2L / r_c of r = L(1+x)/(1-x+map_ratio)
    double energy_tolerance = 1e-8; // hartree, scaled by max(1, |E|)
    int max_doublings = 2;          // automatic grid doublings before giving up
    int panel_order = 16;           // Gauss-Legendre nodes per panel of the output grid
    int panels_per_rc = 96;         // base panel count of the output grid
    double max_panel_width = 0.5;   // bohr

    /// Stable text signature of every field, used for cache keys.
    std::string signature() const;
};

/// Polynomial interpolant of u(r) = r R(r) on the mapped Lobatto grid.
class RadialInterpolant {
public:
    RadialInterpolant() = default;
    RadialInterpolant(double r_c, double map_ratio, std::vector<double> x_nodes,
                      std::vector<double> u_values);

    double r_c() const { return r_c_; }
    double map_ratio() const { return map_ratio_; }
    const std::vector<double>& x_nodes() const { return x_; }
    const std::vector<double>& u_values() const { return u_; }

    /// Reduced radial function u(r); zero outside [0, r_c].
    double u(double r) const;
    /// du/dr.
    double du(double r) const;
    /// u and du/dr together.
    void evaluate(double r, double& u, double& du) const;

    double r_of_x(double x) const;
    double x_of_r(double r) const;
    double dr_dx(double x) const;

private:
    double r_c_ = 0.0;
    double map_ratio_ = 1.0;
    double half_length_ = 0.0;  // L
    std::vector<double> x_;
    std::vector<double> u_;
    std::vector<double> bary_;
};

/// Energy and normalized radial function R(r) of one confined level.
///
/// `r`, `weights` form a composite Gauss-Legendre rule on [0, r_c] whose
/// panel edges include every radial node and are graded towards both walls.
struct RadialSolution {
    QuantumState state;
    double r_c = 0.0;
    double energy = 0.0;                 // hartree
    std::vector<double> r;               // bohr, strictly increasing in (0, r_c)
    std::vector<double> weights;
    std::vector<double> values;          // R(r), bohr^-3/2
    std::vector<double> derivatives;     // dR/dr
    std::vector<double> node_positions;  // interior zeros of R
    std::vector<double> panel_edges;
    double norm_constant = 1.0;          // factor applied to the raw eigenvector
    int grid_points = 0;                 // Lobatto order actually used
    RadialInterpolant interpolant;

    double R(double radius) const;
    double u(double radius) const { return interpolant.u(radius); }
};

/// (n-l)-th eigenvalue of -u''/2 + [l(l+1)/(2r^2) - 1/r] u = E u, u(0)=u(r_c)=0.
double solve_energy(const QuantumState& state, const Confinement& conf,
                    const SolverOptions& opts = {});

/// 1F1(l+1-1/k, 2l+2, 2 r_c k) with k = sqrt(-2E); vanishes at eigenvalues.
double boundary_residual(double energy, int l, double r_c);

/// Unnormalized closed-form radial function for E < 0 (no wall imposed).
double closed_form_radial(double energy, int l, double r);

/// Normalized wavefunction belonging to `energy` (as returned by solve_energy).
RadialSolution radial_wavefunction(const QuantumState& state, const Confinement& conf,
                                   double energy, const SolverOptions& opts = {});

/// solve_energy followed by radial_wavefunction without repeating work.
RadialSolution solve_radial(const QuantumState& state, const Confinement& conf,
                            const SolverOptions& opts = {});

/// Strict sign changes of the sampled R inside (0, r_c).
int node_count(const RadialSolution& solution);

/// Mapped Lobatto abscissae in r for the given order and confinement.
std::vector<double> lobatto_radii(int grid_points, double r_c, double map_ratio);

}  // namespace cha
