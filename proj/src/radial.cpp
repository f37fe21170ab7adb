#include "cha/radial.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include "cha/specfun.hpp"

namespace cha {

// ---------------------------------------------------------------------------
// QuantumState / Confinement

namespace {
constexpr char kOrbitalLetters[] = {'s', 'p', 'd', 'f', 'g'};
}

void QuantumState::validate() const {
    if (n < 1) throw DomainError("QuantumState: n must be >= 1");
    if (l < 0 || l >= n) throw DomainError("QuantumState: l must satisfy 0 <= l < n");
    if (std::abs(m) > l) throw DomainError("QuantumState: |m| must not exceed l");
}

std::string QuantumState::label() const {
    if (l < 0 || l > 4) throw DomainError("QuantumState: no label for l > 4");
    return std::to_string(n) + kOrbitalLetters[l];
}

QuantumState QuantumState::parse(std::string_view text) {
    if (text.size() < 2) throw ConfigError("bad state label '" + std::string(text) + "'");
    const char letter = text.back();
    const auto* it = std::find(std::begin(kOrbitalLetters), std::end(kOrbitalLetters), letter);
    if (it == std::end(kOrbitalLetters)) {
        throw ConfigError("bad orbital letter in '" + std::string(text) + "'");
    }
    int n = 0;
    for (char c : text.substr(0, text.size() - 1)) {
        if (c < '0' || c > '9') throw ConfigError("bad principal number in '" + std::string(text) + "'");
        n = 10 * n + (c - '0');
    }
    QuantumState state{n, static_cast<int>(it - std::begin(kOrbitalLetters)), 0};
    try {
        state.validate();
    } catch (const DomainError& e) {
        throw ConfigError("invalid state '" + std::string(text) + "': " + e.what());
    }
    return state;
}

void Confinement::validate() const {
    if (!(r_c > 0.0) || !std::isfinite(r_c)) {
        throw DomainError("Confinement: r_c must be a positive finite radius");
    }
}

std::string SolverOptions::signature() const {
    std::ostringstream os;
    os.precision(17);
    os << "N=" << grid_points << ";map=" << map_ratio << ";tol=" << energy_tolerance
       << ";dbl=" << max_doublings << ";po=" << panel_order << ";ppr=" << panels_per_rc
       << ";pw=" << max_panel_width;
    return os.str();
}

// ---------------------------------------------------------------------------
// RadialInterpolant

RadialInterpolant::RadialInterpolant(double r_c, double map_ratio, std::vector<double> x_nodes,
                                     std::vector<double> u_values)
    : r_c_(r_c), map_ratio_(map_ratio), half_length_(0.5 * map_ratio * r_c),
      x_(std::move(x_nodes)), u_(std::move(u_values)) {
    const std::size_t n = x_.size();
    // Barycentric weights through log-magnitudes; plain products under/overflow
    // for a few hundred nodes.
    std::vector<double> log_mag(n, 0.0);
    std::vector<int> sign(n, 1);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
            if (k == j) continue;
            const double d = x_[j] - x_[k];
            log_mag[j] -= std::log(std::abs(d));
            if (d < 0) sign[j] = -sign[j];
        }
    }
    const double top = *std::max_element(log_mag.begin(), log_mag.end());
    bary_.resize(n);
    for (std::size_t j = 0; j < n; ++j) bary_[j] = sign[j] * std::exp(log_mag[j] - top);
}

double RadialInterpolant::r_of_x(double x) const {
    return half_length_ * (1.0 + x) / (1.0 - x + map_ratio_);
}

double RadialInterpolant::x_of_r(double r) const {
    return (r * (1.0 + map_ratio_) - half_length_) / (r + half_length_);
}

double RadialInterpolant::dr_dx(double x) const {
    const double den = 1.0 - x + map_ratio_;
    return half_length_ * (2.0 + map_ratio_) / (den * den);
}

void RadialInterpolant::evaluate(double r, double& u, double& du) const {
    u = 0.0;
    du = 0.0;
    if (x_.empty() || r < 0.0 || r > r_c_) return;
    const double x = std::clamp(x_of_r(r), -1.0, 1.0);
    const std::size_t n = x_.size();

    // Closest node decides whether we are (numerically) sitting on it.
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        const double d = std::abs(x - x_[j]);
        if (d < best) {
            best = d;
            nearest = j;
        }
    }
    const double spacing = nearest + 1 < n ? x_[nearest + 1] - x_[nearest]
                                           : x_[nearest] - x_[nearest - 1];
    if (best <= 1e-9 * spacing) {
        double dudx = 0.0;
        double diag = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            if (k == nearest) continue;
            const double d = (bary_[k] / bary_[nearest]) / (x_[nearest] - x_[k]);
            dudx += d * u_[k];
            diag -= d;
        }
        dudx += diag * u_[nearest];
        u = u_[nearest];
        du = dudx / dr_dx(x_[nearest]);
        return;
    }

    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double t = bary_[j] / (x - x_[j]);
        num += t * u_[j];
        den += t;
    }
    const double value = num / den;
    double dnum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double dx = x - x_[j];
        dnum += bary_[j] / dx * (value - u_[j]) / dx;
    }
    u = value;
    du = (dnum / den) / dr_dx(x);
}

double RadialInterpolant::u(double r) const {
    if (x_.empty() || r < 0.0 || r > r_c_) return 0.0;
    const double x = std::clamp(x_of_r(r), -1.0, 1.0);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < x_.size(); ++j) {
        const double dx = x - x_[j];
        if (dx == 0.0) return u_[j];
        const double t = bary_[j] / dx;
        num += t * u_[j];
        den += t;
    }
    return num / den;
}

double RadialInterpolant::du(double r) const {
    double u_val, du_val;
    evaluate(r, u_val, du_val);
    return du_val;
}

double RadialSolution::R(double radius) const {
    if (radius <= 0.0) {
        return state.l == 0 ? interpolant.du(0.0) : 0.0;
    }
    return interpolant.u(radius) / radius;
}

// ---------------------------------------------------------------------------
// Spectral discretization

namespace {

struct Discretization {
    int order = 0;                 // Lobatto order N (N+1 nodes)
    std::vector<double> x, w, r, dr;
    Eigen::MatrixXd diff;          // (N+1)x(N+1) first-derivative matrix in x
    Eigen::MatrixXd hamiltonian;   // symmetric, interior nodes only
    std::vector<double> mass;      // w_i r'(x_i), interior
    std::vector<double> potential; // effective potential, interior
};

Discretization discretize(int order, int l, double r_c, double map_ratio) {
    Discretization d;
    d.order = order;
    const auto rule = specfun::gauss_lobatto_legendre(order);
    d.x = rule.nodes;
    d.w = rule.weights;
    const double half_length = 0.5 * map_ratio * r_c;
    const int n = order + 1;
    d.r.resize(n);
    d.dr.resize(n);
    for (int i = 0; i < n; ++i) {
        const double den = 1.0 - d.x[i] + map_ratio;
        d.r[i] = half_length * (1.0 + d.x[i]) / den;
        d.dr[i] = half_length * (2.0 + map_ratio) / (den * den);
    }
    d.r.front() = 0.0;
    d.r.back() = r_c;

    // Lobatto differentiation matrix.
    std::vector<double> pn(n);
    for (int i = 0; i < n; ++i) {
        double p, dp;
        specfun::legendre_p_and_derivative(order, d.x[i], p, dp);
        pn[i] = p;
    }
    d.diff.resize(n, n);
    for (int i = 0; i < n; ++i) {
        double diag = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double v = pn[i] / (pn[j] * (d.x[i] - d.x[j]));
            d.diff(i, j) = v;
            diag -= v;
        }
        d.diff(i, i) = diag;
    }

    // Kinetic form 1/2 sum_k w_k (Du)_k^2 / r'_k restricted to interior unknowns.
    const int m = n - 2;
    Eigen::MatrixXd scaled(n, m);
    for (int k = 0; k < n; ++k) {
        const double s = std::sqrt(0.5 * d.w[k] / d.dr[k]);
        for (int j = 0; j < m; ++j) scaled(k, j) = s * d.diff(k, j + 1);
    }
    Eigen::MatrixXd kinetic = scaled.transpose() * scaled;

    d.mass.resize(m);
    d.potential.resize(m);
    const double centrifugal = 0.5 * l * (l + 1);
    for (int i = 0; i < m; ++i) {
        const double ri = d.r[i + 1];
        d.mass[i] = d.w[i + 1] * d.dr[i + 1];
        d.potential[i] = centrifugal / (ri * ri) - 1.0 / ri;
    }
    d.hamiltonian.resize(m, m);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) {
            d.hamiltonian(i, j) = kinetic(i, j) / std::sqrt(d.mass[i] * d.mass[j]);
        }
        d.hamiltonian(j, j) += d.potential[j];
    }
    return d;
}

std::vector<double> sorted_eigenvalues(const Discretization& d) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(d.hamiltonian, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw ConvergenceError("radial eigensolver: tridiagonal QR failed");
    }
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

struct Eigenpair {
    double energy = 0.0;
    std::vector<double> u;  // u at interior Lobatto nodes (unnormalized)
};

// Energy functional evaluated as a sum of squares (free of cancellation
// against the large matrix norm) for interior values u.
double rayleigh_energy(const Discretization& d, const std::vector<double>& u) {
    const int n = d.order + 1;
    const int m = n - 2;
    double kinetic = 0.0, potential = 0.0, norm = 0.0;
    for (int k = 0; k < n; ++k) {
        double du = 0.0;
        for (int j = 0; j < m; ++j) du += d.diff(k, j + 1) * u[j];
        kinetic += 0.5 * d.w[k] * du * du / d.dr[k];
    }
    for (int j = 0; j < m; ++j) {
        potential += d.mass[j] * d.potential[j] * u[j] * u[j];
        norm += d.mass[j] * u[j] * u[j];
    }
    return (kinetic + potential) / norm;
}

Eigenpair inverse_iteration(const Discretization& d, double shift) {
    const int m = static_cast<int>(d.mass.size());
    const double offset = 1e-9 * std::max(1.0, std::abs(shift));
    Eigen::MatrixXd shifted = d.hamiltonian;
    shifted.diagonal().array() -= (shift - offset);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m) / std::sqrt(static_cast<double>(m));
    for (int iter = 0; iter < 4; ++iter) {
        v = lu.solve(v);
        v.normalize();
    }
    Eigenpair pair;
    pair.u.resize(m);
    for (int j = 0; j < m; ++j) pair.u[j] = v(j) / std::sqrt(d.mass[j]);
    pair.energy = rayleigh_energy(d, pair.u);
    return pair;
}

int sign_changes(const std::vector<double>& values, double floor) {
    int changes = 0;
    int last = 0;
    for (double v : values) {
        if (std::abs(v) <= floor) continue;
        const int s = v > 0 ? 1 : -1;
        if (last != 0 && s != last) ++changes;
        last = s;
    }
    return changes;
}

double max_abs(const std::vector<double>& values) {
    double top = 0.0;
    for (double v : values) top = std::max(top, std::abs(v));
    return top;
}

// Samples below this fraction of the peak are treated as numerical zeros
// when counting sign changes.
constexpr double kNodeNoiseFloor = 1e-9;

struct SpectralResult {
    Discretization disc;
    Eigenpair pair;
};

std::optional<Eigenpair> branch_pair(const Discretization& d, int index) {
    const auto ev = sorted_eigenvalues(d);
    if (static_cast<int>(ev.size()) <= index) return std::nullopt;
    return inverse_iteration(d, ev[index]);
}

double energy_scale(double e) { return std::max(1.0, std::abs(e)); }

SpectralResult spectral_solve(const QuantumState& state, const Confinement& conf,
                              const SolverOptions& opts) {
    state.validate();
    conf.validate();
    if (opts.grid_points < 8) throw DomainError("SolverOptions: grid_points must be >= 8");
    const int index = state.radial_nodes();

    int order = opts.grid_points;
    std::optional<double> coarse_energy;
    {
        auto coarse = discretize(std::max(4, order / 2), state.l, conf.r_c, opts.map_ratio);
        if (auto p = branch_pair(coarse, index)) coarse_energy = p->energy;
    }
    std::optional<double> last_energy;
    std::string failure;
    for (int attempt = 0; attempt <= opts.max_doublings; ++attempt, order *= 2) {
        auto disc = discretize(order, state.l, conf.r_c, opts.map_ratio);
        auto pair = branch_pair(disc, index);
        if (!pair) {
            failure = "grid too small for the requested branch";
            coarse_energy.reset();
            continue;
        }
        const int nodes = sign_changes(pair->u, kNodeNoiseFloor * max_abs(pair->u));
        if (nodes != index) {
            failure = "eigenvector has " + std::to_string(nodes) + " nodes, expected " +
                      std::to_string(index);
            coarse_energy = pair->energy;
            continue;
        }
        const double tol = opts.energy_tolerance * energy_scale(pair->energy);
        if (coarse_energy && std::abs(*coarse_energy - pair->energy) <= tol) {
            return {std::move(disc), std::move(*pair)};
        }
        last_energy = coarse_energy;
        coarse_energy = pair->energy;
        failure.clear();
    }
    if (!failure.empty()) {
        throw ResolutionError("radial solver for " + state.label() + " at r_c=" +
                              std::to_string(conf.r_c) + ": " + failure);
    }
    std::ostringstream os;
    os.precision(15);
    os << "radial solver for " << state.label() << " at r_c=" << conf.r_c
       << " did not converge; last two estimates " << (last_energy ? *last_energy : NAN)
       << " and " << (coarse_energy ? *coarse_energy : NAN);
    throw ConvergenceError(os.str());
}

double bisect_root(const RadialInterpolant& f, double lo, double hi) {
    double f_lo = f.u(lo);
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * f.r_c(); ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double f_mid = f.u(mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid > 0) == (f_lo > 0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

RadialSolution assemble_solution(const QuantumState& state, const Confinement& conf,
                                 const SolverOptions& opts, const Discretization& disc,
                                 const Eigenpair& pair) {
    const int n = disc.order + 1;
    std::vector<double> u_full(n, 0.0);
    std::copy(pair.u.begin(), pair.u.end(), u_full.begin() + 1);

    // Sign convention: R > 0 next to the origin.
    const double floor = kNodeNoiseFloor * max_abs(pair.u);
    for (double v : pair.u) {
        if (std::abs(v) > floor) {
            if (v < 0) {
                for (double& x : u_full) x = -x;
            }
            break;
        }
    }

    RadialSolution sol;
    sol.state = state;
    sol.r_c = conf.r_c;
    sol.energy = pair.energy;
    sol.grid_points = disc.order;
    sol.interpolant = RadialInterpolant(conf.r_c, opts.map_ratio, disc.x, u_full);

    // Interior zeros of u located on the interpolant.
    int last_sign = 0;
    double last_r = 0.0;
    for (int i = 1; i + 1 < n; ++i) {
        if (std::abs(u_full[i]) <= floor) continue;
        const int s = u_full[i] > 0 ? 1 : -1;
        if (last_sign != 0 && s != last_sign) {
            sol.node_positions.push_back(bisect_root(sol.interpolant, last_r, disc.r[i]));
        }
        last_sign = s;
        last_r = disc.r[i];
    }

    const double width = std::min(opts.max_panel_width, conf.r_c / opts.panels_per_rc);
    std::vector<double> graded{0.0, conf.r_c};
    graded.insert(graded.end(), sol.node_positions.begin(), sol.node_positions.end());
    sol.panel_edges = specfun::graded_edges(0.0, conf.r_c, width, {}, graded);
    auto grid = specfun::composite_rule(sol.panel_edges,
                                        specfun::cached_gauss_legendre(opts.panel_order));
    sol.r = std::move(grid.nodes);
    sol.weights = std::move(grid.weights);

    const std::size_t m = sol.r.size();
    std::vector<double> u(m), du(m);
    for (std::size_t i = 0; i < m; ++i) sol.interpolant.evaluate(sol.r[i], u[i], du[i]);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < m; ++i) norm2 += sol.weights[i] * u[i] * u[i];
    const double scale = 1.0 / std::sqrt(norm2);

    std::vector<double> u_scaled = sol.interpolant.u_values();
    for (double& v : u_scaled) v *= scale;
    sol.interpolant = RadialInterpolant(conf.r_c, opts.map_ratio, disc.x, std::move(u_scaled));

    sol.values.resize(m);
    sol.derivatives.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double r = sol.r[i];
        const double uu = u[i] * scale;
        const double dd = du[i] * scale;
        sol.values[i] = uu / r;
        sol.derivatives[i] = (dd * r - uu) / (r * r);
    }

    // N_{n,l} of the closed form, defined only below the ionization threshold.
    sol.norm_constant = std::numeric_limits<double>::quiet_NaN();
    if (sol.energy < 0.0) {
        const auto peak = std::max_element(sol.values.begin(), sol.values.end(),
                                           [](double a, double b) { return std::abs(a) < std::abs(b); });
        const std::size_t at = static_cast<std::size_t>(peak - sol.values.begin());
        try {
            const double reference = closed_form_radial(sol.energy, state.l, sol.r[at]);
            if (reference != 0.0 && std::isfinite(reference)) sol.norm_constant = sol.values[at] / reference;
        } catch (const Error&) {
        }
    }
    return sol;
}

}  // namespace

std::vector<double> lobatto_radii(int grid_points, double r_c, double map_ratio) {
    const auto rule = specfun::gauss_lobatto_legendre(grid_points);
    RadialInterpolant map(r_c, map_ratio, {}, {});
    std::vector<double> r;
    r.reserve(rule.nodes.size());
    for (double x : rule.nodes) r.push_back(map.r_of_x(x));
    r.front() = 0.0;
    r.back() = r_c;
    return r;
}

double solve_energy(const QuantumState& state, const Confinement& conf, const SolverOptions& opts) {
    return spectral_solve(state, conf, opts).pair.energy;
}

double boundary_residual(double energy, int l, double r_c) {
    if (!(energy < 0.0)) {
        throw DomainError("boundary_residual: energy must be negative (no analytic continuation)");
    }
    if (l < 0) throw DomainError("boundary_residual: l must be non-negative");
    const double k = std::sqrt(-2.0 * energy);
    return specfun::kummer_1f1(l + 1 - 1.0 / k, 2.0 * l + 2.0, 2.0 * r_c * k);
}

double closed_form_radial(double energy, int l, double r) {
    if (!(energy < 0.0)) throw DomainError("closed_form_radial: energy must be negative");
    const double k = std::sqrt(-2.0 * energy);
    const double x = 2.0 * r * k;
    return std::pow(x, l) * specfun::kummer_1f1(l + 1 - 1.0 / k, 2.0 * l + 2.0, x) * std::exp(-r * k);
}

RadialSolution radial_wavefunction(const QuantumState& state, const Confinement& conf,
                                   double energy, const SolverOptions& opts) {
    state.validate();
    conf.validate();
    int order = opts.grid_points;
    for (int attempt = 0; attempt <= opts.max_doublings; ++attempt, order *= 2) {
        auto disc = discretize(order, state.l, conf.r_c, opts.map_ratio);
        auto pair = inverse_iteration(disc, energy);
        const double tol = 10.0 * opts.energy_tolerance * energy_scale(energy);
        if (std::abs(pair.energy - energy) > tol && attempt < opts.max_doublings) continue;
        const int nodes = sign_changes(pair.u, kNodeNoiseFloor * max_abs(pair.u));
        if (nodes != state.radial_nodes()) {
            throw WrongBranchError("energy " + std::to_string(energy) + " yields " +
                                   std::to_string(nodes) + " radial nodes; " + state.label() +
                                   " needs " + std::to_string(state.radial_nodes()));
        }
        return assemble_solution(state, conf, opts, disc, pair);
    }
    throw ConvergenceError("radial_wavefunction: energy is not an eigenvalue on any tried grid");
}

RadialSolution solve_radial(const QuantumState& state, const Confinement& conf,
                            const SolverOptions& opts) {
    auto result = spectral_solve(state, conf, opts);
    return assemble_solution(state, conf, opts, result.disc, result.pair);
}

int node_count(const RadialSolution& solution) {
    return sign_changes(solution.values, kNodeNoiseFloor * max_abs(solution.values));
}

}  // namespace cha
