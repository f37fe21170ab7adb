#include "cha/momentum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>

#include "cha/specfun.hpp"

namespace cha {

namespace {

const double kTransformPrefactor = std::sqrt(2.0 / std::numbers::pi);

// Radius beyond which |u| stays below `cutoff` times its peak, snapped up to
// the next panel edge of the solution grid.
double support_radius(const RadialSolution& sol, double cutoff) {
    double peak = 0.0;
    for (std::size_t i = 0; i < sol.r.size(); ++i) {
        peak = std::max(peak, std::abs(sol.values[i] * sol.r[i]));
    }
    double last = 0.0;
    for (std::size_t i = 0; i < sol.r.size(); ++i) {
        if (std::abs(sol.values[i] * sol.r[i]) > cutoff * peak) last = sol.r[i];
    }
    const auto edge = std::lower_bound(sol.panel_edges.begin(), sol.panel_edges.end(), last);
    if (edge == sol.panel_edges.end()) return sol.r_c;
    return std::min(sol.r_c, *edge);
}

double structural_width(const RadialSolution& sol) {
    double widest = 0.0;
    for (std::size_t i = 0; i + 1 < sol.panel_edges.size(); ++i) {
        widest = std::max(widest, sol.panel_edges[i + 1] - sol.panel_edges[i]);
    }
    return widest > 0.0 ? widest : sol.r_c;
}

std::vector<double> nodes_below(const RadialSolution& sol, double limit) {
    std::vector<double> out;
    for (double r : sol.node_positions) {
        if (r < limit) out.push_back(r);
    }
    return out;
}

double panel_integral(const RadialSolution& sol, double p, double a, double b,
                      const specfun::QuadratureRule& rule) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const double r = mid + half * rule.nodes[k];
        sum += rule.weights[k] * sol.interpolant.u(r) * r * specfun::sph_bessel_j(sol.state.l, p * r);
    }
    return half * sum;
}

// Transform on equal-width p panels. sin/cos(p r) come from the angle-addition
// formula: one sincos per (panel, r) plus a shared table of in-panel offsets.
void transform_linear_panels(int l, const std::vector<double>& r, const std::vector<double>& kw,
                             double p_start, double width, int panels,
                             const specfun::QuadratureRule& rule, std::span<double> out) {
    if (panels <= 0) return;
    const std::size_t nr = r.size();
    const std::size_t nm = rule.nodes.size();
    const double half = 0.5 * width;
    const double crossover = specfun::sph_bessel_series_crossover(l);

    std::vector<double> inv_r(nr), offset_cos(nm * nr), offset_sin(nm * nr);
    for (std::size_t j = 0; j < nr; ++j) {
        inv_r[j] = 1.0 / r[j];
        for (std::size_t m = 0; m < nm; ++m) {
            const double angle = half * rule.nodes[m] * r[j];
            offset_cos[m * nr + j] = std::cos(angle);
            offset_sin[m * nr + j] = std::sin(angle);
        }
    }
    std::vector<double> centre_sin(nr), centre_cos(nr);
    for (int k = 0; k < panels; ++k) {
        const double centre = p_start + (k + 0.5) * width;
        for (std::size_t j = 0; j < nr; ++j) {
            centre_sin[j] = std::sin(centre * r[j]);
            centre_cos[j] = std::cos(centre * r[j]);
        }
        for (std::size_t m = 0; m < nm; ++m) {
            const double p = centre + half * rule.nodes[m];
            const double inv_p = 1.0 / p;
            // r is sorted, so the series branch only covers a leading block.
            const auto first_trig = static_cast<std::size_t>(
                std::lower_bound(r.begin(), r.end(), crossover * inv_p) - r.begin());
            double acc = 0.0;
            for (std::size_t j = 0; j < first_trig; ++j) {
                acc += kw[j] * specfun::sph_bessel_j(l, p * r[j]);
            }
            const double* oc = &offset_cos[m * nr];
            const double* os = &offset_sin[m * nr];
            for (std::size_t j = first_trig; j < nr; ++j) {
                const double s = centre_sin[j] * oc[j] + centre_cos[j] * os[j];
                const double c = centre_cos[j] * oc[j] - centre_sin[j] * os[j];
                acc += kw[j] * specfun::sph_bessel_j_trig(l, inv_p * inv_r[j], s, c);
            }
            out[static_cast<std::size_t>(k) * nm + m] = acc;
        }
    }
}

double direct_transform(int l, const std::vector<double>& r, const std::vector<double>& kw, double p) {
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) acc += kw[j] * specfun::sph_bessel_j(l, p * r[j]);
    return acc;
}

// Crossings whose neighbouring mass density is below this fraction of the peak
// are left alone; one grading level takes S_p to ~1e-8.
constexpr double kZeroSplitThreshold = 1e-8;
constexpr int kZeroSplitLevels = 1;

// Illinois variant of regula falsi on a sign-changing bracket.
template <class F>
double bracketed_root(F&& f, double a, double b, double fa, double fb) {
    int side = 0;
    for (int it = 0; it < 100 && b - a > 1e-14 * b; ++it) {
        const double c = (a * fb - b * fa) / (fb - fa);
        const double fc = f(c);
        if (fc == 0.0) return c;
        if ((fc > 0) == (fb > 0)) {
            b = c;
            fb = fc;
            if (side == -1) fa *= 0.5;
            side = -1;
        } else {
            a = c;
            fa = fc;
            if (side == 1) fb *= 0.5;
            side = 1;
        }
    }
    return 0.5 * (a + b);
}

// rho ln rho has a log-singular slope wherever phi crosses zero, which costs
// the plain composite rule about three digits in S_p. Panels holding a
// significant crossing are split there, graded, and evaluated directly.
void split_at_zeros(int l, const std::vector<double>& r, const std::vector<double>& kw,
                    const std::vector<double>& edges, const specfun::QuadratureRule& rule,
                    specfun::PanelGrid& grid, std::vector<double>& phi) {
    const std::size_t nm = rule.nodes.size();
    double peak = 0.0;
    for (std::size_t k = 0; k < phi.size(); ++k) peak = std::max(peak, phi[k] * phi[k] * grid.nodes[k] * grid.nodes[k]);
    const auto f = [&](double p) { return direct_transform(l, r, kw, p); };

    std::vector<std::vector<double>> roots(edges.size() - 1);
    bool any = false;
    for (std::size_t k = 0; k + 1 < phi.size(); ++k) {
        if ((phi[k] > 0) == (phi[k + 1] > 0) || phi[k] == 0.0) continue;
        const double p_hi = grid.nodes[k + 1];
        const double big = std::max(phi[k] * phi[k], phi[k + 1] * phi[k + 1]) * p_hi * p_hi;
        if (big < kZeroSplitThreshold * peak) continue;
        const double z = bracketed_root(f, grid.nodes[k], p_hi, phi[k], phi[k + 1]);
        const auto panel = static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), z) - edges.begin()) - 1;
        roots[std::min(panel, roots.size() - 1)].push_back(z);
        any = true;
    }
    if (!any) return;

    specfun::PanelGrid out;
    std::vector<double> out_phi;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        if (roots[i].empty()) {
            for (std::size_t m = 0; m < nm; ++m) {
                out.nodes.push_back(grid.nodes[i * nm + m]);
                out.weights.push_back(grid.weights[i * nm + m]);
                out_phi.push_back(phi[i * nm + m]);
            }
            continue;
        }
        const auto sub = specfun::graded_edges(edges[i], edges[i + 1], edges[i + 1] - edges[i], roots[i], roots[i], kZeroSplitLevels);
        const auto g = specfun::composite_rule(sub, rule);
        for (std::size_t m = 0; m < g.nodes.size(); ++m) {
            out.nodes.push_back(g.nodes[m]);
            out.weights.push_back(g.weights[m]);
            out_phi.push_back(f(g.nodes[m]));
        }
    }
    grid = std::move(out);
    phi = std::move(out_phi);
}

}  // namespace

std::string MomentumOptions::signature() const {
    std::ostringstream os;
    os.precision(17);
    os << "pmax=" << p_max << ";tail=" << tail_tolerance << ";raise=" << max_raises
       << ";ro=" << r_panel_order << ";po=" << p_panel_order << ";cut=" << support_cutoff;
    return os.str();
}

double default_p_max(double r_c) { return std::max(30.0, 40.0 / r_c); }

double transform_point(const RadialSolution& sol, double p) {
    if (!(p > 0.0)) throw DomainError("transform_point: p must be positive");
    constexpr double kTolerance = 1e-9;
    constexpr int kMaxDepth = 12;
    const auto& rule = specfun::cached_gauss_legendre(16);

    const double r_end = support_radius(sol, 1e-14);
    const double width = std::min(std::numbers::pi / (2.0 * p), structural_width(sol));
    const auto edges = specfun::graded_edges(0.0, r_end, width, nodes_below(sol, r_end), {}, 0);

    struct Panel {
        double a, b, value;
        int depth;
    };
    std::vector<Panel> work;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        work.push_back({edges[i], edges[i + 1], panel_integral(sol, p, edges[i], edges[i + 1], rule), 0});
    }
    double total = 0.0;
    double worst_diff = 0.0;
    double worst_a = 0.0, worst_b = 0.0;
    const double per_panel = kTolerance / static_cast<double>(work.size() + 1);
    while (!work.empty()) {
        Panel panel = work.back();
        work.pop_back();
        const double mid = 0.5 * (panel.a + panel.b);
        const double left = panel_integral(sol, p, panel.a, mid, rule);
        const double right = panel_integral(sol, p, mid, panel.b, rule);
        const double diff = std::abs(left + right - panel.value);
        if (diff <= per_panel) {
            total += left + right;
        } else if (panel.depth >= kMaxDepth) {
            if (diff > worst_diff) {
                worst_diff = diff;
                worst_a = panel.a;
                worst_b = panel.b;
            }
            total += left + right;
        } else {
            work.push_back({panel.a, mid, left, panel.depth + 1});
            work.push_back({mid, panel.b, right, panel.depth + 1});
        }
    }
    if (worst_diff > 0.0) {
        std::ostringstream os;
        os << "transform_point: refinement did not settle at p=" << p << "; worst panel ["
           << worst_a << ", " << worst_b << "] changed by " << worst_diff;
        throw QuadratureError(os.str());
    }
    return total;
}

MomentumSolution build_momentum(const RadialSolution& sol, const MomentumOptions& opts) {
    if (sol.r.empty()) throw ContractViolation("build_momentum: empty radial solution");
    const int l = sol.state.l;
    const double r_end = support_radius(sol, opts.support_cutoff);
    const auto node_edges = nodes_below(sol, r_end);
    const double base_width = structural_width(sol);
    const auto& r_rule = specfun::cached_gauss_legendre(opts.r_panel_order);
    const auto& p_rule = specfun::cached_gauss_legendre(opts.p_panel_order);

    double p_max = opts.p_max > 0.0 ? opts.p_max : default_p_max(sol.r_c);
    MomentumSolution mom;
    mom.state = sol.state;
    mom.r_c = sol.r_c;

    for (int raise = 0;; ++raise, p_max *= 2.0) {
        // r side: panels no wider than a quarter wavelength at p_max.
        const double r_width = std::min(std::numbers::pi / (2.0 * p_max), base_width);
        const auto r_edges = specfun::graded_edges(0.0, r_end, r_width, node_edges, {}, 0);
        const auto r_grid = specfun::composite_rule(r_edges, r_rule);
        const std::size_t nr = r_grid.nodes.size();
        std::vector<double> kernel_weight(nr);
        for (std::size_t j = 0; j < nr; ++j) {
            const double r = r_grid.nodes[j];
            kernel_weight[j] = kTransformPrefactor * r_grid.weights[j] * sol.interpolant.u(r) * r;
        }

        // p side: log-spaced panels up to 1, then equal-width linear panels
        // resolving the cos^2(p r_end) modulation.
        const double p_width = 2.0 * std::numbers::pi / r_end;
        const double p_split = std::min(1.0, p_max);
        std::vector<double> p_break{1e-4, 1e-3, 1e-2, 1e-1};
        auto p_edges = specfun::graded_edges(0.0, p_split, p_width, p_break, {}, 0);
        const int linear_panels =
            p_max > p_split ? static_cast<int>(std::ceil((p_max - p_split) / p_width)) : 0;
        const double linear_width = linear_panels > 0 ? (p_max - p_split) / linear_panels : 0.0;
        for (int k = 1; k <= linear_panels; ++k) p_edges.push_back(p_split + k * linear_width);
        p_edges.back() = p_max;
        auto p_grid = specfun::composite_rule(p_edges, p_rule);
        const std::size_t np = p_grid.nodes.size();
        const std::size_t n_log = (p_edges.size() - 1 - linear_panels) * p_rule.nodes.size();

        std::vector<double> phi(np);
        for (std::size_t k = 0; k < n_log; ++k) {
            const double p = p_grid.nodes[k];
            double acc = 0.0;
            for (std::size_t j = 0; j < nr; ++j) {
                acc += kernel_weight[j] * specfun::sph_bessel_j(l, p * r_grid.nodes[j]);
            }
            phi[k] = acc;
        }
        transform_linear_panels(l, r_grid.nodes, kernel_weight, p_split, linear_width,
                                linear_panels, p_rule, std::span(phi).subspan(n_log));

        double mass = 0.0;
        for (std::size_t k = 0; k < np; ++k) {
            mass += p_grid.weights[k] * phi[k] * phi[k] * p_grid.nodes[k] * p_grid.nodes[k];
        }
        const double tail = std::max(0.0, 1.0 - mass);
        if (tail < opts.tail_tolerance) {
            split_at_zeros(l, r_grid.nodes, kernel_weight, p_edges, p_rule, p_grid, phi);
            mass = 0.0;
            for (std::size_t k = 0; k < phi.size(); ++k) {
                mass += p_grid.weights[k] * phi[k] * phi[k] * p_grid.nodes[k] * p_grid.nodes[k];
            }
            mom.p = std::move(p_grid.nodes);
            mom.weights = std::move(p_grid.weights);
            mom.p_max = p_max;
            mom.tail_mass = tail;
            mom.norm_factor = 1.0 / std::sqrt(mass);
            mom.values = std::move(phi);
            for (double& v : mom.values) v *= mom.norm_factor;
            return mom;
        }
        if (raise >= opts.max_raises) {
            // Hard-wall tails fall off as p^-3 in mass.
            const double suggested = p_max * std::cbrt(tail / opts.tail_tolerance) * 1.1;
            std::ostringstream os;
            os << "build_momentum: tail mass " << tail << " beyond p_max=" << p_max
               << " exceeds " << opts.tail_tolerance << "; try p_max >= " << suggested;
            throw CutoffError(os.str(), suggested);
        }
    }
}

double momentum_p2(const MomentumSolution& mom) {
    double sum = 0.0;
    for (std::size_t k = 0; k < mom.p.size(); ++k) {
        const double p2 = mom.p[k] * mom.p[k];
        sum += mom.weights[k] * mom.values[k] * mom.values[k] * p2 * p2;
    }
    // Beyond p_max the mass density p^2 phi^2 ~ A p^-4, so the missing mass
    // A / (3 p_max^3) carries A / p_max of <p^2>.
    return sum + 3.0 * mom.tail_mass * mom.p_max * mom.p_max;
}

double momentum_inverse_p2(const MomentumSolution& mom) {
    double sum = 0.0;
    for (std::size_t k = 0; k < mom.p.size(); ++k) {
        sum += mom.weights[k] * mom.values[k] * mom.values[k];
    }
    return sum;
}

}  // namespace cha
