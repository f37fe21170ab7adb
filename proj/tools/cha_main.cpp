// Command-line front end: sweeps, golden-table reproduction, single cells.
//
// Exit status: 0 success, 1 a cell or table check failed, 2 bad configuration.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cha/pipeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCellFailure = 1;
constexpr int kExitConfig = 2;

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        const auto a = item.find_first_not_of(" \t");
        const auto b = item.find_last_not_of(" \t");
        if (a != std::string::npos) out.push_back(item.substr(a, b - a + 1));
    }
    return out;
}

double to_number(const std::string& s) {
    // Fractions such as 2/3 are accepted so b = 2/3 is exact.
    if (const auto slash = s.find('/'); slash != std::string::npos) {
        return to_number(s.substr(0, slash)) / to_number(s.substr(slash + 1));
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::logic_error&) {
        used = 0;
    }
    if (used != s.size()) throw cha::ConfigError("not a number: '" + s + "'");
    return v;
}

// "0.5,1,2" or ranges "start:stop:step" (inclusive), mixed freely.
std::vector<double> parse_numbers(const std::string& text) {
    std::vector<double> out;
    for (const auto& item : split_list(text)) {
        if (item.find(':') == std::string::npos) {
            out.push_back(to_number(item));
            continue;
        }
        std::vector<std::string> parts;
        std::stringstream ss(item);
        for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
        if (parts.size() != 3) throw cha::ConfigError("range must be start:stop:step, got '" + item + "'");
        const double start = to_number(parts[0]);
        const double stop = to_number(parts[1]);
        const double step = to_number(parts[2]);
        if (!(step > 0.0) || stop < start) throw cha::ConfigError("empty or invalid range '" + item + "'");
        const long count = std::lround(std::floor((stop - start) / step + 1e-9));
        for (long k = 0; k <= count; ++k) {
            // Trim accumulated binary noise so 0.1:0.3:0.1 yields exactly 0.3.
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.12g", start + k * step);
            out.push_back(std::strtod(buf, nullptr));
        }
    }
    return out;
}

std::vector<cha::QuantumState> parse_states(const std::string& text) {
    if (text == "all") return cha::supported_states();
    std::vector<cha::QuantumState> out;
    for (const auto& item : split_list(text)) out.push_back(cha::QuantumState::parse(item));
    return out;
}

struct CommonOptions {
    int grid_points = 400;
    double p_max = 0.0;
    unsigned threads = 0;
    std::string cache_dir;

    void attach(CLI::App* app) {
        app->add_option("--grid-points", grid_points, "Order of the mapped Lobatto grid")
            ->envname("CHA_GRID_POINTS")
            ->capture_default_str();
        app->add_option("--pmax", p_max, "Momentum cutoff in a.u. (0 = automatic)")
            ->envname("CHA_PMAX")
            ->capture_default_str();
        app->add_option("--threads", threads, "Worker threads (0 = all cores)")->envname("CHA_THREADS");
        app->add_option("--cache-dir", cache_dir, "Directory for cached solutions")->envname("CHA_CACHE_DIR");
    }
    cha::SolverOptions solver() const {
        cha::SolverOptions o;
        o.grid_points = grid_points;
        return o;
    }
    cha::MomentumOptions momentum() const {
        cha::MomentumOptions o;
        o.p_max = p_max;
        return o;
    }
};

int run_sweep_command(const std::string& states, const std::string& rc, const std::string& b_list,
                      double alpha, double beta, const std::string& format, const std::string& out,
                      const std::string& family, const std::string& space, const CommonOptions& common) {
    cha::SweepConfig cfg;
    cfg.states = parse_states(states);
    cfg.rc_values = parse_numbers(rc);
    cfg.b_values = parse_numbers(b_list);
    cfg.alpha = alpha;
    cfg.beta = beta;
    cfg.format = cha::parse_format(format);
    cfg.output_path = out;
    cfg.threads = common.threads;
    cfg.solver = common.solver();
    cfg.momentum = common.momentum();
    cfg.plot_family = cha::parse_family(family);
    cfg.plot_space = cha::parse_space(space);
    cfg.plot_b = cfg.b_values.back();
    cfg.validate();

    cha::SolutionCache cache(common.cache_dir);
    const auto records = cha::run_sweep(cfg, cache);
    int failures = 0;
    for (const auto& rec : records) {
        if (!rec.ok()) {
            ++failures;
            std::cerr << "cell " << rec.state.label() << " r_c=" << rec.r_c << " failed: " << rec.error << "\n";
        }
    }
    if (!records.empty()) cha::emit_output(records, cfg);
    return failures > 0 ? kExitCellFailure : kExitOk;
}

int run_table_command(const std::vector<std::string>& which, const std::string& golden,
                      const CommonOptions& common) {
    const auto rows = cha::load_golden(golden.empty() ? cha::default_golden_path() : std::filesystem::path(golden));
    std::vector<std::string> tables = which;
    if (tables.empty() || (tables.size() == 1 && tables[0] == "all")) {
        tables = {"I", "II", "III", "III_ref", "IV"};
    }
    for (const auto& t : tables) cha::table_spec(t);

    cha::SolutionCache cache(common.cache_dir);
    bool all_passed = true;
    for (const auto& t : tables) {
        const auto cmp = cha::reproduce_table(t, rows, cache, common.threads, common.solver(), common.momentum());
        std::cout << cmp.format() << "\n";
        all_passed = all_passed && cmp.passed();
    }
    return all_passed ? kExitOk : kExitCellFailure;
}

int run_single_command(const std::string& state_text, double rc, double alpha, double beta,
                       const CommonOptions& common) {
    cha::SweepConfig cfg;
    cfg.states = {cha::QuantumState::parse(state_text)};
    cfg.rc_values = {rc};
    cfg.alpha = alpha;
    cfg.beta = beta;
    cfg.threads = 1;
    cfg.solver = common.solver();
    cfg.momentum = common.momentum();
    cfg.validate();

    cha::SolutionCache cache(common.cache_dir);
    const auto records = cha::run_sweep(cfg, cache);
    const auto& rec = records.front();
    if (!rec.ok()) {
        std::cerr << "cell " << rec.state.label() << " r_c=" << rc << " failed: " << rec.error << "\n";
        return kExitCellFailure;
    }
    const auto& m = *rec.measures;
    std::printf("state %s  r_c %.9g  energy %.12g hartree\n", rec.state.label().c_str(), rc, m.energy);
    std::printf("%-8s %16s %16s %16s\n", "", "r", "p", "t");
    std::printf("%-8s %16.9g %16.9g %16.9g\n", "S", m.S_r, m.S_p, m.S_t);
    std::printf("%-8s %16.9g %16.9g %16.9g   (alpha=%g, beta=%g)\n", "R", m.R_r, m.R_p, m.R_t, alpha, beta);
    std::printf("%-8s %16.9g %16.9g %16.9g\n", "I", m.I_r, m.I_p, m.I_t);
    std::printf("%-8s %16.9g %16.9g %16.9g\n", "E", m.E_r, m.E_p, m.E_t);
    std::printf("<r^2> %.9g  <p^2> %.9g (momentum grid %.9g)  <r^-2> %.9g  <p^-2> %.9g\n", m.r2, m.p2,
                m.p2_momentum, m.inverse_r2, m.inverse_p2);
    for (double b : cha::kDefaultB) {
        const int sup = *cha::superscript(b);
        for (cha::Family f : cha::kFamilies) {
            std::printf("C_%s^(%d) %16.9g %16.9g %16.9g\n", std::string(cha::to_string(f)).c_str(), sup,
                        rec.report->at(f, cha::Space::r, b), rec.report->at(f, cha::Space::p, b),
                        rec.report->at(f, cha::Space::t, b));
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information measures and complexities of the confined hydrogen atom"};
    app.require_subcommand(1);

    CommonOptions common;
    std::string states = "all", rc, b_list = "2/3,1", format = "csv", out;
    std::string family = "ES", space = "r";
    double alpha = 0.6, beta = 3.0;

    auto* sweep = app.add_subcommand("sweep", "Sweep states x r_c and emit complexities");
    sweep->add_option("--states", states, "Comma list of states (1s..5g) or 'all'")
        ->envname("CHA_STATES")
        ->capture_default_str();
    sweep->add_option("--rc", rc, "Radii: comma list and/or start:stop:step ranges")
        ->envname("CHA_RC")
        ->required();
    sweep->add_option("--alpha", alpha, "Renyi order in position space")->envname("CHA_ALPHA")->capture_default_str();
    sweep->add_option("--beta", beta, "Renyi order in momentum space")->envname("CHA_BETA")->capture_default_str();
    sweep->add_option("--b", b_list, "Scaling parameters b (comma list)")->envname("CHA_B");
    sweep->add_option("--format", format, "csv, json or plot")->envname("CHA_FORMAT")->capture_default_str();
    sweep->add_option("--out", out, "Output file (default stdout)")->envname("CHA_OUT");
    sweep->add_option("--family", family, "Plot data: ES, ER, IS or IR")->envname("CHA_FAMILY")->capture_default_str();
    sweep->add_option("--space", space, "Plot data: r, p or t")->envname("CHA_SPACE")->capture_default_str();
    common.attach(sweep);

    std::vector<std::string> tables;
    std::string golden;
    auto* table = app.add_subcommand("table", "Compare against the golden tables");
    table->add_option("tables", tables, "I, II, III, III_ref, IV or all (default all)");
    table->add_option("--golden", golden, "Golden data CSV")->envname("CHA_GOLDEN");
    common.attach(table);

    std::string state = "1s";
    double single_rc = 1.0;
    auto* single = app.add_subcommand("single", "All measures for one (state, r_c)");
    single->add_option("--state", state, "State label")->envname("CHA_STATE")->capture_default_str();
    single->add_option("--rc", single_rc, "Confinement radius (bohr)")->envname("CHA_RC")->capture_default_str();
    single->add_option("--alpha", alpha, "Renyi order in position space")->envname("CHA_ALPHA")->capture_default_str();
    single->add_option("--beta", beta, "Renyi order in momentum space")->envname("CHA_BETA")->capture_default_str();
    common.attach(single);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (*sweep) return run_sweep_command(states, rc, b_list, alpha, beta, format, out, family, space, common);
        if (*table) return run_table_command(tables, golden, common);
        return run_single_command(state, single_rc, alpha, beta, common);
    } catch (const cha::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const cha::DomainError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCellFailure;
    }
}
