#include "cha/pipeline.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>

namespace cha {

using nlohmann::json;

namespace {

constexpr int kCacheSchema = 1;

std::string format_g9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

double round_g9(double v) { return std::strtod(format_g9(v).c_str(), nullptr); }

std::string format_exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
}

// 64-bit FNV-1a, used only to name cache files.
std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) {
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

json state_json(const QuantumState& s) { return json{{"n", s.n}, {"l", s.l}, {"m", s.m}}; }

QuantumState state_from(const json& j) {
    return {j.at("n").get<int>(), j.at("l").get<int>(), j.at("m").get<int>()};
}

}  // namespace

OutputFormat parse_format(std::string_view text) {
    if (text == "csv") return OutputFormat::csv;
    if (text == "json") return OutputFormat::json;
    if (text == "plot") return OutputFormat::plot;
    throw ConfigError("unknown output format '" + std::string(text) + "' (csv, json, plot)");
}

const std::vector<QuantumState>& supported_states() {
    static const std::vector<QuantumState> states{{1, 0, 0}, {2, 0, 0}, {2, 1, 0}, {3, 0, 0},
                                                  {3, 1, 0}, {3, 2, 0}, {4, 3, 0}, {5, 4, 0}};
    return states;
}

void SweepConfig::validate() const {
    const auto& ok = supported_states();
    for (const auto& s : states) {
        if (std::find(ok.begin(), ok.end(), s) == ok.end()) {
            throw ConfigError("unsupported state n=" + std::to_string(s.n) + " l=" + std::to_string(s.l) +
                              " m=" + std::to_string(s.m));
        }
    }
    for (double rc : rc_values) {
        if (!(rc > 0.0 && rc <= 1e4)) throw ConfigError("r_c values must lie in (0, 1e4], got " + format_g9(rc));
    }
    for (double q : {alpha, beta}) {
        if (!(q > 0.0) || q == 1.0) throw ConfigError("Renyi orders must be positive and != 1");
    }
    if (b_values.empty()) throw ConfigError("at least one b value is required");
    for (double b : b_values) {
        if (!std::isfinite(b)) throw ConfigError("b values must be finite");
    }
    if (solver.grid_points < 16) throw ConfigError("grid points must be at least 16");
    if (threads > 1024) throw ConfigError("thread count out of range");
}

std::string CacheKey::text() const {
    return state.label() + "|m=" + std::to_string(state.m) + "|rc=" + format_exact(r_c) + "|" + signature;
}

CacheKey make_key(const QuantumState& state, double r_c, const SolverOptions& solver,
                  const MomentumOptions& momentum) {
    return {state, r_c, solver.signature() + "|" + momentum.signature()};
}

// ---- serialization -------------------------------------------------------

std::string serialize_cell(const CacheKey& key, const CellSolutions& cell) {
    const auto& r = cell.radial;
    const auto& m = cell.momentum;
    json j;
    j["schema"] = kCacheSchema;
    j["key"] = key.text();
    j["radial"] = {
        {"state", state_json(r.state)},
        {"r_c", r.r_c},
        {"energy", r.energy},
        {"r", r.r},
        {"weights", r.weights},
        {"values", r.values},
        {"derivatives", r.derivatives},
        {"node_positions", r.node_positions},
        {"panel_edges", r.panel_edges},
        {"norm_constant", number_or_null(r.norm_constant)},
        {"grid_points", r.grid_points},
        {"interpolant",
         {{"r_c", r.interpolant.r_c()},
          {"map_ratio", r.interpolant.map_ratio()},
          {"x", r.interpolant.x_nodes()},
          {"u", r.interpolant.u_values()}}},
    };
    j["momentum"] = {
        {"state", state_json(m.state)}, {"r_c", m.r_c},
        {"p", m.p},                     {"weights", m.weights},
        {"values", m.values},           {"p_max", m.p_max},
        {"tail_mass", m.tail_mass},     {"norm_factor", m.norm_factor},
    };
    return j.dump();
}

CellSolutions deserialize_cell(const CacheKey& key, const std::string& text) {
    try {
        const json j = json::parse(text);
        if (j.at("schema").get<int>() != kCacheSchema) throw IoError("cache payload schema mismatch");
        if (j.at("key").get<std::string>() != key.text()) throw IoError("cache payload key mismatch");
        CellSolutions cell;
        const json& jr = j.at("radial");
        auto& r = cell.radial;
        r.state = state_from(jr.at("state"));
        r.r_c = jr.at("r_c").get<double>();
        r.energy = jr.at("energy").get<double>();
        r.r = jr.at("r").get<std::vector<double>>();
        r.weights = jr.at("weights").get<std::vector<double>>();
        r.values = jr.at("values").get<std::vector<double>>();
        r.derivatives = jr.at("derivatives").get<std::vector<double>>();
        r.node_positions = jr.at("node_positions").get<std::vector<double>>();
        r.panel_edges = jr.at("panel_edges").get<std::vector<double>>();
        r.norm_constant = number_from(jr.at("norm_constant"));
        r.grid_points = jr.at("grid_points").get<int>();
        const json& ji = jr.at("interpolant");
        r.interpolant = RadialInterpolant(ji.at("r_c").get<double>(), ji.at("map_ratio").get<double>(),
                                          ji.at("x").get<std::vector<double>>(),
                                          ji.at("u").get<std::vector<double>>());
        const json& jm = j.at("momentum");
        auto& m = cell.momentum;
        m.state = state_from(jm.at("state"));
        m.r_c = jm.at("r_c").get<double>();
        m.p = jm.at("p").get<std::vector<double>>();
        m.weights = jm.at("weights").get<std::vector<double>>();
        m.values = jm.at("values").get<std::vector<double>>();
        m.p_max = jm.at("p_max").get<double>();
        m.tail_mass = jm.at("tail_mass").get<double>();
        m.norm_factor = jm.at("norm_factor").get<double>();
        const bool sizes_ok = r.r.size() == r.weights.size() && r.r.size() == r.values.size() &&
                              r.r.size() == r.derivatives.size() && m.p.size() == m.weights.size() &&
                              m.p.size() == m.values.size() && !r.r.empty() && !m.p.empty();
        if (!sizes_ok) throw IoError("cache payload has inconsistent array lengths");
        return cell;
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed cache payload: ") + e.what());
    } catch (const Error& e) {
        throw IoError(std::string("invalid cache payload: ") + e.what());
    }
}

// ---- cache ---------------------------------------------------------------

SolutionCache::SolutionCache(std::filesystem::path directory) : directory_(std::move(directory)) {
    if (!directory_.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(directory_, ec);
        if (ec) throw IoError("cannot create cache directory " + directory_.string() + ": " + ec.message());
    }
}

std::filesystem::path SolutionCache::file_for(const CacheKey& key) const {
    char name[40];
    std::snprintf(name, sizeof name, "%016llx.json", static_cast<unsigned long long>(fnv1a(key.text())));
    return directory_ / name;
}

SolutionCache::Payload SolutionCache::load(const CacheKey& key) const {
    if (directory_.empty()) return nullptr;
    const auto path = file_for(key);
    std::ifstream in(path, std::ios::binary);
    if (!in) return nullptr;
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return std::make_shared<const CellSolutions>(deserialize_cell(key, buf.str()));
    } catch (const IoError& e) {
        std::clog << "warning: discarding cache file " << path.string() << ": " << e.what() << "\n";
        return nullptr;
    }
}

void SolutionCache::store(const CacheKey& key, const CellSolutions& cell) const {
    if (directory_.empty()) return;
    const auto path = file_for(key);
    auto tmp = path;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            std::clog << "warning: cannot write cache file " << tmp.string() << "\n";
            return;
        }
        out << serialize_cell(key, cell);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) std::clog << "warning: cannot finalize cache file " << path.string() << ": " << ec.message() << "\n";
}

std::shared_ptr<const CellSolutions> SolutionCache::get_or_compute(const CacheKey& key,
                                                                   const SolverOptions& solver,
                                                                   const MomentumOptions& momentum) {
    std::promise<Payload> promise;
    std::unique_lock lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) {
        auto pending = it->second;
        lock.unlock();
        return pending.get();
    }
    entries_.emplace(key, promise.get_future().share());
    lock.unlock();
    try {
        Payload payload = load(key);
        if (!payload) {
            ++invocations_;
            CellSolutions cell;
            cell.radial = solve_radial(key.state, Confinement{key.r_c}, solver);
            cell.momentum = build_momentum(cell.radial, momentum);
            store(key, cell);
            payload = std::make_shared<const CellSolutions>(std::move(cell));
        }
        promise.set_value(payload);
        return payload;
    } catch (...) {
        promise.set_exception(std::current_exception());
        throw;
    }
}

// ---- sweep ---------------------------------------------------------------

std::vector<CellRecord> run_sweep(const SweepConfig& cfg, SolutionCache& cache) {
    cfg.validate();
    std::vector<CellRecord> records;
    for (const auto& s : cfg.states) {
        for (double rc : cfg.rc_values) records.push_back({s, rc, std::nullopt, std::nullopt, {}});
    }
    parallel_for(records.size(), cfg.threads, [&](std::size_t i) {
        auto& rec = records[i];
        try {
            const auto key = make_key(rec.state, rec.r_c, cfg.solver, cfg.momentum);
            const auto cell = cache.get_or_compute(key, cfg.solver, cfg.momentum);
            rec.measures = assemble_measures(cell->radial, cell->momentum, cfg.alpha, cfg.beta);
            rec.report = assemble_report(*rec.measures, cfg.b_values);
        } catch (const std::exception& e) {
            rec.measures.reset();
            rec.report.reset();
            rec.error = e.what();
            if (rec.error.empty()) rec.error = "unknown failure";
        }
    });
    return records;
}

// ---- output --------------------------------------------------------------

std::vector<OutputRow> flatten(const std::vector<CellRecord>& records) {
    std::vector<OutputRow> rows;
    for (const auto& rec : records) {
        if (!rec.ok() || !rec.report) continue;
        const auto& rep = *rec.report;
        for (const auto& [key, value] : rep.entries) {
            rows.push_back({rec.state.label(), round_g9(rec.r_c), round_g9(rep.alpha), round_g9(rep.beta),
                            round_g9(key.b), std::string(to_string(key.family)),
                            std::string(to_string(key.space)), round_g9(value)});
        }
    }
    return rows;
}

std::string format_csv(const std::vector<OutputRow>& rows) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const auto& r : rows) {
        out += r.state + ',' + format_g9(r.r_c) + ',' + format_g9(r.alpha) + ',' + format_g9(r.beta) + ',' +
               format_g9(r.b) + ',' + r.family + ',' + r.space + ',' + format_g9(r.value) + '\n';
    }
    return out;
}

std::string format_json(const std::vector<OutputRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows) {
        arr.push_back({{"state", r.state},
                       {"r_c", round_g9(r.r_c)},
                       {"alpha", round_g9(r.alpha)},
                       {"beta", round_g9(r.beta)},
                       {"b", round_g9(r.b)},
                       {"family", r.family},
                       {"space", r.space},
                       {"value", round_g9(r.value)}});
    }
    return arr.dump(1) + "\n";
}

std::vector<OutputRow> parse_json(const std::string& text) {
    std::vector<OutputRow> rows;
    try {
        for (const auto& j : json::parse(text)) {
            rows.push_back({j.at("state").get<std::string>(), j.at("r_c").get<double>(),
                            j.at("alpha").get<double>(), j.at("beta").get<double>(), j.at("b").get<double>(),
                            j.at("family").get<std::string>(), j.at("space").get<std::string>(),
                            j.at("value").get<double>()});
        }
    } catch (const json::exception& e) {
        throw IoError(std::string("malformed output JSON: ") + e.what());
    }
    return rows;
}

std::string format_plot_data(const std::vector<CellRecord>& records, Family family, Space space, double b) {
    std::vector<QuantumState> order;
    for (const auto& rec : records) {
        if (std::find(order.begin(), order.end(), rec.state) == order.end()) order.push_back(rec.state);
    }
    std::string out;
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (k > 0) out += "\n\n";
        out += "# " + order[k].label() + " C_" + std::string(to_string(family)) + " space=" +
               std::string(to_string(space)) + " b=" + format_g9(b) + "\n";
        for (const auto& rec : records) {
            if (!(rec.state == order[k]) || !rec.ok() || !rec.report) continue;
            const auto it = rec.report->entries.find({family, space, b});
            if (it == rec.report->entries.end()) continue;
            out += format_g9(rec.r_c) + ' ' + format_g9(it->second) + '\n';
        }
    }
    return out;
}

void emit_output(const std::vector<CellRecord>& records, const SweepConfig& cfg) {
    std::string text;
    switch (cfg.format) {
    case OutputFormat::csv: text = format_csv(flatten(records)); break;
    case OutputFormat::json: text = format_json(flatten(records)); break;
    case OutputFormat::plot:
        text = format_plot_data(records, cfg.plot_family, cfg.plot_space, cfg.plot_b);
        break;
    }
    if (cfg.output_path.empty() || cfg.output_path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(cfg.output_path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open output file " + cfg.output_path);
    out << text;
    out.close();
    if (!out) throw IoError("failed writing output file " + cfg.output_path);
}

// ---- golden tables -------------------------------------------------------

std::filesystem::path default_golden_path() {
    if (const char* env = std::getenv("CHA_GOLDEN"); env && *env) return env;
#ifdef CHA_DATA_DIR
    return std::filesystem::path(CHA_DATA_DIR) / "golden_tables.csv";
#else
    return "data/golden_tables.csv";
#endif
}

std::vector<GoldenRow> load_golden(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("golden data file not found: " + path.string());
    std::vector<GoldenRow> rows;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        if (line_no == 1 && line.rfind("table,", 0) == 0) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(f);
        if (fields.size() != 6) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 6 fields");
        }
        GoldenRow row;
        row.table = fields[0];
        row.state = QuantumState::parse(fields[1]);
        try {
            row.r_c = std::stod(fields[2]);
            for (int k = 0; k < 3; ++k) row.values[k] = std::stod(fields[3 + k]);
        } catch (const std::logic_error&) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": malformed number");
        }
        rows.push_back(row);
    }
    return rows;
}

TableSpec table_spec(std::string_view which) {
    if (which == "I") return {Family::ES, 1.0, 0.003};
    if (which == "II") return {Family::ER, 1.0, 0.005};
    if (which == "III") return {Family::IS, 2.0 / 3.0, 0.003};
    if (which == "III_ref") return {Family::IS, 2.0 / 3.0, 0.005};
    if (which == "IV") return {Family::IR, 2.0 / 3.0, 0.005};
    throw ConfigError("unknown table '" + std::string(which) + "' (I, II, III, III_ref, IV)");
}

bool TableRowResult::passed(double tolerance) const {
    if (!error.empty()) return false;
    return std::all_of(deviation.begin(), deviation.end(),
                       [&](double d) { return std::abs(d) <= tolerance; });
}

bool TableComparison::passed() const {
    return !rows.empty() &&
           std::all_of(rows.begin(), rows.end(), [&](const auto& r) { return r.passed(tolerance); });
}

double TableComparison::worst_deviation() const {
    double worst = 0.0;
    for (const auto& r : rows) {
        if (!r.error.empty()) return std::numeric_limits<double>::infinity();
        for (double d : r.deviation) worst = std::max(worst, std::abs(d));
    }
    return worst;
}

std::string TableComparison::format() const {
    std::ostringstream os;
    char buf[256];
    os << "table " << table << " (tolerance " << tolerance * 100 << "%)\n";
    for (const auto& r : rows) {
        if (!r.error.empty()) {
            os << "  " << r.state.label() << " r_c=" << format_g9(r.r_c) << "  ERROR " << r.error << "\n";
            continue;
        }
        std::snprintf(buf, sizeof buf, "  %-3s r_c=%-6g", r.state.label().c_str(), r.r_c);
        os << buf;
        for (int k = 0; k < 3; ++k) {
            std::snprintf(buf, sizeof buf, "  %14.8g vs %-14.8g %+8.4f%%", r.computed[k], r.expected[k],
                          100.0 * r.deviation[k]);
            os << buf;
        }
        os << (r.passed(tolerance) ? "  ok" : "  FAIL") << "\n";
    }
    std::snprintf(buf, sizeof buf, "worst deviation %.4f%% -> %s\n", 100.0 * worst_deviation(),
                  passed() ? "PASS" : "FAIL");
    os << buf;
    return os.str();
}

TableComparison reproduce_table(std::string_view which, const std::vector<GoldenRow>& golden,
                                SolutionCache& cache, unsigned threads, const SolverOptions& solver,
                                const MomentumOptions& momentum) {
    const TableSpec spec = table_spec(which);
    TableComparison cmp;
    cmp.table = std::string(which);
    cmp.tolerance = spec.tolerance;
    for (const auto& g : golden) {
        if (g.table != which) continue;
        TableRowResult row;
        row.state = g.state;
        row.r_c = g.r_c;
        row.expected = g.values;
        cmp.rows.push_back(row);
    }
    // The tables are built at the conjugate orders alpha = 3/5, beta = 3.
    parallel_for(cmp.rows.size(), threads, [&](std::size_t i) {
        auto& row = cmp.rows[i];
        try {
            const auto cell = cache.get_or_compute(make_key(row.state, row.r_c, solver, momentum), solver, momentum);
            const auto ms = assemble_measures(cell->radial, cell->momentum, 0.6, 3.0);
            const auto rep = assemble_report(ms, {spec.b});
            for (int k = 0; k < 3; ++k) {
                row.computed[k] = rep.at(spec.family, kSpaces[k], spec.b);
                row.deviation[k] = (row.computed[k] - row.expected[k]) / row.expected[k];
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    });
    return cmp;
}

}  // namespace cha
