#include "cha/complexity.hpp"

#include <cmath>
#include <sstream>

namespace cha {

std::string_view to_string(Family f) {
    switch (f) {
    case Family::ES: return "ES";
    case Family::ER: return "ER";
    case Family::IS: return "IS";
    case Family::IR: return "IR";
    }
    return "?";
}

std::string_view to_string(Space s) {
    switch (s) {
    case Space::r: return "r";
    case Space::p: return "p";
    case Space::t: return "t";
    }
    return "?";
}

Family parse_family(std::string_view text) {
    for (Family f : kFamilies) {
        if (to_string(f) == text) return f;
    }
    throw ConfigError("unknown complexity family '" + std::string(text) + "'");
}

Space parse_space(std::string_view text) {
    for (Space s : kSpaces) {
        if (to_string(s) == text) return s;
    }
    throw ConfigError("unknown space '" + std::string(text) + "'");
}

double complexity_value(double A, double B, double b) {
    if (!(A > 0.0)) {
        std::ostringstream os;
        os << "complexity_value: order factor must be positive, got " << A;
        throw DomainError(os.str());
    }
    if (!std::isfinite(B)) throw DomainError("complexity_value: disorder factor is not finite");
    return A * std::exp(b * B);
}

double order_factor(const MeasureSet& ms, Family f, Space s) {
    const bool onicescu = f == Family::ES || f == Family::ER;
    switch (s) {
    case Space::r: return onicescu ? ms.E_r : ms.I_r;
    case Space::p: return onicescu ? ms.E_p : ms.I_p;
    case Space::t: return onicescu ? ms.E_t : ms.I_t;
    }
    return 0.0;
}

double disorder_factor(const MeasureSet& ms, Family f, Space s) {
    const bool shannon = f == Family::ES || f == Family::IS;
    switch (s) {
    case Space::r: return shannon ? ms.S_r : ms.R_r;
    case Space::p: return shannon ? ms.S_p : ms.R_p;
    case Space::t: return shannon ? ms.S_t : ms.R_t;
    }
    return 0.0;
}

std::optional<int> superscript(double b) {
    if (b == 2.0 / 3.0) return 1;
    if (b == 1.0) return 2;
    return std::nullopt;
}

ComplexityReport assemble_report(const MeasureSet& ms, const std::vector<double>& b_list) {
    if (b_list.empty()) throw ConfigError("assemble_report: empty list of b values");
    ComplexityReport report;
    report.state = ms.state;
    report.r_c = ms.r_c;
    report.alpha = ms.alpha;
    report.beta = ms.beta;
    for (Family f : kFamilies) {
        for (Space s : kSpaces) {
            const double A = order_factor(ms, f, s);
            const double B = disorder_factor(ms, f, s);
            for (double b : b_list) report.entries[{f, s, b}] = complexity_value(A, B, b);
        }
    }
    return report;
}

}  // namespace cha
