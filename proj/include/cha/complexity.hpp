#pragma once

// Complexities C = A exp(b B) built from an order factor A (Onicescu E or
// Fisher I) and a disorder factor B (Shannon S or Renyi R).

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cha/measures.hpp"

namespace cha {

enum class Family { ES, ER, IS, IR };
enum class Space { r, p, t };

std::string_view to_string(Family f);
std::string_view to_string(Space s);
Family parse_family(std::string_view text);
Space parse_space(std::string_view text);

inline constexpr Family kFamilies[] = {Family::ES, Family::ER, Family::IS, Family::IR};
inline constexpr Space kSpaces[] = {Space::r, Space::p, Space::t};

/// A exp(b B). Throws DomainError for A <= 0 or non-finite B.
double complexity_value(double A, double B, double b);

/// Order factor (E or I) of a family in one space.
double order_factor(const MeasureSet& ms, Family f, Space s);
/// Disorder factor (S or R) of a family in one space.
double disorder_factor(const MeasureSet& ms, Family f, Space s);

/// 1 for b = 2/3, 2 for b = 1, nothing otherwise.
std::optional<int> superscript(double b);

struct ComplexityKey {
    Family family = Family::ES;
    Space space = Space::r;
    double b = 1.0;

    friend bool operator==(const ComplexityKey&, const ComplexityKey&) = default;
    friend auto operator<=>(const ComplexityKey&, const ComplexityKey&) = default;
};

struct ComplexityReport {
    QuantumState state;
    double r_c = 0.0;
    double alpha = 0.6;
    double beta = 3.0;
    std::map<ComplexityKey, double> entries;

    /// Throws std::out_of_range if the entry was not computed.
    double at(Family f, Space s, double b) const { return entries.at({f, s, b}); }
};

inline const std::vector<double> kDefaultB{2.0 / 3.0, 1.0};

ComplexityReport assemble_report(const MeasureSet& ms, const std::vector<double>& b_list = kDefaultB);

}  // namespace cha
