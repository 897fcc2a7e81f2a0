#pragma once

// JSON parsing for the input schemas (field, space, lattice, period points)
// and the CSV/JSON writers shared by the command-line tool.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "kmt/genseries.hpp"
#include "kmt/greens.hpp"
#include "kmt/kmform.hpp"
#include "kmt/lattice.hpp"

namespace kmt::io {

// {"degree": 1} or {"degree": 2, "D": squarefree positive}
TotallyRealField parse_field(const nlohmann::json& j);

// Accepts an integer, a "p/q" string, or {"a": ..., "b": ...}.
FieldElement parse_field_element(const nlohmann::json& j, const TotallyRealField& F);

// {"field": {...}, "gram": [[...]], "e": int}
QuadraticSpace parse_space(const nlohmann::json& j);

// {"space": {...}, "zbasis": [[...], ...]}; a bare space object gets the
// standard basis.
OLattice parse_lattice(const nlohmann::json& j);

// {"place": i, "alpha": [...], "beta": [...]}
PeriodPoint parse_period_point(const nlohmann::json& j, const QuadraticSpace& V);

// Array of period points, one per indefinite place in order.
PolyPeriodPoint parse_taus(const nlohmann::json& j, const QuadraticSpace& V);

nlohmann::json field_element_json(const FieldElement& x);

// Exterior value as a flat map "S1|S2" -> coefficient, indices 1-based.
nlohmann::json form_value_json(const ExteriorFormValue& v);

// Component label for a keyed per-place sum: per-place "S1|S2" joined by "&".
std::string places_key_string(const std::vector<std::pair<unsigned, unsigned>>& key);

nlohmann::json places_sum_json(const PlacesFormSum& s);

void write_qexpansion_csv(std::ostream& os, const QExpansion& q);
void write_convergence_csv(std::ostream& os, const ConvergenceReport& rep);
void write_count_csv(std::ostream& os, const CountReport& rep);
void write_enumeration_csv(std::ostream& os, const OLattice& L,
                           const std::vector<EnumeratedVector>& pts);

// Fixed-format float used by every writer; stable across runs.
std::string format_double(double x);

} // namespace kmt::io
