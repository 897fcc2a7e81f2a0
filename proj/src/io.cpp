#include "kmt/io.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace kmt::io {

namespace {

Rational parse_rational(const nlohmann::json& j) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_string()) {
        mpq_class q(j.get<std::string>());
        q.canonicalize();
        return q;
    }
    throw std::invalid_argument("expected an integer or a \"p/q\" string");
}

std::string mask_string(unsigned mask) {
    std::string out;
    for (int i = 0; i < 32; ++i)
        if (mask & (1u << i)) {
            if (!out.empty()) out += "+";
            out += std::to_string(i + 1);
        }
    return out;
}

} // namespace

TotallyRealField parse_field(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("degree"))
        throw std::invalid_argument("field: need {\"degree\": 1|2}");
    const int deg = j.at("degree").get<int>();
    if (deg == 1) return TotallyRealField::rationals();
    if (deg == 2) {
        if (!j.contains("D")) throw std::invalid_argument("field: degree 2 needs \"D\"");
        return TotallyRealField::real_quadratic(j.at("D").get<long>());
    }
    throw std::invalid_argument("field: degree must be 1 or 2");
}

FieldElement parse_field_element(const nlohmann::json& j, const TotallyRealField& F) {
    if (j.is_object()) {
        const Rational a = j.contains("a") ? parse_rational(j.at("a")) : Rational(0);
        const Rational b = j.contains("b") ? parse_rational(j.at("b")) : Rational(0);
        return F.element(a, b);
    }
    return F.element(parse_rational(j));
}

QuadraticSpace parse_space(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("gram")) throw std::invalid_argument("space: need \"gram\"");
    const TotallyRealField F =
        j.contains("field") ? parse_field(j.at("field")) : TotallyRealField::rationals();
    const auto& gram = j.at("gram");
    if (!gram.is_array() || gram.empty()) throw std::invalid_argument("space: gram must be a matrix");
    const int n = static_cast<int>(gram.size());
    FieldMatrix G(n, n);
    for (int i = 0; i < n; ++i) {
        if (!gram[i].is_array() || static_cast<int>(gram[i].size()) != n)
            throw std::invalid_argument("space: gram must be square");
        for (int k = 0; k < n; ++k) G(i, k) = parse_field_element(gram[i][k], F);
    }
    const int e = j.value("e", 0);
    return QuadraticSpace(F, G, e);
}

OLattice parse_lattice(const nlohmann::json& j) {
    if (j.is_object() && j.contains("space")) {
        const QuadraticSpace V = parse_space(j.at("space"));
        if (!j.contains("zbasis")) return olattice_standard(V);
        const auto& zb = j.at("zbasis");
        if (!zb.is_array() || zb.empty()) throw std::invalid_argument("lattice: zbasis must be a list");
        std::vector<FieldVector> basis;
        for (const auto& row : zb) {
            if (!row.is_array() || static_cast<int>(row.size()) != V.dim())
                throw std::invalid_argument("lattice: zbasis vector has wrong length");
            FieldVector v(V.dim());
            for (int i = 0; i < V.dim(); ++i) v(i) = parse_field_element(row[i], V.field());
            basis.push_back(std::move(v));
        }
        return make_olattice(V, basis);
    }
    return olattice_standard(parse_space(j));
}

PeriodPoint parse_period_point(const nlohmann::json& j, const QuadraticSpace& V) {
    if (!j.is_object() || !j.contains("alpha") || !j.contains("beta"))
        throw std::invalid_argument("period point: need {\"place\", \"alpha\", \"beta\"}");
    const int place = j.value("place", 0);
    const auto& ja = j.at("alpha");
    const auto& jb = j.at("beta");
    if (static_cast<int>(ja.size()) != V.dim() || static_cast<int>(jb.size()) != V.dim())
        throw std::invalid_argument("period point: alpha/beta length mismatch");
    Eigen::VectorXd a(V.dim()), b(V.dim());
    for (int i = 0; i < V.dim(); ++i) {
        a(i) = ja[i].get<double>();
        b(i) = jb[i].get<double>();
    }
    return make_period_point(V, place, a, b);
}

PolyPeriodPoint parse_taus(const nlohmann::json& j, const QuadraticSpace& V) {
    if (!j.is_array() || static_cast<int>(j.size()) != V.e())
        throw std::invalid_argument("taus: need one period point per indefinite place");
    PolyPeriodPoint taus;
    for (int p = 0; p < V.e(); ++p) {
        taus.push_back(parse_period_point(j[p], V));
        if (taus.back().place != p) throw std::invalid_argument("taus: places must be 0..e-1 in order");
    }
    return taus;
}

nlohmann::json field_element_json(const FieldElement& x) {
    nlohmann::json j;
    j["a"] = x.a.get_str();
    j["b"] = x.b.get_str();
    return j;
}

nlohmann::json form_value_json(const ExteriorFormValue& v) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, c] : v.terms())
        j[mask_string(key.first) + "|" + mask_string(key.second)] = c;
    return j;
}

std::string places_key_string(const std::vector<std::pair<unsigned, unsigned>>& key) {
    std::string out;
    for (const auto& [s1, s2] : key) {
        if (!out.empty()) out += "&";
        out += mask_string(s1) + "|" + mask_string(s2);
    }
    return out;
}

nlohmann::json places_sum_json(const PlacesFormSum& s) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [key, c] : s.terms) {
        nlohmann::json pair = nlohmann::json::array();
        pair.push_back(c.real());
        pair.push_back(c.imag());
        j[places_key_string(key)] = pair;
    }
    return j;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_qexpansion_csv(std::ostream& os, const QExpansion& q) {
    os << "# radius=" << format_double(q.radius) << " tail_bound=" << format_double(q.tail_bound)
       << "\n";
    os << "T,Re,Im\n";
    for (const auto& [key, c] : q.coefficients)
        os << key << "," << format_double(c.real()) << "," << format_double(c.imag()) << "\n";
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& rep) {
    os << "# fitted_exponent=" << format_double(rep.fitted_exponent)
       << " skipped_singular=" << rep.skipped_singular << " terms=" << rep.term_count
       << " complete=" << (rep.fiber_complete ? 1 : 0) << "\n";
    os << "radius,partial_sum,tail_estimate\n";
    for (size_t i = 0; i < rep.radii.size(); ++i)
        os << format_double(rep.radii[i]) << "," << format_double(rep.partial_sums[i]) << ","
           << format_double(rep.tail_estimates[i]) << "\n";
}

void write_count_csv(std::ostream& os, const CountReport& rep) {
    os << "# fitted_exponent=" << format_double(rep.fitted_exponent)
       << " q_ref=" << format_double(rep.q_ref) << "\n";
    os << "N,count\n";
    for (size_t i = 0; i < rep.Ns.size(); ++i)
        os << format_double(rep.Ns[i]) << "," << rep.counts[i] << "\n";
}

void write_enumeration_csv(std::ostream& os, const OLattice& L,
                           const std::vector<EnumeratedVector>& pts) {
    const TotallyRealField& F = L.space.field();
    os << "coords,qmaj";
    for (int p = 0; p < F.degree(); ++p) os << ",q" << (p + 1);
    os << "\n";
    for (const auto& ev : pts) {
        for (int i = 0; i < ev.coords.size(); ++i) os << (i ? " " : "") << ev.coords(i);
        os << "," << format_double(ev.qmaj);
        const FieldElement q = L.space.quad(lattice_vector(L, ev.coords));
        for (int p = 0; p < F.degree(); ++p) os << "," << format_double(F.embed(q, p));
        os << "\n";
    }
}

} // namespace kmt::io
