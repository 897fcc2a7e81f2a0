#include "kmt/kmform.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <map>
#include <random>
#include <vector>

namespace {

using namespace kmt;

constexpr double kPi = 3.14159265358979323846;

QuadraticSpace sig12_space() {
    TotallyRealField F = TotallyRealField::rationals();
    FieldMatrix g(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) g(i, j) = F.element(0);
    g(0, 0) = F.element(2);
    g(1, 1) = F.element(-2);
    g(2, 2) = F.element(-2);
    return QuadraticSpace(F, g, 1);
}

QuadraticSpace sig22_diag() {
    TotallyRealField F = TotallyRealField::rationals();
    FieldMatrix g(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = F.element(0);
    g(0, 0) = F.element(2);
    g(1, 1) = F.element(2);
    g(2, 2) = F.element(-2);
    g(3, 3) = F.element(-2);
    return QuadraticSpace(F, g, 1);
}

PeriodPoint tilted_tau(const QuadraticSpace& V) {
    Eigen::VectorXd a(3), b(3);
    a << 0.55, 1.0, 0.0;
    b << 0.0, 0.0, 1.0;
    return make_period_point(V, 0, a, b);
}

// Independent exterior-algebra oracle: monomials as sorted generator lists
// over a single alphabet (omega_{1,i} -> 2i, omega_{2,i} -> 2i+1), signs by
// explicit bubble transposition count.
using Mono = std::vector<int>;

int sort_sign(Mono& m) {
    int sign = 1;
    for (size_t i = 1; i < m.size(); ++i)
        for (size_t j = i; j > 0 && m[j - 1] > m[j]; --j) {
            std::swap(m[j - 1], m[j]);
            sign = -sign;
        }
    for (size_t i = 1; i < m.size(); ++i)
        if (m[i - 1] == m[i]) return 0;
    return sign;
}

std::map<Mono, double> oracle_of(const ExteriorFormValue& v) {
    std::map<Mono, double> out;
    for (const auto& [key, c] : v.terms()) {
        Mono m;
        for (int i = 0; i < 16; ++i)
            if (key.first & (1u << i)) m.push_back(2 * i);
        for (int i = 0; i < 16; ++i)
            if (key.second & (1u << i)) m.push_back(2 * i + 1);
        // bring to the sorted normal form of the oracle alphabet
        int s = sort_sign(m);
        if (s != 0 && c != 0.0) out[m] += s * c;
    }
    for (auto it = out.begin(); it != out.end();)
        it = (it->second == 0.0) ? out.erase(it) : std::next(it);
    return out;
}

std::map<Mono, double> oracle_wedge(const std::map<Mono, double>& a,
                                    const std::map<Mono, double>& b) {
    std::map<Mono, double> out;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b) {
            Mono m = ma;
            m.insert(m.end(), mb.begin(), mb.end());
            const int s = sort_sign(m);
            if (s != 0) out[m] += s * ca * cb;
        }
    for (auto it = out.begin(); it != out.end();)
        it = (std::abs(it->second) < 1e-15) ? out.erase(it) : std::next(it);
    return out;
}

ExteriorFormValue random_form(std::mt19937_64& rng, int n, int max_terms) {
    std::uniform_int_distribution<unsigned> mask(0, (1u << n) - 1);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    ExteriorFormValue v;
    for (int t = 0; t < max_terms; ++t) v.add_term(mask(rng), mask(rng), coef(rng));
    return v;
}

} // namespace

TEST_CASE("wedge agrees with the brute-force Grassmann oracle") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const ExteriorFormValue a = random_form(rng, 3, 3);
        const ExteriorFormValue b = random_form(rng, 3, 3);
        const auto got = oracle_of(wedge(a, b));
        const auto expect = oracle_wedge(oracle_of(a), oracle_of(b));
        REQUIRE(got.size() == expect.size());
        for (const auto& [m, c] : expect) {
            REQUIRE(got.count(m) == 1);
            CHECK(got.at(m) == doctest::Approx(c).epsilon(1e-12));
        }
    }
}

TEST_CASE("wedge basics: anticommutation and nilpotency in degree (1,0)") {
    ExteriorFormValue a, b;
    a.add_term(1u << 0, 0, 1.0); // omega_{1,1}
    b.add_term(1u << 1, 0, 1.0); // omega_{1,2}
    const ExteriorFormValue ab = wedge(a, b);
    const ExteriorFormValue ba = wedge(b, a);
    CHECK(ab.coefficient((1u << 0) | (1u << 1), 0) == 1.0);
    CHECK(ba.coefficient((1u << 0) | (1u << 1), 0) == -1.0);
    CHECK(wedge(a, a).terms().empty());
}

TEST_CASE("km_phi1 matches the closed formula") {
    // frame vector y = (y1, y2, y3) with n = 1: R = (y2^2 + y3^2)/2
    Eigen::VectorXd y(3);
    y << 1.3, 0.4, -0.2;
    const double R = 0.5 * (0.16 + 0.04);
    const ExteriorFormValue v = km_phi1(y, 1);
    const double expect = std::exp(-2.0 * kPi * R) * (1.3 * 1.3 - 0.5 / kPi);
    CHECK(v.coefficient(1u, 1u) == doctest::Approx(expect).epsilon(1e-13));
    CHECK(v.terms().size() == 1);

    // at the origin only the -1/(2 pi) term survives
    const ExteriorFormValue z = km_phi1(Eigen::VectorXd::Zero(3), 1);
    CHECK(z.coefficient(1u, 1u) == doctest::Approx(-0.5 / kPi).epsilon(1e-15));

    CHECK_THROWS(km_phi1(Eigen::VectorXd::Zero(2), 1));
}

TEST_CASE("km_phi_m wedges slots and km_zero_form closes the r > n case") {
    Eigen::VectorXd y1(4), y2(4);
    y1 << 0.9, -0.3, 0.1, 0.2;
    y2 << 0.5, 1.1, -0.6, 0.0;
    // n = 2: product of two degree-(1,1) values is degree (2,2)
    const ExteriorFormValue m2 = km_phi_m({y1, y2}, 2);
    for (const auto& [key, c] : m2.terms()) {
        CHECK(std::popcount(key.first) == 2);
        CHECK(std::popcount(key.second) == 2);
    }
    // oracle comparison for the wedge of the two phi1 factors
    const auto expect = oracle_wedge(oracle_of(km_phi1(y1, 2)), oracle_of(km_phi1(y2, 2)));
    const auto got = oracle_of(m2);
    REQUIRE(got.size() == expect.size());
    for (const auto& [m, c] : expect) CHECK(got.at(m) == doctest::Approx(c).epsilon(1e-12));

    CHECK(km_zero_form(1, 1).l1() == doctest::Approx(0.5 / kPi).epsilon(1e-15));
    CHECK(km_zero_form(2, 1).terms().empty()); // r > n vanishes
    // r = 2, n = 2: ((1/2pi)^2 times the full top form, both orders)
    const ExteriorFormValue z22 = km_zero_form(2, 2);
    CHECK(z22.l1() > 0.0);
    for (const auto& [key, c] : z22.terms()) {
        CHECK(std::popcount(key.first) == 2);
        CHECK(std::popcount(key.second) == 2);
    }
}

TEST_CASE("km frame inverts correctly and carries the (+,-,-) gram") {
    const QuadraticSpace V = sig12_space();
    const PeriodPoint tau = tilted_tau(V);
    const KMFrame fr = make_km_frame(V, tau);
    CHECK(fr.n == 1);
    CHECK((fr.to_frame * fr.frame - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() <
          1e-10);

    // frame coordinates recover R as half the negative-part square sum
    Eigen::VectorXd x(3);
    x << 1.0, 0.2, -0.7;
    const Eigen::VectorXd y = frame_coords(fr, x);
    CHECK(0.5 * (y(1) * y(1) + y(2) * y(2)) ==
          doctest::Approx(majorant_R(V, tau, x)).epsilon(1e-11));
    // and the majorant form as half the euclidean square: the frame gram is
    // diag(1,-1,-1) in the bilinear form, so q is half the signed square sum
    CHECK(0.5 * y.squaredNorm() ==
          doctest::Approx(V.quad_embedded(0, x) + 2.0 * majorant_R(V, tau, x)).epsilon(1e-11));
}

TEST_CASE("positive-span frames validate orthogonality to the plane") {
    const QuadraticSpace V = sig22_diag();
    Eigen::VectorXd a = Eigen::VectorXd::Zero(4), b = Eigen::VectorXd::Zero(4);
    a(2) = 1.0;
    b(3) = 1.0;
    const PeriodPoint tau = make_period_point(V, 0, a, b);

    Eigen::MatrixXd U(4, 1);
    U << 1.0, 0.0, 0.0, 0.0;
    Eigen::MatrixXd seeds = Eigen::MatrixXd::Identity(4, 4);
    const KMFrame fr = make_km_frame_with_positive_span(V, tau, U, seeds);
    CHECK(fr.n == 2);
    // first frame column is the normalized U direction
    CHECK(std::abs(fr.frame(0, 0)) > 0.5);

    // a U that leaks into the plane is rejected
    Eigen::MatrixXd bad(4, 1);
    bad << 1.0, 0.0, 0.4, 0.0;
    CHECK_THROWS(make_km_frame_with_positive_span(V, tau, bad, seeds));
}

TEST_CASE("evaluate_at composes frame coordinates with km_phi1") {
    const QuadraticSpace V = sig12_space();
    const PeriodPoint tau = tilted_tau(V);
    const KMFrame fr = make_km_frame(V, tau);
    Eigen::VectorXd x(3);
    x << 0.8, -0.1, 0.6;
    const ExteriorFormValue direct = km_phi1(frame_coords(fr, x), 1);
    const ExteriorFormValue via = evaluate_at(fr, x);
    CHECK(via.coefficient(1u, 1u) == doctest::Approx(direct.coefficient(1u, 1u)).epsilon(1e-13));
}

TEST_CASE("omega2 at the zero tuple reproduces the zero form mass") {
    const QuadraticSpace V = sig12_space();
    const PeriodPoint tau = tilted_tau(V);
    const std::vector<KMFrame> frames = {make_km_frame(V, tau)};
    FieldVector zero = field_vector({0, 0, 0});
    const PlacesFormValue w = omega2(V, {zero}, frames);
    REQUIRE(w.size() == 1);
    CHECK(w[0].l1() == doctest::Approx(0.5 / kPi).epsilon(1e-13));
    // wrong frame count is rejected
    CHECK_THROWS(omega2(V, {zero}, {}));
}

TEST_CASE("places sum accumulates tensors with deterministic keys") {
    PlacesFormValue t(1);
    t[0].add_term(1u, 1u, 2.0);
    PlacesFormSum s;
    s.accumulate(t, {1.0, 0.0});
    s.accumulate(t, {0.5, 0.5});
    REQUIRE(s.terms.size() == 1);
    const auto& [key, c] = *s.terms.begin();
    CHECK(key.size() == 1);
    CHECK(c == std::complex<double>(3.0, 1.0));
    CHECK(s.l1() == doctest::Approx(std::abs(c)));

    PlacesFormSum o;
    o.accumulate(t, {1.0, 0.0});
    CHECK(s.max_abs_diff(o) == doctest::Approx(std::abs(std::complex<double>(1.0, 1.0))));
}

TEST_CASE("restriction splits off a gaussian in the positive directions") {
    // n = 2 example: U spanned by e1, tuple from U, plane at the base point
    const QuadraticSpace V = sig22_diag();
    Eigen::VectorXd a = Eigen::VectorXd::Zero(4), b = Eigen::VectorXd::Zero(4);
    a(2) = 1.0;
    b(3) = 1.0;
    const PeriodPoint tau = make_period_point(V, 0, a, b);

    VectorTuple U = {field_vector({1, 0, 0, 0})};
    VectorTuple xs = {field_vector({1, 0, 0, 0}), field_vector({2, 0, 0, 0})};
    const double dev = restriction_splitting_check(V, U, xs, tau);
    CHECK(dev <= 1e-9);
}

TEST_CASE("chart pullback is antisymmetric and closed") {
    const QuadraticSpace V = sig12_space();
    const Chart chart = chart_make(V, 0);
    Eigen::VectorXcd w(1);
    w(0) = std::complex<double>(1.1, 0.2);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
    x(0) = 1.0;

    const auto tangents = chart_tangents(V, chart, w, 1e-4);
    REQUIRE(tangents.size() == 2); // one complex free coordinate
    const PeriodPoint p = chart_point(V, chart, w);
    const KMFrame fr = make_km_frame(V, p);
    const Eigen::MatrixXd P = chart_pullback_2form(evaluate_at(fr, x), tangents, 1);
    CHECK((P + P.transpose()).cwiseAbs().maxCoeff() < 1e-10);

    // top degree on a complex 1-dimensional chart: exterior derivative vanishes
    CHECK(closedness_check(V, chart, w, x, 1e-3) == doctest::Approx(0.0));
}
