#include "kmt/greens.hpp"
#include "kmt/lattice.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

namespace {

using namespace kmt;

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

PeriodPoint tilted_tau(const QuadraticSpace& V) {
    Eigen::VectorXd a(3), b(3);
    a << 0.55, 1.0, 0.0;
    b << 0.0, 0.0, 1.0;
    return make_period_point(V, 0, a, b);
}

double simpson(const std::function<double(double)>& fn, double a, double b) {
    const double c = 0.5 * (a + b);
    return (b - a) / 6.0 * (fn(a) + 4.0 * fn(c) + fn(b));
}

double adaptive_simpson(const std::function<double(double)>& fn, double a, double b, double tol,
                        int depth) {
    const double c = 0.5 * (a + b);
    const double whole = simpson(fn, a, b);
    const double halves = simpson(fn, a, c) + simpson(fn, c, b);
    if (depth <= 0 || std::abs(whole - halves) < 15.0 * tol) return halves + (halves - whole) / 15.0;
    return adaptive_simpson(fn, a, c, 0.5 * tol, depth - 1) +
           adaptive_simpson(fn, c, b, 0.5 * tol, depth - 1);
}

} // namespace

TEST_CASE("exponential integral against an independent quadrature") {
    // f(t) = int_1^inf e^{-tu}/u du; integrate to 60 where the tail is < 1e-25
    auto integrand = [](double u) { return std::exp(-u) / u; };
    const double oracle = adaptive_simpson(integrand, 1.0, 60.0, 1e-16, 40);
    CHECK(std::abs(exp_integral_f(1.0) - oracle) < 1e-12);
}

TEST_CASE("exponential integral frozen values and branch seam") {
    CHECK(exp_integral_f(1.0) == doctest::Approx(0.21938393439552027).epsilon(1e-14));
    CHECK(exp_integral_f(2.0 * 3.14159265358979323846) ==
          doctest::Approx(2.6042058639613059e-4).epsilon(1e-12));
    CHECK(exp_integral_f(10.0) == doctest::Approx(4.1569689296853243e-6).epsilon(1e-12));
    // series/continued-fraction seam is continuous
    CHECK(std::abs(exp_integral_f(1.5 - 1e-10) - exp_integral_f(1.5 + 1e-10)) < 1e-9);
    // small-argument behavior f(t) = -log t - gamma + t + O(t^2)
    const double t = 1e-8;
    CHECK(std::abs(exp_integral_f(t) + std::log(t) + 0.57721566490153286 - t) < 1e-10);
    CHECK_THROWS(exp_integral_f(0.0));
    CHECK_THROWS(exp_integral_f(-1.0));
}

TEST_CASE("green eta0 is f of 2 pi R") {
    const QuadraticSpace V = sig12_space();
    Eigen::VectorXd a = Eigen::VectorXd::Zero(3), b = Eigen::VectorXd::Zero(3);
    a(1) = 1.0;
    b(2) = 1.0;
    const PeriodPoint tau = make_period_point(V, 0, a, b);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
    x(1) = 1.0; // R = 1
    CHECK(green_eta0(V, tau, x) == doctest::Approx(2.6042058639613059e-4).epsilon(1e-10));
    // singular on the locus R = 0
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(3);
    x0(0) = 1.0;
    CHECK_THROWS(green_eta0(V, tau, x0));
}

TEST_CASE("star expansion closed form vs recursion, with hand-checked words") {
    for (int N = 1; N <= 6; ++N) CHECK(star_expansion(N) == star_expansion_recursive(N));

    const auto words = star_expansion(3);
    REQUIRE(words.size() == 3);
    using K = StarSymbolKind;
    const StarWord w0 = {{K::F, 0}, {K::Delta, 1}, {K::Delta, 2}};
    const StarWord w1 = {{K::Phi, 0}, {K::F, 1}, {K::Delta, 2}};
    const StarWord w2 = {{K::Phi, 0}, {K::Phi, 1}, {K::F, 2}};
    CHECK(words[0] == w0);
    CHECK(words[1] == w1);
    CHECK(words[2] == w2);

    CHECK_THROWS(star_expansion(0));
}

TEST_CASE("eta2 terms carry the singular structure of the tuple") {
    const QuadraticSpace V = sig12_space();
    Eigen::VectorXd a = Eigen::VectorXd::Zero(3), b = Eigen::VectorXd::Zero(3);
    a(1) = 1.0;
    b(2) = 1.0;
    const PeriodPoint tau = make_period_point(V, 0, a, b);
    const std::vector<KMFrame> frames = {make_km_frame(V, tau)};

    VectorTuple xs = {field_vector({0, 1, 0}), field_vector({1, 0, 0})};
    // slot 1 has R = 0: the word placing f there is singular
    CHECK_THROWS(eta2_value(V, xs, {tau}, frames, true));

    const auto terms = eta2_value(V, xs, {tau}, frames, false);
    REQUIRE(terms.size() == 2);
    // word 0 = f_0 delta_1: healthy f at 2 pi R = 2 pi, delta on its locus
    CHECK(terms[0].f_slot == 0);
    CHECK_FALSE(terms[0].f_singular);
    CHECK(terms[0].f_value == doctest::Approx(2.6042058639613059e-4).epsilon(1e-10));
    REQUIRE(terms[0].delta_slots == std::vector<int>{1});
    REQUIRE(terms[0].delta_on_locus.size() == 1);
    CHECK(terms[0].delta_on_locus[0]);
    // word 1 = phi_0 f_1: the f factor is singular and carries no deltas
    CHECK(terms[1].f_slot == 1);
    CHECK(terms[1].f_singular);
    CHECK(terms[1].delta_slots.empty());
}

TEST_CASE("eta3 partial sums are monotone with decaying tails") {
    const QuadraticSpace V = sig12_space();
    const PeriodPoint tau = tilted_tau(V);
    const OLattice L = olattice_standard(V);
    const std::vector<KMFrame> frames = {make_km_frame(V, tau)};
    FieldVector x = field_vector({1, 0, 0});

    // fiber shells for q = 1 sit near z = 0.43 and z = 4.2 at this tau
    const std::vector<double> radii = {1.0, 3.0, 5.0};
    const ConvergenceReport rep = eta3_partial_sums(L, {x}, {tau}, {frames[0]}, radii);
    REQUIRE(rep.partial_sums.size() == 3);
    CHECK(rep.term_count > 0);
    CHECK_FALSE(rep.fiber_complete);
    for (size_t i = 1; i < 3; ++i) CHECK(rep.partial_sums[i] >= rep.partial_sums[i - 1]);
    for (size_t i = 1; i < 3; ++i) CHECK(rep.tail_estimates[i] <= rep.tail_estimates[i - 1]);
    CHECK(rep.tail_estimates[2] > 0.0);
}

TEST_CASE("count growth matches the brute-force count and the rank") {
    const TotallyRealField F = TotallyRealField::rationals();
    FieldMatrix g(2, 2);
    g(0, 0) = F.element(2);
    g(0, 1) = F.element(0);
    g(1, 0) = F.element(0);
    g(1, 1) = F.element(2);
    const QuadraticSpace V(F, g, 0);
    const OLattice L = olattice_standard(V);

    const CountReport rep = count_bounded_R(L, {}, {2.0, 4.0, 8.0, 16.0});
    // oracle at N = 2: q <= 1 + 2N = 5
    long expect = 0;
    for (int x = -3; x <= 3; ++x)
        for (int y = -3; y <= 3; ++y)
            if (x * x + y * y <= 5) ++expect;
    CHECK(rep.counts[0] == expect);
    // rank-2 definite: count ~ N, slope near 1
    CHECK(rep.fitted_exponent > 0.7);
    CHECK(rep.fitted_exponent < 1.3);
}

TEST_CASE("indefinite count diagnostic has the (n+2)/2 slope") {
    const QuadraticSpace V = sig12_space();
    const OLattice L = olattice_standard(V);
    const PeriodPoint tau = tilted_tau(V);
    const CountReport rep = count_bounded_R(L, {tau}, {4.0, 8.0, 16.0, 32.0});
    CHECK(rep.fitted_exponent > 1.1);
    CHECK(rep.fitted_exponent < 1.9);
}

TEST_CASE("ddc check is small away from the singular locus") {
    const QuadraticSpace V = sig12_space();
    const Chart chart = chart_make(V, 0);
    Eigen::VectorXcd w0(1);
    w0(0) = std::complex<double>(1.15, 0.25);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(3);
    x(0) = 1.0;
    const double dev = ddc_check(V, x, 0, chart, w0, 4, 1e-3);
    CHECK(dev < 5e-3);
}
