#include "kmt/quadspace.hpp"

#include <doctest.h>

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

// Q(sqrt 5) space with signature (1,2) at the first embedding and (3,0) at
// the second: diagonal entries (2, 2-2w, 2-2w) with w the golden ratio.
QuadraticSpace hilbert_space() {
    TotallyRealField F = TotallyRealField::real_quadratic(5);
    const FieldElement w = F.element(Rational(1, 2), Rational(1, 2));
    FieldMatrix g(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) g(i, j) = F.element(0);
    g(0, 0) = F.element(2);
    g(1, 1) = F.element(2) - F.element(2) * w;
    g(2, 2) = g(1, 1);
    return QuadraticSpace(F, g, 1);
}

} // namespace

TEST_CASE("constructor rejects a non-symmetric gram") {
    TotallyRealField F = TotallyRealField::rationals();
    FieldMatrix g(2, 2);
    g(0, 0) = F.element(2);
    g(0, 1) = F.element(1);
    g(1, 0) = F.element(0);
    g(1, 1) = F.element(2);
    CHECK_THROWS(QuadraticSpace(F, g, 0));
}

TEST_CASE("signatures and profile over Q") {
    const QuadraticSpace V = sig12_space();
    CHECK(V.dim() == 3);
    CHECK(V.e() == 1);
    CHECK(V.signature_at(0) == std::pair<int, int>(1, 2));
    CHECK(V.profile_ok());

    // same gram declared definite fails the profile
    TotallyRealField F = TotallyRealField::rationals();
    QuadraticSpace W(F, V.gram(), 0);
    CHECK_FALSE(W.profile_ok());
}

TEST_CASE("signatures at both places of the Hilbert example") {
    const QuadraticSpace V = hilbert_space();
    CHECK(V.signature_at(0) == std::pair<int, int>(1, 2));
    CHECK(V.signature_at(1) == std::pair<int, int>(3, 0));
    CHECK(V.profile_ok());
}

TEST_CASE("quad is half the inner square") {
    const QuadraticSpace V = sig12_space();
    FieldVector x = field_vector({1, 1, 0});
    CHECK(V.inner(x, x) == V.field().element(0));
    CHECK(V.quad(x) == V.field().element(0));
    FieldVector y = field_vector({2, 1, 1});
    CHECK(V.quad(y) == V.field().element(2)); // 4 - 1 - 1
    CHECK(V.inner(y, y) == V.field().element(4));
}

TEST_CASE("intersection matrix mixes quad on the diagonal and half inner off it") {
    const QuadraticSpace V = sig12_space();
    VectorTuple xs = {field_vector({1, 0, 0}), field_vector({1, 1, 0})};
    const FieldMatrix T = V.intersection_matrix(xs);
    CHECK(T(0, 0) == V.field().element(1));
    CHECK(T(1, 1) == V.field().element(0));
    CHECK(T(0, 1) == V.field().element(1)); // <x1,x2>/2 = 2/2
    CHECK(T(0, 1) == T(1, 0));
}

TEST_CASE("embedded values track the exact form") {
    const QuadraticSpace V = hilbert_space();
    FieldVector x = field_vector({0, 1, 0});
    for (int p = 0; p < 2; ++p) {
        const double exact = V.field().embed(V.quad(x), p);
        Eigen::VectorXd xe = embed_vector(V.field(), x, p);
        CHECK(V.quad_embedded(p, xe) == doctest::Approx(exact).epsilon(1e-14));
    }
    // place 0 negative, place 1 positive for this vector
    CHECK(V.field().sign_at(V.quad(x), 0) == -1);
    CHECK(V.field().sign_at(V.quad(x), 1) == 1);
}

TEST_CASE("congruent diagonalization of an off-diagonal gram") {
    TotallyRealField F = TotallyRealField::rationals();
    FieldMatrix g(2, 2);
    g(0, 0) = F.element(2);
    g(0, 1) = F.element(1);
    g(1, 0) = F.element(1);
    g(1, 1) = F.element(2);
    auto [basis, diag] = congruent_diagonal(g);
    REQUIRE(diag.size() == 2);
    CHECK(diag[0] == F.element(2));
    CHECK(diag[1] == F.element(Rational(3, 2)));
    // columns of basis realize the diagonal: basis^T g basis = diag(diag)
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            FieldElement s = F.element(0);
            for (int k = 0; k < 2; ++k)
                for (int l = 0; l < 2; ++l) s = s + basis(k, i) * g(k, l) * basis(l, j);
            CHECK(s == (i == j ? diag[i] : F.element(0)));
        }
}

TEST_CASE("exact linear algebra helpers") {
    TotallyRealField F = TotallyRealField::real_quadratic(5);
    const FieldElement w = F.element(Rational(1, 2), Rational(1, 2));
    FieldMatrix m(2, 2);
    m << F.element(1), w, w, w * w;
    CHECK(field_rank(m) == 1); // second row is w times the first
    auto ker = field_kernel(m);
    REQUIRE(ker.size() == 1);
    // kernel vector satisfies m k = 0
    for (int r = 0; r < 2; ++r) {
        FieldElement s = F.element(0);
        for (int c = 0; c < 2; ++c) s = s + m(r, c) * ker[0](c);
        CHECK(s == F.element(0));
    }

    FieldMatrix a(2, 2);
    a << F.element(2), F.element(1), F.element(1), F.element(1);
    const FieldMatrix ainv = field_inverse(a);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) {
            FieldElement s = F.element(0);
            for (int k = 0; k < 2; ++k) s = s + a(r, k) * ainv(k, c);
            CHECK(s == F.element(r == c ? 1 : 0));
        }

    FieldVector b(2);
    b << w, F.element(3);
    const FieldVector x = field_solve(a, b);
    for (int r = 0; r < 2; ++r) {
        FieldElement s = F.element(0);
        for (int c = 0; c < 2; ++c) s = s + a(r, c) * x(c);
        CHECK(s == b(r));
    }
}
