#include "kmt/clifford.hpp"
#include "kmt/perioddomain.hpp"

#include <doctest.h>

#include <random>

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

QuadraticSpace sig22_space() {
    TotallyRealField F = TotallyRealField::rationals();
    FieldMatrix g(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = F.element(0);
    g(0, 0) = F.element(2);
    g(1, 1) = F.element(2);
    g(2, 2) = F.element(-2);
    g(3, 3) = F.element(-2);
    g(0, 1) = F.element(1);
    g(1, 0) = F.element(1);
    return QuadraticSpace(F, g, 1);
}

} // namespace

TEST_CASE("orthogonalize returns an orthogonal frame, positives first") {
    const QuadraticSpace V = sig12_space();
    const CliffordFrame fr = orthogonalize(V, 0);
    REQUIRE(fr.qvals.size() == 3);
    // diagonal gram: identity change of basis, q-values on the nose
    CHECK(fr.qvals[0] == V.field().element(1));
    CHECK(fr.basis(0, 0) == V.field().element(1));
    CHECK(V.field().sign_at(fr.qvals[0], 0) == 1);
    CHECK(V.field().sign_at(fr.qvals[1], 0) == -1);
    CHECK(V.field().sign_at(fr.qvals[2], 0) == -1);

    // frame columns are orthogonal for the exact inner product
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
            FieldVector vi = fr.basis.col(i), vj = fr.basis.col(j);
            CHECK(V.inner(vi, vj) == V.field().element(0));
        }
}

TEST_CASE("orthogonalize splits an off-diagonal gram") {
    const QuadraticSpace V = sig22_space();
    const CliffordFrame fr = orthogonalize(V, 0);
    // first two q-values positive (the 2x2 block diagonalizes to (1, 3/4)
    // in q-normalization q = <,>/2)
    CHECK(V.field().sign_at(fr.qvals[0], 0) == 1);
    CHECK(V.field().sign_at(fr.qvals[1], 0) == 1);
    CHECK(V.field().sign_at(fr.qvals[2], 0) == -1);
    CHECK(V.field().sign_at(fr.qvals[3], 0) == -1);
    for (size_t i = 0; i < 4; ++i) {
        FieldVector vi = fr.basis.col(static_cast<int>(i));
        CHECK(V.quad(vi) == fr.qvals[i]);
    }
}

TEST_CASE("clifford product relations") {
    const QuadraticSpace V = sig12_space();
    const CliffordContext ctx(V, 0);
    const auto& A = ctx.algebra;

    FieldVector e1(3), e2(3);
    for (int i = 0; i < 3; ++i) {
        e1(i) = V.field().element(i == 0 ? 1 : 0);
        e2(i) = V.field().element(i == 1 ? 1 : 0);
    }
    // frame coordinates of frame vectors are unit vectors; use blades directly
    auto b1 = A.from_vector([&] {
        FieldVector v(3);
        v << V.field().element(1), V.field().element(0), V.field().element(0);
        return v;
    }());
    auto b2 = A.from_vector([&] {
        FieldVector v(3);
        v << V.field().element(0), V.field().element(1), V.field().element(0);
        return v;
    }());

    // anticommutation
    auto p12 = A.mul(b1, b2);
    auto p21 = A.mul(b2, b1);
    CHECK(p12.c[3] == V.field().element(1));
    CHECK(p21.c[3] == V.field().element(-1));

    // v v = q(v) for frame vectors
    auto sq = A.mul(b1, b1);
    CHECK(sq.c[0] == ctx.frame.qvals[0]);
    for (size_t k = 1; k < A.dim(); ++k) CHECK(sq.c[k].is_zero());

    // (e1 e2)^2 = -q(e1) q(e2)
    auto bb = A.mul(p12, p12);
    CHECK(bb.c[0] == -(ctx.frame.qvals[0] * ctx.frame.qvals[1]));

    // associativity on blades
    auto left = A.mul(A.mul(b1, b2), b2);
    auto right = A.mul(b1, A.mul(b2, b2));
    for (size_t k = 0; k < A.dim(); ++k) CHECK(left.c[k] == right.c[k]);
}

TEST_CASE("parity classification") {
    const QuadraticSpace V = sig12_space();
    const CliffordContext ctx(V, 0);
    const auto& A = ctx.algebra;
    auto one = A.scalar(V.field().element(1));
    CHECK(A.is_even(one));

    FieldVector v(3);
    v << V.field().element(1), V.field().element(0), V.field().element(0);
    auto b1 = A.from_vector(v);
    CHECK_FALSE(A.is_even(b1));
    CHECK_FALSE(A.is_even(A.add(one, b1))); // mixed counts as not even
    CHECK(A.is_even(A.mul(b1, b1)));
}

TEST_CASE("vector action preserves the form and composes") {
    const QuadraticSpace V = sig22_space();
    const CliffordContext ctx(V, 0);
    std::mt19937_64 rng(7);

    for (int trial = 0; trial < 25; ++trial) {
        const GSpinData g = random_gspin(V, ctx, rng);
        const GSpinData h = random_gspin(V, ctx, rng);

        // exact isometry: rho^T G rho = G
        const FieldMatrix& G = V.gram();
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                FieldElement s = V.field().element(0);
                for (int k = 0; k < 4; ++k)
                    for (int l = 0; l < 4; ++l) s = s + g.rho(k, i) * G(k, l) * g.rho(l, j);
                CHECK(s == G(i, j));
            }

        // composition: rho(gh) = rho(g) rho(h)
        GSpinElement<FieldElement> gh;
        gh.g = ctx.algebra.mul(g.exact.g, h.exact.g);
        gh.ginv = ctx.algebra.mul(h.exact.ginv, g.exact.ginv);
        const FieldMatrix lhs = rho_matrix(V, ctx, gh);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                FieldElement s = V.field().element(0);
                for (int k = 0; k < 4; ++k) s = s + g.rho(i, k) * h.rho(k, j);
                CHECK(s == lhs(i, j));
            }
    }
}

TEST_CASE("is_gspin accepts vector pairs and rejects odd elements") {
    const QuadraticSpace V = sig12_space();
    const CliffordFrame fr = orthogonalize(V, 0);
    std::vector<double> qd;
    for (const auto& q : fr.qvals) qd.push_back(V.field().embed(q, 0));
    CliffordAlgebra<double> A(qd);

    Eigen::VectorXd v(3), w(3);
    v << 1.0, 0.5, 0.0;
    w << 2.0, 0.0, 0.25;
    GSpinElement<double> g;
    const double qv = qd[0] * v(0) * v(0) + qd[1] * v(1) * v(1) + qd[2] * v(2) * v(2);
    const double qw = qd[0] * w(0) * w(0) + qd[1] * w(1) * w(1) + qd[2] * w(2) * w(2);
    g.g = A.mul(A.from_vector(v), A.from_vector(w));
    g.ginv = A.mul(A.from_vector(w / qw), A.from_vector(v / qv));
    CHECK(is_gspin(A, g.g));

    CHECK_FALSE(is_gspin(A, A.from_vector(v))); // odd
}

TEST_CASE("R is GSpin invariant across the period domain") {
    const QuadraticSpace V = sig12_space();
    const CliffordContext ctx(V, 0);
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ux(-2.0, 2.0);

    Eigen::VectorXd a(3), b(3);
    a << 0.3, 1.0, 0.0;
    b << -0.2, 0.0, 1.0;
    const PeriodPoint tau = make_period_point(V, 0, a, b);

    for (int trial = 0; trial < 40; ++trial) {
        const GSpinData g = random_gspin(V, ctx, rng, 4);
        const Eigen::MatrixXd rho = embed_matrix(V.field(), g.rho, 0);
        const PeriodPoint gtau = act(V, rho, tau);
        Eigen::VectorXd x(3);
        for (int c = 0; c < 3; ++c) x(c) = ux(rng);
        const double r0 = majorant_R(V, tau, x);
        const double r1 = majorant_R(V, gtau, rho * x);
        CHECK(std::abs(r1 - r0) <= 1e-9 * std::max(1.0, std::abs(r0)));
    }
}
