#include "kmt/clifford.hpp"

namespace kmt {

CliffordFrame orthogonalize(const QuadraticSpace& V, int place) {
    auto [c, diag] = congruent_diagonal(V.gram());
    const int d = V.dim();
    // order columns so that q > 0 at the anchor place comes first
    std::vector<int> order;
    for (int pass = 0; pass < 2; ++pass)
        for (int k = 0; k < d; ++k) {
            int s = V.field().sign_at(diag[static_cast<size_t>(k)], place);
            if (s == 0) throw std::domain_error("orthogonalize: degenerate frame");
            if ((pass == 0) == (s > 0)) order.push_back(k);
        }
    CliffordFrame f;
    f.basis = FieldMatrix(d, d);
    f.qvals.resize(static_cast<size_t>(d));
    for (int k = 0; k < d; ++k) {
        f.basis.col(k) = c.col(order[static_cast<size_t>(k)]);
        // diag entries are <b,b>; q-values are half of that
        f.qvals[static_cast<size_t>(k)] =
            diag[static_cast<size_t>(order[static_cast<size_t>(k)])] / FieldElement(2);
    }
    f.to_frame = field_inverse(f.basis);
    f.anchor_place = place;
    return f;
}

CliffordContext::CliffordContext(const QuadraticSpace& V, int place)
    : frame(orthogonalize(V, place)), algebra(frame.qvals) {}

FieldMatrix rho_matrix(const QuadraticSpace& V, const CliffordContext& ctx,
                       const GSpinElement<FieldElement>& g) {
    const int d = V.dim();
    FieldMatrix rho(d, d);
    for (int j = 0; j < d; ++j) {
        FieldVector ej(d);
        for (int r = 0; r < d; ++r) ej(r) = FieldElement(r == j ? 1 : 0);
        FieldVector y = ctx.frame.to_frame * ej;
        FieldVector img = vector_action(ctx.algebra, g, y);
        rho.col(j) = ctx.frame.basis * img;
    }
    return rho;
}

GSpinData random_gspin(const QuadraticSpace& V, const CliffordContext& ctx,
                       std::mt19937_64& rng, int max_factors) {
    const int d = V.dim();
    std::uniform_int_distribution<int> pair_count(1, std::max(1, max_factors / 2));
    std::uniform_int_distribution<int> coord(-3, 3);
    std::uniform_int_distribution<int> den(1, 2);

    const int k = 2 * pair_count(rng);
    std::vector<FieldVector> factors_v;
    std::vector<Eigen::Matrix<FieldElement, Eigen::Dynamic, 1>> factors_frame;
    std::vector<FieldElement> qvals;
    while (static_cast<int>(factors_v.size()) < k) {
        FieldVector v(d);
        for (int r = 0; r < d; ++r) v(r) = FieldElement(rational_of(coord(rng), den(rng)));
        FieldElement q = V.quad(v);
        if (q.is_zero()) continue;
        // keep embedded factors away from the isotropic cone at the anchor place
        double qe = V.field().embed(q, ctx.frame.anchor_place);
        double norm2 = embed_vector(V.field(), v, ctx.frame.anchor_place).squaredNorm();
        if (norm2 == 0 || std::abs(qe) < 0.2 * norm2) continue;
        factors_v.push_back(v);
        factors_frame.push_back((ctx.frame.to_frame * v).eval());
        qvals.push_back(q);
    }
    GSpinData out{gspin_from_factors(ctx.algebra, factors_frame, qvals), FieldMatrix(), factors_v};
    out.rho = rho_matrix(V, ctx, out.exact);
    return out;
}

bool is_gspin(const CliffordAlgebra<double>& A, const CliffordElement<double>& g,
              double tol) {
    const size_t dim = A.dim();
    for (size_t kmask = 0; kmask < dim; ++kmask)
        if ((std::popcount(kmask) & 1) && std::abs(g.c[kmask]) > tol) return false;

    Eigen::MatrixXd L(dim, dim);
    {
        auto Ls = A.left_matrix(g);
        for (size_t r = 0; r < dim; ++r)
            for (size_t c = 0; c < dim; ++c) L(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = Ls(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(L);
    Eigen::VectorXd one = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
    one(0) = 1.0;
    Eigen::VectorXd gi = lu.solve(one);
    if (!gi.allFinite()) return false;
    double residual = (L * gi - one).norm();
    if (residual > 1e-6 * std::max(1.0, gi.norm())) return false;

    CliffordElement<double> ginv(A.generators());
    for (size_t kmask = 0; kmask < dim; ++kmask) ginv.c[kmask] = gi(static_cast<Eigen::Index>(kmask));
    GSpinElement<double> ge{g, ginv};
    for (int i = 0; i < A.generators(); ++i) {
        Eigen::VectorXd ei = Eigen::VectorXd::Zero(A.generators());
        ei(i) = 1.0;
        double off = 0;
        vector_action(A, ge, Eigen::VectorXd(ei), &off);
        if (off > tol) return false;
    }
    return true;
}

CliffordElement<double> embed_element(const TotallyRealField& F,
                                      const CliffordElement<FieldElement>& x, int place) {
    CliffordElement<double> out(x.m);
    for (size_t k = 0; k < x.c.size(); ++k) out.c[k] = F.embed(x.c[k], place);
    return out;
}

CliffordAlgebra<double> embed_algebra(const TotallyRealField& F,
                                      const CliffordContext& ctx, int place) {
    std::vector<double> q(ctx.frame.qvals.size());
    for (size_t k = 0; k < q.size(); ++k) q[k] = F.embed(ctx.frame.qvals[k], place);
    return CliffordAlgebra<double>(q);
}

} // namespace kmt
