#include "kmt/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace kmt {

namespace {

bool lex_less(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a(i) != b(i)) return a(i) < b(i);
    }
    return false;
}

// Restriction-of-scalars coordinates: each FieldElement column entry expands
// into its rational coordinates on the integer basis of O_F.
FieldMatrix rational_coordinate_matrix(const OLattice& L) {
    const TotallyRealField& F = L.space.field();
    const int d = F.degree();
    const int dim = L.space.dim();
    const auto omega = F.integer_basis();
    FieldMatrix M(dim * d, L.zrank());
    for (int k = 0; k < L.zrank(); ++k) {
        for (int c = 0; c < dim; ++c) {
            const FieldElement& x = L.zbasis[k](c);
            if (d == 1) {
                M(c, k) = F.element(x.a);
            } else {
                // x = a + b sqrt(D); omega_2 = s + t sqrt(D) with t != 0.
                const FieldElement& w = omega[1];
                Rational t = w.b;
                Rational beta = x.b / t;
                Rational alpha = x.a - beta * w.a;
                M(2 * c, k) = F.element(alpha);
                M(2 * c + 1, k) = F.element(beta);
            }
        }
    }
    return M;
}

} // namespace

OLattice olattice_standard(const QuadraticSpace& V) {
    const TotallyRealField& F = V.field();
    const auto omega = F.integer_basis();
    std::vector<FieldVector> basis;
    for (int j = 0; j < V.dim(); ++j) {
        for (const FieldElement& w : omega) {
            FieldVector v(V.dim());
            for (int c = 0; c < V.dim(); ++c) v(c) = F.element(0);
            v(j) = w;
            basis.push_back(std::move(v));
        }
    }
    OLattice L{V, std::move(basis)};
    return L;
}

OLattice make_olattice(const QuadraticSpace& V, std::vector<FieldVector> zbasis) {
    const int want = V.field().degree() * V.dim();
    if (static_cast<int>(zbasis.size()) != want)
        throw std::invalid_argument("make_olattice: need degree*dim basis vectors");
    for (const auto& v : zbasis)
        if (v.size() != V.dim())
            throw std::invalid_argument("make_olattice: basis vector dimension mismatch");
    OLattice L{V, std::move(zbasis)};
    if (field_rank(rational_coordinate_matrix(L)) != want)
        throw std::invalid_argument("make_olattice: basis is not full rank over Q");
    return L;
}

Eigen::MatrixXd basis_embedded(const OLattice& L, int place) {
    const TotallyRealField& F = L.space.field();
    Eigen::MatrixXd B(L.space.dim(), L.zrank());
    for (int k = 0; k < L.zrank(); ++k) B.col(k) = embed_vector(F, L.zbasis[k], place);
    return B;
}

Eigen::MatrixXd total_majorant(const OLattice& L, const PolyPeriodPoint& taus) {
    validate_polytau(L.space, taus);
    const TotallyRealField& F = L.space.field();
    const int m = L.zrank();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < F.degree(); ++i) {
        const Eigen::MatrixXd B = basis_embedded(L, i);
        const Eigen::MatrixXd Q = (i < L.space.e())
                                      ? majorant_form(L.space, taus[i])
                                      : Eigen::MatrixXd(0.5 * L.space.gram_embedded(i));
        M += B.transpose() * Q * B;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(M);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("total_majorant: majorant Gram not positive definite");
    return M;
}

FieldVector lattice_vector(const OLattice& L, const Eigen::VectorXi& coords) {
    const TotallyRealField& F = L.space.field();
    FieldVector v(L.space.dim());
    for (int c = 0; c < L.space.dim(); ++c) v(c) = F.element(0);
    for (int k = 0; k < L.zrank(); ++k) {
        if (coords(k) == 0) continue;
        const FieldElement s = F.element(Rational(coords(k)));
        for (int c = 0; c < L.space.dim(); ++c) v(c) = v(c) + s * L.zbasis[k](c);
    }
    return v;
}

std::vector<EnumeratedVector> enumerate_below(const OLattice& L, const PolyPeriodPoint& taus,
                                              double bound, const Eigen::VectorXd& offset,
                                              long max_points) {
    if (bound < 0.0) throw std::invalid_argument("enumerate_below: negative bound");
    const int m = L.zrank();
    Eigen::VectorXd off = offset.size() ? offset : Eigen::VectorXd::Zero(m);
    if (off.size() != m) throw std::invalid_argument("enumerate_below: offset size mismatch");

    const Eigen::MatrixXd M = total_majorant(L, taus);
    const Eigen::MatrixXd R = Eigen::LLT<Eigen::MatrixXd>(M).matrixU();

    std::vector<EnumeratedVector> out;
    Eigen::VectorXi c = Eigen::VectorXi::Zero(m);
    // partial(i) = contribution of rows i..m-1 of |R (c + off)|^2.
    std::vector<double> partial(m + 1, 0.0);
    long visited = 0;

    std::function<void(int)> descend = [&](int i) {
        if (i < 0) {
            const double q = partial[0];
            if (q <= bound) out.push_back({c, q});
            return;
        }
        // Row i residual: R_ii (c_i + off_i) + sum_{j>i} R_ij (c_j + off_j).
        double tail = 0.0;
        for (int j = i + 1; j < m; ++j) tail += R(i, j) * (c(j) + off(j));
        const double room = bound - partial[i + 1];
        if (room < 0.0) return;
        const double half = std::sqrt(room) / R(i, i);
        const double center = -tail / R(i, i) - off(i);
        const long lo = static_cast<long>(std::ceil(center - half - 1e-12));
        const long hi = static_cast<long>(std::floor(center + half + 1e-12));
        for (long ci = lo; ci <= hi; ++ci) {
            if (++visited > max_points)
                throw BudgetExceeded("enumerate_below: point budget exceeded");
            c(i) = static_cast<int>(ci);
            const double row = R(i, i) * (ci + off(i)) + tail;
            partial[i] = partial[i + 1] + row * row;
            if (partial[i] <= bound + 1e-9 * std::max(1.0, bound)) descend(i - 1);
        }
        c(i) = 0;
    };
    descend(m - 1);

    std::sort(out.begin(), out.end(), [](const EnumeratedVector& a, const EnumeratedVector& b) {
        if (a.qmaj != b.qmaj) return a.qmaj < b.qmaj;
        return lex_less(a.coords, b.coords);
    });
    return out;
}

FiberResult fibers_with_T(const OLattice& L, const FieldMatrix& T, const PolyPeriodPoint& taus,
                          double bound, long max_points) {
    const TotallyRealField& F = L.space.field();
    const int r = static_cast<int>(T.rows());
    if (T.cols() != r) throw std::invalid_argument("fibers_with_T: T must be square");
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            if (!(T(i, j) == T(j, i))) throw std::invalid_argument("fibers_with_T: T not symmetric");

    FiberResult result;
    result.complete = (L.space.e() == 0);

    // Per-slot search radius: on the fiber q(x_j) = T_jj the definite part of
    // the majorant contributes exactly tr T_jj; indefinite places add 2R >= 0,
    // so a user bound (or slack) is needed once e > 0.
    std::vector<double> slot_bound(r);
    for (int j = 0; j < r; ++j) {
        double tr = 0.0;
        for (int i = 0; i < F.degree(); ++i) tr += F.embed(T(j, j), i);
        if (bound >= 0.0) {
            slot_bound[j] = bound;
            result.complete = false;
        } else {
            slot_bound[j] = tr + (L.space.e() > 0 ? std::max(8.0, 4.0 * std::abs(tr)) : 1e-6);
        }
        if (slot_bound[j] < 0.0) return result;
    }

    std::vector<std::vector<FieldVector>> candidates(r);
    for (int j = 0; j < r; ++j) {
        for (const auto& ev : enumerate_below(L, taus, slot_bound[j], Eigen::VectorXd(), max_points)) {
            FieldVector y = lattice_vector(L, ev.coords);
            if (L.space.quad(y) == T(j, j)) candidates[j].push_back(std::move(y));
        }
    }

    VectorTuple tuple(r, FieldVector());
    std::function<void(int)> extend = [&](int j) {
        if (j == r) {
            result.tuples.push_back(tuple);
            return;
        }
        for (const auto& y : candidates[j]) {
            bool ok = true;
            for (int i = 0; i < j && ok; ++i)
                ok = (L.space.inner(tuple[i], y) == T(i, j) + T(i, j));
            if (!ok) continue;
            tuple[j] = y;
            extend(j + 1);
        }
    };
    extend(0);
    return result;
}

FieldMatrix trace_gram(const OLattice& L) {
    const TotallyRealField& F = L.space.field();
    const int m = L.zrank();
    FieldMatrix G(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            G(i, j) = F.element(F.trace(L.space.inner(L.zbasis[i], L.zbasis[j])));
    return G;
}

OLattice dual_lattice(const OLattice& L) {
    const TotallyRealField& F = L.space.field();
    const FieldMatrix Ginv = field_inverse(trace_gram(L));
    const int m = L.zrank();
    std::vector<FieldVector> dual;
    dual.reserve(m);
    for (int k = 0; k < m; ++k) {
        FieldVector v(L.space.dim());
        for (int c = 0; c < L.space.dim(); ++c) v(c) = F.element(0);
        for (int j = 0; j < m; ++j) {
            if (Ginv(j, k).is_zero()) continue;
            for (int c = 0; c < L.space.dim(); ++c) v(c) = v(c) + Ginv(j, k) * L.zbasis[j](c);
        }
        dual.push_back(std::move(v));
    }
    return OLattice{L.space, std::move(dual)};
}

bool same_zspan(const OLattice& A, const OLattice& B) {
    if (A.zrank() != B.zrank() || A.space.dim() != B.space.dim()) return false;
    auto integral_coords = [](const OLattice& X, const OLattice& Y) {
        // Solve X-coordinates of every Y basis vector; all must be integers.
        FieldMatrix M = rational_coordinate_matrix(X);
        for (const auto& v : Y.zbasis) {
            OLattice probe{Y.space, {v}};
            FieldMatrix col = rational_coordinate_matrix(probe);
            FieldVector rhs(col.rows());
            for (int i = 0; i < col.rows(); ++i) rhs(i) = col(i, 0);
            FieldVector sol;
            try {
                sol = field_solve(M, rhs);
            } catch (const std::exception&) {
                return false;
            }
            for (int i = 0; i < sol.size(); ++i) {
                if (sol(i).b != 0) return false;
                if (sol(i).a.get_den() != 1) return false;
            }
        }
        return true;
    };
    return integral_coords(A, B) && integral_coords(B, A);
}

} // namespace kmt
