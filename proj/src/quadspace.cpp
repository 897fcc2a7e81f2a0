#include "kmt/quadspace.hpp"

namespace kmt {

namespace {

Eigen::Index find_pivot(const FieldMatrix& m, Eigen::Index row, Eigen::Index col) {
    for (Eigen::Index r = row; r < m.rows(); ++r)
        if (!m(r, col).is_zero()) return r;
    return -1;
}

} // namespace

int field_rank(FieldMatrix m) {
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < m.cols() && row < m.rows(); ++col) {
        Eigen::Index p = find_pivot(m, row, col);
        if (p < 0) continue;
        m.row(row).swap(m.row(p));
        for (Eigen::Index r = row + 1; r < m.rows(); ++r) {
            if (m(r, col).is_zero()) continue;
            FieldElement f = m(r, col) / m(row, col);
            for (Eigen::Index c = col; c < m.cols(); ++c) m(r, c) = m(r, c) - f * m(row, c);
        }
        ++row;
    }
    return static_cast<int>(row);
}

std::vector<FieldVector> field_kernel(FieldMatrix m) {
    const Eigen::Index nc = m.cols();
    std::vector<Eigen::Index> pivot_col;
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < nc && row < m.rows(); ++col) {
        Eigen::Index p = find_pivot(m, row, col);
        if (p < 0) continue;
        m.row(row).swap(m.row(p));
        FieldElement inv = FieldElement(1) / m(row, col);
        for (Eigen::Index c = col; c < nc; ++c) m(row, c) = m(row, c) * inv;
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            if (r == row || m(r, col).is_zero()) continue;
            FieldElement f = m(r, col);
            for (Eigen::Index c = col; c < nc; ++c) m(r, c) = m(r, c) - f * m(row, c);
        }
        pivot_col.push_back(col);
        ++row;
    }
    std::vector<bool> is_pivot(nc, false);
    for (Eigen::Index c : pivot_col) is_pivot[c] = true;
    std::vector<FieldVector> basis;
    for (Eigen::Index free = 0; free < nc; ++free) {
        if (is_pivot[free]) continue;
        FieldVector v(nc);
        for (Eigen::Index c = 0; c < nc; ++c) v(c) = FieldElement(0);
        v(free) = FieldElement(1);
        for (size_t r = 0; r < pivot_col.size(); ++r)
            v(pivot_col[r]) = -m(static_cast<Eigen::Index>(r), free);
        basis.push_back(v);
    }
    return basis;
}

FieldVector field_solve(FieldMatrix a, FieldVector b) {
    const Eigen::Index nn = a.rows();
    if (a.cols() != nn || b.size() != nn) throw std::domain_error("field_solve: shape mismatch");
    for (Eigen::Index col = 0; col < nn; ++col) {
        Eigen::Index p = find_pivot(a, col, col);
        if (p < 0) throw std::domain_error("field_solve: singular matrix");
        a.row(col).swap(a.row(p));
        std::swap(b(col), b(p));
        FieldElement inv = FieldElement(1) / a(col, col);
        for (Eigen::Index c = col; c < nn; ++c) a(col, c) = a(col, c) * inv;
        b(col) = b(col) * inv;
        for (Eigen::Index r = 0; r < nn; ++r) {
            if (r == col || a(r, col).is_zero()) continue;
            FieldElement f = a(r, col);
            for (Eigen::Index c = col; c < nn; ++c) a(r, c) = a(r, c) - f * a(col, c);
            b(r) = b(r) - f * b(col);
        }
    }
    return b;
}

FieldMatrix field_inverse(const FieldMatrix& a) {
    const Eigen::Index nn = a.rows();
    FieldMatrix out(nn, nn);
    for (Eigen::Index c = 0; c < nn; ++c) {
        FieldVector e(nn);
        for (Eigen::Index r = 0; r < nn; ++r) e(r) = FieldElement(r == c ? 1 : 0);
        out.col(c) = field_solve(a, e);
    }
    return out;
}

std::pair<FieldMatrix, std::vector<FieldElement>> congruent_diagonal(FieldMatrix g) {
    const Eigen::Index nn = g.rows();
    if (g.cols() != nn) throw std::domain_error("congruent_diagonal: not square");
    FieldMatrix c(nn, nn);
    for (Eigen::Index r = 0; r < nn; ++r)
        for (Eigen::Index s = 0; s < nn; ++s) c(r, s) = FieldElement(r == s ? 1 : 0);

    auto add_col = [&](Eigen::Index dst, Eigen::Index src, const FieldElement& f) {
        // basis change b_dst += f b_src, applied symmetrically to g
        for (Eigen::Index r = 0; r < nn; ++r) g(r, dst) = g(r, dst) + f * g(r, src);
        for (Eigen::Index r = 0; r < nn; ++r) g(dst, r) = g(dst, r) + f * g(src, r);
        for (Eigen::Index r = 0; r < nn; ++r) c(r, dst) = c(r, dst) + f * c(r, src);
    };
    auto swap_cols = [&](Eigen::Index i, Eigen::Index j) {
        g.col(i).swap(g.col(j));
        g.row(i).swap(g.row(j));
        c.col(i).swap(c.col(j));
    };

    for (Eigen::Index k = 0; k < nn; ++k) {
        if (g(k, k).is_zero()) {
            Eigen::Index j = -1;
            for (Eigen::Index r = k + 1; r < nn; ++r)
                if (!g(r, r).is_zero()) { j = r; break; }
            if (j >= 0) {
                swap_cols(k, j);
            } else {
                // all remaining diagonal entries vanish; pick any off-diagonal
                Eigen::Index a = -1, b = -1;
                for (Eigen::Index r = k; r < nn && a < 0; ++r)
                    for (Eigen::Index s = r + 1; s < nn; ++s)
                        if (!g(r, s).is_zero()) { a = r; b = s; break; }
                if (a < 0) break; // remaining block is zero
                if (a != k) swap_cols(k, a);
                // after b_k += b_b the diagonal entry becomes 2 <b_k, b_b> != 0
                add_col(k, b, FieldElement(1));
            }
        }
        for (Eigen::Index j = k + 1; j < nn; ++j) {
            if (g(k, j).is_zero()) continue;
            FieldElement f = -(g(k, j) / g(k, k));
            add_col(j, k, f);
        }
    }
    std::vector<FieldElement> diag(nn);
    for (Eigen::Index k = 0; k < nn; ++k) diag[static_cast<size_t>(k)] = g(k, k);
    return {c, diag};
}

QuadraticSpace::QuadraticSpace(TotallyRealField F, FieldMatrix gram, int e)
    : F_(F), gram_(std::move(gram)), e_(e) {
    if (gram_.rows() != gram_.cols()) throw std::domain_error("QuadraticSpace: gram not square");
    if (gram_.rows() < 1) throw std::domain_error("QuadraticSpace: empty gram");
    for (Eigen::Index r = 0; r < gram_.rows(); ++r)
        for (Eigen::Index c = 0; c < gram_.cols(); ++c) {
            F_.require(gram_(r, c));
            if (gram_(r, c) != gram_(c, r))
                throw std::domain_error("QuadraticSpace: gram not symmetric");
        }
    if (e_ < 0 || e_ > F_.degree())
        throw std::domain_error("QuadraticSpace: e out of range");
    if (field_rank(gram_) != dim())
        throw std::domain_error("QuadraticSpace: degenerate form");
}

QuadraticSpace QuadraticSpace::diagonal(const TotallyRealField& F,
                                        const std::vector<FieldElement>& qvalues, int e) {
    const Eigen::Index nn = static_cast<Eigen::Index>(qvalues.size());
    FieldMatrix g(nn, nn);
    for (Eigen::Index r = 0; r < nn; ++r)
        for (Eigen::Index c = 0; c < nn; ++c)
            g(r, c) = (r == c) ? qvalues[static_cast<size_t>(r)] * FieldElement(2)
                               : FieldElement(0);
    return QuadraticSpace(F, g, e);
}

FieldElement QuadraticSpace::inner(const FieldVector& x, const FieldVector& y) const {
    if (x.size() != dim() || y.size() != dim())
        throw std::domain_error("inner: dimension mismatch");
    FieldElement s(0);
    for (Eigen::Index r = 0; r < gram_.rows(); ++r)
        for (Eigen::Index c = 0; c < gram_.cols(); ++c) s += x(r) * gram_(r, c) * y(c);
    return s;
}

FieldElement QuadraticSpace::quad(const FieldVector& x) const {
    return inner(x, x) / FieldElement(2);
}

FieldMatrix QuadraticSpace::intersection_matrix(const VectorTuple& xs) const {
    const Eigen::Index r = static_cast<Eigen::Index>(xs.size());
    FieldMatrix t(r, r);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < r; ++j)
            t(i, j) = inner(xs[static_cast<size_t>(i)], xs[static_cast<size_t>(j)]) /
                      FieldElement(2);
    return t;
}

std::pair<int, int> QuadraticSpace::signature_at(int place) const {
    auto [c, diag] = congruent_diagonal(gram_);
    (void)c;
    int pos = 0, neg = 0;
    for (const FieldElement& d : diag) {
        int s = F_.sign_at(d, place);
        if (s > 0) ++pos;
        else if (s < 0) ++neg;
        else throw std::domain_error("signature_at: degenerate diagonal");
    }
    return {pos, neg};
}

bool QuadraticSpace::profile_ok() const {
    if (e_ < 0 || e_ > F_.degree()) return false;
    for (int i = 0; i < F_.degree(); ++i) {
        auto [pos, neg] = signature_at(i);
        if (i < e_) {
            if (pos != n() || neg != 2) return false;
        } else {
            if (pos != dim() || neg != 0) return false;
        }
    }
    return true;
}

Eigen::MatrixXd QuadraticSpace::gram_embedded(int place) const {
    return embed_matrix(F_, gram_, place);
}

double QuadraticSpace::inner_embedded(int place, const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& y) const {
    return x.dot(gram_embedded(place) * y);
}

double QuadraticSpace::quad_embedded(int place, const Eigen::VectorXd& x) const {
    return 0.5 * inner_embedded(place, x, x);
}

VectorTuple QuadraticSpace::canonical_subtuple(const VectorTuple& xs) const {
    VectorTuple chosen;
    FieldMatrix stack(dim(), 0);
    for (const FieldVector& x : xs) {
        FieldMatrix trial(dim(), stack.cols() + 1);
        trial.leftCols(stack.cols()) = stack;
        trial.col(stack.cols()) = x;
        if (field_rank(trial) > static_cast<int>(stack.cols())) {
            stack = trial;
            chosen.push_back(x);
        }
    }
    return chosen;
}

bool QuadraticSpace::is_totally_positive_subspace(const VectorTuple& xs) const {
    VectorTuple basis = canonical_subtuple(xs);
    if (basis.empty()) return true; // zero subspace
    const Eigen::Index k = static_cast<Eigen::Index>(basis.size());
    FieldMatrix gsub(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            gsub(i, j) = inner(basis[static_cast<size_t>(i)], basis[static_cast<size_t>(j)]);
    auto [c, diag] = congruent_diagonal(gsub);
    (void)c;
    for (const FieldElement& d : diag)
        if (!F_.is_totally_positive(d)) return false;
    return true;
}

std::vector<FieldVector> QuadraticSpace::orthogonal_complement(const VectorTuple& xs) const {
    const Eigen::Index k = static_cast<Eigen::Index>(xs.size());
    FieldMatrix m(k, dim());
    for (Eigen::Index i = 0; i < k; ++i) {
        FieldVector gx(dim());
        for (Eigen::Index r = 0; r < dim(); ++r) {
            FieldElement s(0);
            for (Eigen::Index c = 0; c < dim(); ++c)
                s += gram_(r, c) * xs[static_cast<size_t>(i)](c);
            gx(r) = s;
        }
        for (Eigen::Index c = 0; c < dim(); ++c) m(i, c) = gx(c);
    }
    return field_kernel(m);
}

} // namespace kmt
