#ifndef KMT_CLIFFORD_HPP
#define KMT_CLIFFORD_HPP

#include "kmt/quadspace.hpp"

#include <Eigen/Dense>
#include <bit>
#include <random>

namespace kmt {

/// Orthogonal (not normalized) frame for a quadratic space, produced by exact
/// congruence diagonalization. Columns of basis are the frame vectors, qvals
/// their exact q-values, to_frame the inverse change of coordinates. Frame
/// vectors are ordered with positive q at the anchor place first.
struct CliffordFrame {
    FieldMatrix basis;
    FieldMatrix to_frame;
    std::vector<FieldElement> qvals;
    int anchor_place{0};
};

CliffordFrame orthogonalize(const QuadraticSpace& V, int place);

/// Element of the Clifford algebra C(V, q) over an orthogonal frame with m
/// generators; coefficients indexed by blade bitmask, e_i e_i = q(e_i).
template <typename S>
struct CliffordElement {
    int m{0};
    std::vector<S> c;

    CliffordElement() = default;
    explicit CliffordElement(int gens) : m(gens), c(static_cast<size_t>(1) << gens, S(0)) {}
};

template <typename S>
class CliffordAlgebra {
  public:
    using Elem = CliffordElement<S>;

    explicit CliffordAlgebra(std::vector<S> qvals) : diag_(std::move(qvals)) {
        m_ = static_cast<int>(diag_.size());
        if (m_ < 1 || m_ > 12) throw std::domain_error("CliffordAlgebra: bad generator count");
    }

    int generators() const { return m_; }
    size_t dim() const { return static_cast<size_t>(1) << m_; }

    Elem zero() const { return Elem(m_); }
    Elem scalar(const S& s) const {
        Elem e(m_);
        e.c[0] = s;
        return e;
    }
    Elem from_vector(const Eigen::Matrix<S, Eigen::Dynamic, 1>& v) const {
        if (v.size() != m_) throw std::domain_error("from_vector: size mismatch");
        Elem e(m_);
        for (int i = 0; i < m_; ++i) e.c[static_cast<size_t>(1) << i] = v(i);
        return e;
    }
    Eigen::Matrix<S, Eigen::Dynamic, 1> vector_part(const Elem& x) const {
        Eigen::Matrix<S, Eigen::Dynamic, 1> v(m_);
        for (int i = 0; i < m_; ++i) v(i) = x.c[static_cast<size_t>(1) << i];
        return v;
    }

    Elem add(const Elem& x, const Elem& y) const {
        Elem r(m_);
        for (size_t k = 0; k < dim(); ++k) r.c[k] = x.c[k] + y.c[k];
        return r;
    }
    Elem scale(const Elem& x, const S& s) const {
        Elem r(m_);
        for (size_t k = 0; k < dim(); ++k) r.c[k] = x.c[k] * s;
        return r;
    }

    Elem mul(const Elem& x, const Elem& y) const {
        Elem r(m_);
        for (size_t a = 0; a < dim(); ++a) {
            if (is_zero_coeff(x.c[a])) continue;
            for (size_t b = 0; b < dim(); ++b) {
                if (is_zero_coeff(y.c[b])) continue;
                S f = x.c[a] * y.c[b];
                size_t mask = a;
                // append the generators of b in ascending order
                for (int g = 0; g < m_; ++g) {
                    if (!(b & (static_cast<size_t>(1) << g))) continue;
                    int above = std::popcount(mask >> (g + 1));
                    if (above & 1) f = -f;
                    size_t bit = static_cast<size_t>(1) << g;
                    if (mask & bit) {
                        f = f * diag_[static_cast<size_t>(g)];
                        mask &= ~bit;
                    } else {
                        mask |= bit;
                    }
                }
                r.c[mask] = r.c[mask] + f;
            }
        }
        return r;
    }

    /// True when only even-grade blades carry mass (exactly, for exact scalars).
    bool is_even(const Elem& x) const {
        for (size_t k = 0; k < dim(); ++k)
            if ((std::popcount(k) & 1) && !is_zero_coeff(x.c[k])) return false;
        return true;
    }

    /// Left-multiplication matrix of x in the blade basis.
    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> left_matrix(const Elem& x) const {
        const size_t d = dim();
        Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> L(d, d);
        for (size_t col = 0; col < d; ++col) {
            Elem basis_blade(m_);
            basis_blade.c[col] = S(1);
            Elem prod = mul(x, basis_blade);
            for (size_t row = 0; row < d; ++row) L(row, col) = prod.c[row];
        }
        return L;
    }

  private:
    static bool is_zero_coeff(const S& v) {
        if constexpr (std::is_same_v<S, FieldElement>) return v.is_zero();
        else return v == S(0);
    }
    std::vector<S> diag_;
    int m_;
};

/// Invertible even element with its inverse carried along (built from an even
/// number of anisotropic vector factors, so the inverse is exact).
template <typename S>
struct GSpinElement {
    CliffordElement<S> g;
    CliffordElement<S> ginv;
};

/// g = v_1 ... v_k, inverse from v^{-1} = v / q(v).
template <typename S>
GSpinElement<S> gspin_from_factors(const CliffordAlgebra<S>& A,
                                   const std::vector<Eigen::Matrix<S, Eigen::Dynamic, 1>>& factors,
                                   const std::vector<S>& qvalues) {
    if (factors.empty() || factors.size() % 2 != 0)
        throw std::domain_error("gspin_from_factors: need an even, nonzero factor count");
    auto g = A.scalar(S(1));
    auto gi = A.scalar(S(1));
    for (size_t i = 0; i < factors.size(); ++i) {
        g = A.mul(g, A.from_vector(factors[i]));
        size_t j = factors.size() - 1 - i;
        auto vinv = factors[j] / qvalues[j];
        gi = A.mul(gi, A.from_vector(vinv));
    }
    return {g, gi};
}

inline double magnitude_hint(double v) { return std::abs(v); }
inline double magnitude_hint(const FieldElement& v) {
    double root = (v.D > 0) ? std::sqrt(static_cast<double>(v.D)) : 0.0;
    return std::abs(to_double(v.a)) + std::abs(to_double(v.b)) * root;
}

/// g x g^{-1} restricted to grade one; off_mass receives the relative blade
/// mass outside grade one (zero in exact arithmetic for genuine GSpin input).
template <typename S>
Eigen::Matrix<S, Eigen::Dynamic, 1> vector_action(const CliffordAlgebra<S>& A,
                                                  const GSpinElement<S>& g,
                                                  const Eigen::Matrix<S, Eigen::Dynamic, 1>& x,
                                                  double* off_mass = nullptr) {
    auto conj = A.mul(A.mul(g.g, A.from_vector(x)), g.ginv);
    if (off_mass) {
        double off = 0, total = 0;
        for (size_t k = 0; k < A.dim(); ++k) {
            double mag = magnitude_hint(conj.c[k]);
            total += mag;
            if (std::popcount(k) != 1) off += mag;
        }
        *off_mass = (total > 0) ? off / total : 0.0;
    }
    return A.vector_part(conj);
}

/// Exact Clifford data for a space at an anchor place.
struct CliffordContext {
    CliffordFrame frame;
    CliffordAlgebra<FieldElement> algebra;

    CliffordContext(const QuadraticSpace& V, int place);
};

/// GSpin element together with its action matrix on V in original coordinates.
struct GSpinData {
    GSpinElement<FieldElement> exact;
    FieldMatrix rho;                      // exact action on V
    std::vector<FieldVector> factors_v;   // the vector factors used
};

/// Random product of <= max_factors (even count) anisotropic vectors with
/// small rational coordinates; rejection keeps the embedded factors well
/// conditioned at the anchor place.
GSpinData random_gspin(const QuadraticSpace& V, const CliffordContext& ctx,
                       std::mt19937_64& rng, int max_factors = 6);

/// Action matrix of g on V (original coordinates), exact.
FieldMatrix rho_matrix(const QuadraticSpace& V, const CliffordContext& ctx,
                       const GSpinElement<FieldElement>& g);

/// Numeric GSpin membership test for a double-coefficient element: even,
/// invertible, and conjugation maps each frame generator into V with relative
/// off-vector residual below tol.
bool is_gspin(const CliffordAlgebra<double>& A, const CliffordElement<double>& g,
              double tol = 1e-8);

/// Embed an exact Clifford element into the double algebra at a place.
CliffordElement<double> embed_element(const TotallyRealField& F,
                                      const CliffordElement<FieldElement>& x, int place);
CliffordAlgebra<double> embed_algebra(const TotallyRealField& F,
                                      const CliffordContext& ctx, int place);

} // namespace kmt

#endif
