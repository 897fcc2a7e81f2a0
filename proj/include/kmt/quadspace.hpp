#ifndef KMT_QUADSPACE_HPP
#define KMT_QUADSPACE_HPP

#include "kmt/numberfield.hpp"

#include <utility>
#include <vector>

namespace kmt {

using VectorTuple = std::vector<FieldVector>;

// ---- exact linear algebra over the field ----

/// Rank of a matrix over the field (exact Gaussian elimination).
int field_rank(FieldMatrix m);

/// Basis of the right kernel {x : M x = 0}, exact.
std::vector<FieldVector> field_kernel(FieldMatrix m);

/// Solve A x = b exactly; throws std::domain_error when A is singular.
FieldVector field_solve(FieldMatrix a, FieldVector b);

FieldMatrix field_inverse(const FieldMatrix& a);

/// Symmetric congruence diagonalization: returns (C, diag) with C^T G C
/// diagonal. Columns of C are the diagonalizing basis; zero diagonal entries
/// flag a degenerate form. Works over any field of characteristic 0.
std::pair<FieldMatrix, std::vector<FieldElement>> congruent_diagonal(FieldMatrix g);

/// Quadratic space (V, q) over a totally real field. The stored Gram matrix
/// is that of the bilinear form <x,y> = q(x+y) - q(x) - q(y), so diagonal
/// entries are 2 q(e_i) and <x,x> = 2 q(x).
class QuadraticSpace {
  public:
    /// gram: symmetric nondegenerate matrix of <,>; e: number of leading
    /// embeddings where the space is expected indefinite of signature (n,2).
    QuadraticSpace(TotallyRealField F, FieldMatrix gram, int e);

    /// Space with q = sum q_i x_i^2 (gram = diag(2 q_i)).
    static QuadraticSpace diagonal(const TotallyRealField& F,
                                   const std::vector<FieldElement>& qvalues, int e);

    const TotallyRealField& field() const { return F_; }
    const FieldMatrix& gram() const { return gram_; }
    int dim() const { return static_cast<int>(gram_.rows()); }
    int n() const { return dim() - 2; }
    int e() const { return e_; }

    FieldElement inner(const FieldVector& x, const FieldVector& y) const;
    FieldElement quad(const FieldVector& x) const;

    /// T(x)_{ij} = <x_i, x_j>/2; diagonal entries are q(x_i).
    FieldMatrix intersection_matrix(const VectorTuple& xs) const;

    /// Exact signature (positives, negatives) of the embedded form at place i.
    std::pair<int, int> signature_at(int place) const;

    /// Check the signature profile: (n,2) at places < e, (n+2,0) afterwards.
    bool profile_ok() const;

    Eigen::MatrixXd gram_embedded(int place) const;
    double inner_embedded(int place, const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
    double quad_embedded(int place, const Eigen::VectorXd& x) const;

    /// Leftmost maximal linearly independent subtuple (deterministic).
    VectorTuple canonical_subtuple(const VectorTuple& xs) const;

    /// True when the restriction of q to span(xs) is positive definite at
    /// every embedding. The zero subspace counts as totally positive.
    bool is_totally_positive_subspace(const VectorTuple& xs) const;

    /// Exact basis of {y : <x_i, y> = 0 for all i}.
    std::vector<FieldVector> orthogonal_complement(const VectorTuple& xs) const;

  private:
    TotallyRealField F_;
    FieldMatrix gram_;
    int e_;
};

} // namespace kmt

#endif
