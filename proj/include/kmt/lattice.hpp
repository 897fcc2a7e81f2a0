#ifndef KMT_LATTICE_HPP
#define KMT_LATTICE_HPP

#include "kmt/perioddomain.hpp"
#include "kmt/quadspace.hpp"

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

namespace kmt {

/// Thrown when an enumeration would exceed its point budget.
struct BudgetExceeded : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Full-rank Z-module in V given by d*(n+2) vectors with FieldElement
/// coordinates (an O_F-basis tensored with the integer basis of O_F).
struct OLattice {
    QuadraticSpace space;
    std::vector<FieldVector> zbasis;

    int zrank() const { return static_cast<int>(zbasis.size()); }
};

/// Standard lattice: unit vectors tensored with the integer basis of O_F.
OLattice olattice_standard(const QuadraticSpace& V);

/// Validates that the given vectors form a full-rank Z-basis over Q.
OLattice make_olattice(const QuadraticSpace& V, std::vector<FieldVector> zbasis);

/// Real matrix whose columns are the basis vectors embedded at `place`.
Eigen::MatrixXd basis_embedded(const OLattice& L, int place);

/// Gram matrix of the total majorant Sum_{i<e} q_{tau_i} + Sum_{i>=e} q_i on
/// the Z-basis; positive definite (throws on Cholesky failure).
Eigen::MatrixXd total_majorant(const OLattice& L, const PolyPeriodPoint& taus);

FieldVector lattice_vector(const OLattice& L, const Eigen::VectorXi& coords);

struct EnumeratedVector {
    Eigen::VectorXi coords;
    double qmaj{0.0};
};

/// All integer coordinate vectors c with Q_maj(c + offset) <= bound, sorted by
/// (Q_maj, lexicographic coordinates); both members of each +- pair appear.
/// `offset` shifts the enumeration to a coset (coordinates of the offset in
/// the Z-basis); `max_points` caps the search volume.
std::vector<EnumeratedVector> enumerate_below(const OLattice& L, const PolyPeriodPoint& taus,
                                              double bound,
                                              const Eigen::VectorXd& offset = Eigen::VectorXd(),
                                              long max_points = 20'000'000);

struct FiberResult {
    std::vector<VectorTuple> tuples;
    bool complete{false};
};

/// All tuples x in L^r with intersection matrix exactly T and per-slot
/// majorant within bound. With bound < 0 the bound is derived from tr(T_jj);
/// the search is provably complete only when the space is totally definite,
/// where the majorant is pinned to tr(T_jj) on the fiber.
FiberResult fibers_with_T(const OLattice& L, const FieldMatrix& T, const PolyPeriodPoint& taus,
                          double bound = -1.0, long max_points = 20'000'000);

/// Z-dual with respect to the trace bilinear form tr_{F/Q} <x,y>; exact.
OLattice dual_lattice(const OLattice& L);

/// Trace Gram matrix tr_{F/Q} <b_i, b_j> of the Z-basis, exact.
FieldMatrix trace_gram(const OLattice& L);

/// Whether the two lattices have the same Z-span (exact test).
bool same_zspan(const OLattice& A, const OLattice& B);

} // namespace kmt

#endif
