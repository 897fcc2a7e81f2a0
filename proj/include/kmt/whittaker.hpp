#pragma once

// Archimedean Whittaker data: Iwasawa decomposition on Sp_2r(R), branch-tracked
// det^{1/2}, holomorphic Whittaker values and their products over embeddings,
// plus a sampled fractional-Fourier oracle for Weil-action eigenphase tests.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "kmt/numberfield.hpp"
#include "kmt/quadspace.hpp"

namespace kmt {

// 2r x 2r real symplectic matrix with a metaplectic branch bit. The bit only
// ever enters through det_half's sign; products XOR it along the path.
struct SymplecticElement {
    Eigen::MatrixXd matrix;
    int branch = 0;

    int genus() const { return static_cast<int>(matrix.rows()) / 2; }
    Eigen::MatrixXd A() const;
    Eigen::MatrixXd B() const;
    Eigen::MatrixXd C() const;
    Eigen::MatrixXd D() const;
};

struct SiegelPoint {
    Eigen::MatrixXcd tau; // symmetric, positive-definite imaginary part
};

bool is_symplectic(const Eigen::MatrixXd& g, double tol = 1e-10);

SymplecticElement sp_identity(int r);
SymplecticElement sp_n(const Eigen::MatrixXd& u); // upper unipotent n(u), u symmetric
SymplecticElement sp_m(const Eigen::MatrixXd& v); // Levi m(v) = diag(v, v^{-T})
SymplecticElement sp_mul(const SymplecticElement& a, const SymplecticElement& b);

// g acting on the base point iI of the Siegel space.
SiegelPoint siegel_point(const SymplecticElement& g);

struct IwasawaResult {
    Eigen::MatrixXd u; // symmetric
    Eigen::MatrixXd v; // upper triangular, positive diagonal, v v^T = Im tau'
    SymplecticElement k;
};

// g = n(u) m(v) k with k in the maximal compact; throws on non-symplectic
// input or reconstruction error above 1e-10.
IwasawaResult iwasawa(const SymplecticElement& g);

// det(A + iB) for k in the maximal compact, negated when the branch bit is set.
std::complex<double> det_half(const SymplecticElement& k);

// W_beta(g) = det(v)^{w/2} e^{2 pi i tr(beta tau')} det_half(k)^w, w = weight_dim;
// zero when beta has an eigenvalue below -1e-12.
std::complex<double> whittaker_W(const Eigen::MatrixXd& beta, const SymplecticElement& g,
                                 int weight_dim);

// Product over the d embeddings of beta; gs holds one element per place.
std::complex<double> whittaker_hilbert(const TotallyRealField& F, const FieldMatrix& beta,
                                       const std::vector<SymplecticElement>& gs, int weight_dim);

// e^{-pi tr (x,x)} over all places for a tuple in a totally definite space.
double gaussian_standard(const QuadraticSpace& V, const VectorTuple& xs);

// Uniform tensor grid on [-extent, extent]^dim, points_per_axis per axis.
struct FrFTGrid {
    int dim = 1;
    int points_per_axis = 0;
    double extent = 0.0;

    long size() const;
    double step() const;
    double coord(int index) const;
};

// Fractional Fourier transform with angle +theta on the first n_pos axes and
// -theta on the rest, in the e^{-2 pi i x xi} convention (theta = pi/2 is the
// ordinary Fourier transform; the standard Gaussian has eigenvalue 1).
// Throws if the grid loses more than 1% of the l2 energy.
std::vector<std::complex<double>> fractional_fourier_oracle(
    const std::vector<std::complex<double>>& samples, const FrFTGrid& grid, double theta,
    int n_pos);

} // namespace kmt
