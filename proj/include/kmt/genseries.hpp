#pragma once

// Generating-series assembly: scalar theta specializations with proven
// Gaussian tail bounds, the form-valued Kudla-Millson theta sum, exact
// coefficient extraction by intersection matrix, and the translation and
// Poisson-inversion modularity checks.

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "kmt/kmform.hpp"
#include "kmt/lattice.hpp"
#include "kmt/whittaker.hpp"

namespace kmt {

struct GeneratingSeriesSpec {
    OLattice lattice;
    int r = 1;
    PolyPeriodPoint taus;          // one anchor point per indefinite place
    std::vector<KMFrame> frames;   // adapted frame per indefinite place
    double epsilon = 1e-8;         // target tail bound
    Eigen::VectorXd coset_offset;  // basis coordinates of the coset shift; empty = 0
};

// Canonical key for a symmetric matrix over F: upper-triangle entries in
// row-major order, each as an exact rational pair.
std::string t_key(const TotallyRealField& F, const FieldMatrix& T);

struct QExpansion {
    std::map<std::string, std::complex<double>> coefficients;
    double radius = 0.0;
    double tail_bound = 0.0;
};

// Representation numbers of a totally definite lattice, bucketed by the exact
// q-value key, complete for trace q <= qmax.
QExpansion theta_coefficients(const OLattice& L, double qmax);

struct ThetaScalarResult {
    std::complex<double> value;
    double radius = 0.0;
    double tail_bound = 0.0;
    long term_count = 0;
};

// Sum of e^{2 pi i sum_p sigma_p(q(x)) tau_p} over a totally definite lattice
// (plus optional coset offset), truncated once the box-count Gaussian tail
// drops below epsilon. Requires Im tau_p >= 0.1; throws BudgetExceeded when the
// bound is not reachable within the enumeration budget.
ThetaScalarResult theta_scalar(const OLattice& L, const std::vector<std::complex<double>>& tau,
                               double epsilon, const Eigen::VectorXd& coset_offset = {});

struct KMThetaResult {
    PlacesFormSum value;
    double radius = 0.0;
    double tail_bound = 0.0; // Gaussian-model estimate for the discarded tail
    long term_count = 0;
};

// Sum over r-tuples of lattice vectors of
//   W_{T(x)}(g) . omega2(v x, tau, frames),
// with v defaulting to the Iwasawa Levi part of each g_j. The result is kept
// as a keyed sum of per-place exterior components.
KMThetaResult km_theta(const GeneratingSeriesSpec& spec, const std::vector<SymplecticElement>& gs,
                       const std::vector<Eigen::MatrixXd>& v_scale = {});

struct CoefficientResult {
    PlacesFormSum value;
    bool complete = true;
};

// The T-th coefficient: sum of omega2 over the fiber {x : T(x) = T}. Zero when
// some embedding of T fails the psd gate. Degenerate T with an indefinite place
// needs user_bound and is reported incomplete. v_scale (one r x r matrix per
// place) applies the same Levi scaling as km_theta, for reassembly.
CoefficientResult coefficient_of_T(const GeneratingSeriesSpec& spec, const FieldMatrix& T,
                                   double user_bound = -1.0,
                                   const std::vector<Eigen::MatrixXd>& v_scale = {});

// Distinct exact intersection matrices of r-tuples with per-slot majorant
// below bound, sorted by canonical key.
std::vector<FieldMatrix> t_keys_below(const OLattice& L, const PolyPeriodPoint& taus, int r,
                                      double bound);

// Max coefficient deviation between km_theta at g and at n(mu) g per place,
// i.e. between tau' and tau' + sigma_p(mu).
double modularity_check_translation(const GeneratingSeriesSpec& spec,
                                    const std::vector<SymplecticElement>& gs,
                                    const FieldElement& mu);

// Scalar inversion check over Q: compares theta_L(-1/tau) with
// (tau/i)^{m/2} det(G)^{-1/2} theta_{L*}(tau) through the dual lattice, and
// returns the max relative error over the sample points.
double modularity_check_inversion(const OLattice& L, const std::vector<std::complex<double>>& taus,
                                  double epsilon);

} // namespace kmt
