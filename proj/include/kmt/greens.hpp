#pragma once

// Exponential-integral Green function, star-product expansions, averaged
// partial sums, and the numeric dd^c verification against the KM form.

#include <vector>

#include "kmt/kmform.hpp"
#include "kmt/lattice.hpp"
#include "kmt/perioddomain.hpp"
#include "kmt/quadspace.hpp"

namespace kmt {

// f(t) = int_1^inf e^{-tu}/u du, the E1 exponential integral.
// Series branch below t=1.5, continued fraction above; relative error <= 1e-12.
double exp_integral_f(double t);

// f(2 pi R(x, tau)); throws std::domain_error on the singular locus R = 0.
double green_eta0(const QuadraticSpace& V, const PeriodPoint& tau,
                  const Eigen::VectorXd& x_embedded);

enum class StarSymbolKind { Phi, F, Delta };

struct StarSymbol {
    StarSymbolKind kind;
    int slot; // 0-based position in the N-factor product

    bool operator==(const StarSymbol&) const = default;
};

using StarWord = std::vector<StarSymbol>;

// Closed form: word j is phi_0 ... phi_{j-1} f_j delta_{j+1} ... delta_{N-1}.
std::vector<StarWord> star_expansion(int N);

// Same expansion computed by the binary rule
//   g_Y * g_Z = g_Y ^ delta_Z + omega_Y ^ g_Z
// applied left to right; agrees with star_expansion exactly.
std::vector<StarWord> star_expansion_recursive(int N);

// One term of the mixed numeric/symbolic star product. Slots are place-major:
// slot = place * k + vector_index, places 0..e-1.
struct Eta2Term {
    int f_slot = 0;
    double f_value = 0.0;
    bool f_singular = false;
    std::vector<int> delta_slots;
    std::vector<bool> delta_on_locus; // tau sits on that slot's singular locus
    PlacesFormValue phi_part;         // per-place wedge of the phi factors
};

// Numeric smooth parts of eta_2 = eta_1(tau_1) * ... * eta_1(tau_e) for the
// tuple xs; delta factors stay symbolic. A singular f slot throws unless
// throw_on_singular is false, in which case the term is flagged.
std::vector<Eta2Term> eta2_value(const QuadraticSpace& V, const VectorTuple& xs,
                                 const PolyPeriodPoint& taus,
                                 const std::vector<KMFrame>& frames,
                                 bool throw_on_singular = true);

struct ConvergenceReport {
    std::vector<double> radii;
    std::vector<double> partial_sums;
    std::vector<double> tail_estimates;
    double fitted_exponent = 0.0; // b in increment ~ C e^{-b rho}
    int skipped_singular = 0;
    long long term_count = 0;
    bool fiber_complete = false;
};

// Partial sums of the fully smooth star word over all lattice tuples with the
// same intersection matrix as x, cut at increasing radii in the variable
// z = sum of R over places and tuple slots. Terms are l1 magnitudes, so the
// sums are monotone. Tail estimates follow the model e^{-2 pi z} z^{(n+2)/2}.
ConvergenceReport eta3_partial_sums(const OLattice& L, const VectorTuple& x,
                                    const PolyPeriodPoint& taus,
                                    const std::vector<KMFrame>& frames,
                                    const std::vector<double>& radii);

struct CountReport {
    std::vector<double> Ns;
    std::vector<long long> counts;
    double fitted_exponent = 0.0; // slope of log count vs log N
    double q_ref = 0.0;
};

// Growth diagnostic: counts lattice vectors with total majorant <= q_ref + 2N
// for each N (the finite proxy for {R <= N}, whose literal version is infinite
// once a place is indefinite). Expected log-log slope (n+2)/2.
CountReport count_bounded_R(const OLattice& L, const PolyPeriodPoint& taus,
                            const std::vector<double>& N_list, double q_ref = 1.0);

// Finite-difference check of dd^c eta_0 = KM form away from the singular
// locus, on a grid x grid patch of the chart around w0. The Laplacian side is
// (1/4pi)(d^2/du^2 + d^2/dv^2) of green_eta0; the form side is the chart
// pullback coefficient of evaluate_at. Returns max |lhs - rhs| over the grid,
// normalized by the max |rhs|. Requires n = 1 and R >= 0.5 on the grid.
double ddc_check(const QuadraticSpace& V, const Eigen::VectorXd& x_embedded, int place,
                 const Chart& chart, const Eigen::VectorXcd& w0, int grid, double h,
                 double spacing = 0.05);

} // namespace kmt
