#ifndef KMT_KMFORM_HPP
#define KMT_KMFORM_HPP

#include "kmt/lattice.hpp"
#include "kmt/perioddomain.hpp"

#include <complex>
#include <map>
#include <vector>

namespace kmt {

/// Adapted frame at a basepoint: n positive directions then the plane pair;
/// embedded Gram in this basis is diag(+1 x n, -1 x 2).
struct KMFrame {
    int place{0};
    int n{0};
    PeriodPoint z0;
    Eigen::MatrixXd frame;
    Eigen::MatrixXd to_frame;
};

KMFrame make_km_frame(const QuadraticSpace& V, const PeriodPoint& z0);

/// Frame whose first k positive directions span U (given by ambient embedded
/// columns) and whose remaining positive directions are seeded from `seeds`.
KMFrame make_km_frame_with_positive_span(const QuadraticSpace& V, const PeriodPoint& z0,
                                         const Eigen::MatrixXd& U, const Eigen::MatrixXd& seeds);

Eigen::VectorXd frame_coords(const KMFrame& fr, const Eigen::VectorXd& x);

/// Element of the exterior algebra on generators omega_{1,1..n}, omega_{2,1..n}.
/// Coefficients are keyed by a pair of index bitmasks (S1, S2); the monomial is
/// the ascending wedge of the S1 generators followed by the S2 generators.
class ExteriorFormValue {
  public:
    using Key = std::pair<unsigned, unsigned>;

    static ExteriorFormValue zero() { return {}; }
    static ExteriorFormValue one();

    void add_term(unsigned s1, unsigned s2, double c);
    double coefficient(unsigned s1, unsigned s2) const;
    const std::map<Key, double>& terms() const { return terms_; }

    ExteriorFormValue& operator+=(const ExteriorFormValue& o);
    ExteriorFormValue scaled(double c) const;
    double linf() const;
    double l1() const;

    friend ExteriorFormValue wedge(const ExteriorFormValue& a, const ExteriorFormValue& b);
    friend ExteriorFormValue operator+(ExteriorFormValue a, const ExteriorFormValue& b);

  private:
    std::map<Key, double> terms_;
};

ExteriorFormValue wedge(const ExteriorFormValue& a, const ExteriorFormValue& b);
ExteriorFormValue operator+(ExteriorFormValue a, const ExteriorFormValue& b);

/// One ExteriorFormValue per indefinite place (a pure tensor over places).
using PlacesFormValue = std::vector<ExteriorFormValue>;

/// Sum of place-tensors with complex weights. Sums of pure tensors are not
/// pure, so terms are keyed by one (S1,S2) pair per place.
struct PlacesFormSum {
    using Key = std::vector<ExteriorFormValue::Key>;
    std::map<Key, std::complex<double>> terms;

    void accumulate(const PlacesFormValue& form, std::complex<double> weight);
    double max_abs_diff(const PlacesFormSum& o) const;
    double l1() const;
    PlacesFormSum scaled(std::complex<double> c) const;
};

/// Gaussian weight of the normalized form: `Majorant` multiplies by
/// e^{-2 pi q_{z0}(x)} per vector; `Plain` multiplies by e^{-2 pi (q+R)(x)},
/// which yields the total Gaussian e^{-pi |x|^2} in frame coordinates.
enum class CircWeight { Majorant, Plain };

/// phi^(1) at a vector given in frame coordinates: degree-(1,1) value
/// e^{-2 pi R} ( sum_{i,j<=n} y_i y_j w_{1,i}^w_{2,j} - (1/2pi) sum_i w_{1,i}^w_{2,i} ),
/// with R = (1/2) sum_{a>n} y_a^2.
ExteriorFormValue km_phi1(const Eigen::VectorXd& y, int n);

/// Wedge of phi^(1) over a tuple of frame-coordinate vectors.
ExteriorFormValue km_phi_m(const std::vector<Eigen::VectorXd>& ys, int n);

/// Normalized variant: km_phi_m times the CircWeight Gaussian factor.
ExteriorFormValue km_phi_circ(const std::vector<Eigen::VectorXd>& ys, int n,
                              CircWeight weight = CircWeight::Majorant);

/// (-1)^r ( -(1/2pi) sum_i w_{1,i}^w_{2,i} )^r; vanishes for r > n.
ExteriorFormValue km_zero_form(int r, int n);

/// phi^(1)(x, tau) in the coefficients of the frame at tau; x ambient embedded.
ExteriorFormValue evaluate_at(const KMFrame& fr, const Eigen::VectorXd& x);

/// Per-place wedge km_phi_m(x * scale_i, tau_i); xs are F-vectors, scale_i an
/// optional GL_k matrix applied to the tuple on the right at place i.
PlacesFormValue omega2(const QuadraticSpace& V, const VectorTuple& xs,
                       const std::vector<KMFrame>& frames,
                       const std::vector<Eigen::MatrixXd>& scale = {});

struct Omega3Result {
    PlacesFormSum value;
    std::vector<double> radii;
    std::vector<double> cauchy_linf;
    long term_count{0};
    bool fiber_complete{false};
};

/// Partial sums of omega2 over the fiber {y in L^r : T(y) = T(x)} by
/// increasing total majorant radius.
Omega3Result omega3_partial(const OLattice& L, const VectorTuple& x, const PolyPeriodPoint& taus,
                            const std::vector<KMFrame>& frames, const std::vector<double>& radii);

/// Max deviation, on complement-frame components, between the restriction of
/// phi^{(m),o} at a tuple from the totally positive subspace U and
/// gaussian x phi^{(m)}_{V_U}(0) computed in the orthogonal complement.
double restriction_splitting_check(const QuadraticSpace& V, const VectorTuple& U,
                                   const VectorTuple& xs, const PeriodPoint& tau_U,
                                   CircWeight weight = CircWeight::Majorant);

/// Matrices B_c (one per real chart direction, n x 2) representing the chart
/// tangents in the frame at w: (B_c)_{i,a} = <d v_a / d xi_c, u_i>.
std::vector<Eigen::MatrixXd> chart_tangents(const QuadraticSpace& V, const Chart& chart,
                                            const Eigen::VectorXcd& w, double h);

/// Component matrix P(c,d) of the chart pullback of a degree-(1,1) value:
/// P(c,d) = sum phi_ij ( B_c[i,0] B_d[j,1] - B_d[i,0] B_c[j,1] ).
Eigen::MatrixXd chart_pullback_2form(const ExteriorFormValue& val,
                                     const std::vector<Eigen::MatrixXd>& tangents, int n);

/// Max |d phi| component of the finite-difference exterior derivative of the
/// chart-pulled-back phi^(1)(x, tau(w)) at w; identically zero in top degree.
double closedness_check(const QuadraticSpace& V, const Chart& chart, const Eigen::VectorXcd& w,
                        const Eigen::VectorXd& x_embedded, double h);

} // namespace kmt

#endif
