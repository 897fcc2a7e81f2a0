#ifndef KMT_PERIODDOMAIN_HPP
#define KMT_PERIODDOMAIN_HPP

#include "kmt/quadspace.hpp"

#include <Eigen/Dense>
#include <complex>

namespace kmt {

/// Oriented negative-definite 2-plane at an indefinite place, stored as an
/// orthogonal pair with <alpha,alpha> = <beta,beta> < 0 and <alpha,beta> = 0
/// (inner products of the embedded form at `place`).
struct PeriodPoint {
    int place{0};
    Eigen::VectorXd alpha;
    Eigen::VectorXd beta;
};

/// One period point per indefinite place, ordered by place.
using PolyPeriodPoint = std::vector<PeriodPoint>;

/// Orthogonalize and rescale a spanning pair into a PeriodPoint; throws when
/// the span is not a negative-definite 2-plane.
PeriodPoint make_period_point(const QuadraticSpace& V, int place,
                              const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta);

void validate_polytau(const QuadraticSpace& V, const PolyPeriodPoint& taus);

/// Projection of x onto the plane of tau (embedded coordinates at tau.place).
Eigen::VectorXd negative_projection(const QuadraticSpace& V, const PeriodPoint& tau,
                                    const Eigen::VectorXd& x);

/// Majorant R(x, tau) = -q(x_tau) >= 0, vanishing exactly on x orthogonal to
/// the plane.
double majorant_R(const QuadraticSpace& V, const PeriodPoint& tau, const Eigen::VectorXd& x);

/// Same quantity through the explicit plane formula
/// -(1/2)(<x,alpha>^2/<alpha,alpha> + <x,beta>^2/<beta,beta>).
double majorant_R_plane(const QuadraticSpace& V, const PeriodPoint& tau,
                        const Eigen::VectorXd& x);

/// Square norm of the tautological section at tau: |<x,v>|^2/(2 |<v,vbar>|)
/// with v = alpha + i beta; satisfies R = 2 ||s||^2.
double section_norm_sq(const QuadraticSpace& V, const PeriodPoint& tau,
                       const Eigen::VectorXd& x);

/// Matrix Q of the positive definite majorant form q_tau(x) = q(x) + 2 R(x,tau)
/// as a quadratic form x^T Q x.
Eigen::MatrixXd majorant_form(const QuadraticSpace& V, const PeriodPoint& tau);

/// Transport tau by an isometry given in embedded coordinates.
PeriodPoint act(const QuadraticSpace& V, const Eigen::MatrixXd& rho, const PeriodPoint& tau);

/// Deterministic adapted frame at tau: columns u_1..u_n (positive part,
/// Gram-Schmidt completion seeded by the standard basis) then the normalized
/// plane pair; embedded Gram in this basis is diag(+1 x n, -1 x 2).
Eigen::MatrixXd adapted_frame(const QuadraticSpace& V, const PeriodPoint& tau);

/// Quadric chart at an indefinite place: the negative-norm coordinate of
/// largest |Gram diagonal| is pinned to 1, a second negative-norm coordinate
/// carries the solved value, the remaining dim-2 coordinates are free.
struct Chart {
    int place{0};
    int norm_index{0};
    int solve_index{0};
    int branch{+1}; // sign of Im(solved coordinate)
    std::vector<int> free_indices;
};

Chart chart_make(const QuadraticSpace& V, int place, int branch = +1);

/// Isotropic line representative for chart coordinates w; throws when w lies
/// outside the chart domain (no admissible root, or plane not negative).
Eigen::VectorXcd chart_line(const QuadraticSpace& V, const Chart& chart,
                            const Eigen::VectorXcd& w);

PeriodPoint chart_point(const QuadraticSpace& V, const Chart& chart,
                        const Eigen::VectorXcd& w);

} // namespace kmt

#endif
