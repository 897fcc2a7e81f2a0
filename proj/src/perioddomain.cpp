#include "kmt/perioddomain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kmt {

namespace {

double pair_embedded(const Eigen::MatrixXd& S, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return x.dot(S * y);
}

} // namespace

PeriodPoint make_period_point(const QuadraticSpace& V, int place,
                              const Eigen::VectorXd& alpha, const Eigen::VectorXd& beta) {
    if (place < 0 || place >= V.e())
        throw std::invalid_argument("make_period_point: place is not indefinite");
    if (alpha.size() != V.dim() || beta.size() != V.dim())
        throw std::invalid_argument("make_period_point: vector size mismatch");
    const Eigen::MatrixXd S = V.gram_embedded(place);
    const double scale = S.cwiseAbs().maxCoeff() *
                         std::max({1.0, alpha.squaredNorm(), beta.squaredNorm()});
    const double na = pair_embedded(S, alpha, alpha);
    if (!(na < -1e-12 * scale))
        throw std::domain_error("make_period_point: alpha is not negative");
    Eigen::VectorXd b = beta - (pair_embedded(S, alpha, beta) / na) * alpha;
    const double nb = pair_embedded(S, b, b);
    if (!(nb < -1e-12 * scale))
        throw std::domain_error("make_period_point: span is not a negative 2-plane");
    b *= std::sqrt(na / nb);
    PeriodPoint tau;
    tau.place = place;
    tau.alpha = alpha;
    tau.beta = b;
    return tau;
}

void validate_polytau(const QuadraticSpace& V, const PolyPeriodPoint& taus) {
    const int e = V.e();
    if (static_cast<int>(taus.size()) != e)
        throw std::invalid_argument("validate_polytau: expected one point per indefinite place");
    for (int i = 0; i < e; ++i) {
        if (taus[i].place != i)
            throw std::invalid_argument("validate_polytau: places must appear in order");
        // Re-derive to confirm the stored pair still satisfies the invariants.
        make_period_point(V, i, taus[i].alpha, taus[i].beta);
    }
}

Eigen::VectorXd negative_projection(const QuadraticSpace& V, const PeriodPoint& tau,
                                    const Eigen::VectorXd& x) {
    const Eigen::MatrixXd S = V.gram_embedded(tau.place);
    const double na = pair_embedded(S, tau.alpha, tau.alpha);
    const double nb = pair_embedded(S, tau.beta, tau.beta);
    return (pair_embedded(S, x, tau.alpha) / na) * tau.alpha +
           (pair_embedded(S, x, tau.beta) / nb) * tau.beta;
}

double majorant_R(const QuadraticSpace& V, const PeriodPoint& tau, const Eigen::VectorXd& x) {
    const Eigen::MatrixXd S = V.gram_embedded(tau.place);
    const Eigen::VectorXd p = negative_projection(V, tau, x);
    return -0.5 * pair_embedded(S, p, p);
}

double majorant_R_plane(const QuadraticSpace& V, const PeriodPoint& tau,
                        const Eigen::VectorXd& x) {
    const Eigen::MatrixXd S = V.gram_embedded(tau.place);
    const double xa = pair_embedded(S, x, tau.alpha);
    const double xb = pair_embedded(S, x, tau.beta);
    const double na = pair_embedded(S, tau.alpha, tau.alpha);
    const double nb = pair_embedded(S, tau.beta, tau.beta);
    return -0.5 * (xa * xa / na + xb * xb / nb);
}

double section_norm_sq(const QuadraticSpace& V, const PeriodPoint& tau,
                       const Eigen::VectorXd& x) {
    const Eigen::MatrixXd S = V.gram_embedded(tau.place);
    const std::complex<double> xv(pair_embedded(S, x, tau.alpha), pair_embedded(S, x, tau.beta));
    const double vvbar = pair_embedded(S, tau.alpha, tau.alpha) +
                         pair_embedded(S, tau.beta, tau.beta);
    return std::norm(xv) / (2.0 * std::abs(vvbar));
}

Eigen::MatrixXd majorant_form(const QuadraticSpace& V, const PeriodPoint& tau) {
    const Eigen::MatrixXd S = V.gram_embedded(tau.place);
    const Eigen::VectorXd a = S * tau.alpha;
    const Eigen::VectorXd b = S * tau.beta;
    const double na = pair_embedded(S, tau.alpha, tau.alpha);
    const double nb = pair_embedded(S, tau.beta, tau.beta);
    return 0.5 * S - (a * a.transpose()) / na - (b * b.transpose()) / nb;
}

PeriodPoint act(const QuadraticSpace& V, const Eigen::MatrixXd& rho, const PeriodPoint& tau) {
    return make_period_point(V, tau.place, rho * tau.alpha, rho * tau.beta);
}

Eigen::MatrixXd adapted_frame(const QuadraticSpace& V, const PeriodPoint& tau) {
    const int d = V.dim();
    const int n = d - 2;
    const Eigen::MatrixXd S = V.gram_embedded(tau.place);
    const double na = pair_embedded(S, tau.alpha, tau.alpha);
    const double nb = pair_embedded(S, tau.beta, tau.beta);
    const Eigen::VectorXd v1 = tau.alpha / std::sqrt(-na);
    const Eigen::VectorXd v2 = tau.beta / std::sqrt(-nb);

    Eigen::MatrixXd frame(d, d);
    int got = 0;
    for (int j = 0; j < d && got < n; ++j) {
        Eigen::VectorXd r = Eigen::VectorXd::Unit(d, j);
        // Negative frame vectors have <v,v> = -1, so the projection
        // coefficient flips sign.
        r += pair_embedded(S, r, v1) * v1;
        r += pair_embedded(S, r, v2) * v2;
        for (int i = 0; i < got; ++i)
            r -= pair_embedded(S, r, frame.col(i)) * frame.col(i);
        const double rr = pair_embedded(S, r, r);
        if (rr > 1e-8)
            frame.col(got++) = r / std::sqrt(rr);
    }
    if (got != n)
        throw std::runtime_error("adapted_frame: failed to complete positive frame");
    frame.col(n) = v1;
    frame.col(n + 1) = v2;
    return frame;
}

Chart chart_make(const QuadraticSpace& V, int place, int branch) {
    if (place < 0 || place >= V.e())
        throw std::invalid_argument("chart_make: place is not indefinite");
    if (branch != +1 && branch != -1)
        throw std::invalid_argument("chart_make: branch must be +1 or -1");
    const Eigen::MatrixXd S = V.gram_embedded(place);
    std::vector<int> neg;
    for (int i = 0; i < V.dim(); ++i)
        if (S(i, i) < 0.0) neg.push_back(i);
    if (neg.size() < 2)
        throw std::invalid_argument("chart_make: need two negative-norm basis directions");
    auto heavier = [&S](int i, int j) { return std::abs(S(i, i)) > std::abs(S(j, j)); };
    std::stable_sort(neg.begin(), neg.end(), heavier);
    Chart chart;
    chart.place = place;
    chart.branch = branch;
    chart.norm_index = neg[0];
    chart.solve_index = neg[1];
    for (int i = 0; i < V.dim(); ++i)
        if (i != chart.norm_index && i != chart.solve_index) chart.free_indices.push_back(i);
    return chart;
}

Eigen::VectorXcd chart_line(const QuadraticSpace& V, const Chart& chart,
                            const Eigen::VectorXcd& w) {
    const int d = V.dim();
    if (w.size() != static_cast<Eigen::Index>(chart.free_indices.size()))
        throw std::invalid_argument("chart_line: coordinate count mismatch");
    const Eigen::MatrixXd S = V.gram_embedded(chart.place);
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(d);
    u(chart.norm_index) = 1.0;
    for (size_t j = 0; j < chart.free_indices.size(); ++j) u(chart.free_indices[j]) = w(j);

    // <v,v> = 0 for v = u + t e_s is a quadratic in t (bilinear extension,
    // no conjugation).
    const std::complex<double> a = S(chart.solve_index, chart.solve_index);
    const std::complex<double> b = 2.0 * (S.row(chart.solve_index).cast<std::complex<double>>() * u)(0);
    const std::complex<double> c = (u.transpose() * S.cast<std::complex<double>>() * u)(0);
    const std::complex<double> disc = b * b - 4.0 * a * c;
    const std::complex<double> root = std::sqrt(disc);
    const std::complex<double> t1 = (-b + root) / (2.0 * a);
    const std::complex<double> t2 = (-b - root) / (2.0 * a);

    const double tol = 1e-12 * std::max(1.0, std::max(std::abs(t1), std::abs(t2)));
    const bool ok1 = chart.branch * t1.imag() > tol;
    const bool ok2 = chart.branch * t2.imag() > tol;
    if (ok1 == ok2)
        throw std::domain_error("chart_line: no admissible root on the requested branch");
    Eigen::VectorXcd v = u;
    v(chart.solve_index) = ok1 ? t1 : t2;
    return v;
}

PeriodPoint chart_point(const QuadraticSpace& V, const Chart& chart,
                        const Eigen::VectorXcd& w) {
    const Eigen::VectorXcd v = chart_line(V, chart, w);
    return make_period_point(V, chart.place, v.real(), v.imag());
}

} // namespace kmt
