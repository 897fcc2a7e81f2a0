#include "kmt/genseries.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace kmt {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr std::complex<double> kI(0.0, 1.0);

// #{c in Z^m : c^T M c <= z} is bounded by the coordinate box
// |c_i| <= sqrt(z (M^{-1})_ii); far sharper than the min-eigenvalue ball for
// skew bases like E8.
Eigen::VectorXd box_diag(const Eigen::MatrixXd& M) {
    return M.inverse().diagonal();
}

double box_count(double z, const Eigen::VectorXd& minv_diag) {
    double c = 1.0;
    for (int i = 0; i < minv_diag.size(); ++i)
        c *= 2.0 * std::sqrt(std::max(z, 0.0) * minv_diag(i)) + 1.0;
    return c;
}

// Tail of sum over integer shells k >= floor(B) of count(k+1) * weight(k).
double shell_tail(double B, const std::function<double(double)>& count, double decay) {
    double tail = 0.0;
    const long k0 = static_cast<long>(std::floor(std::max(B, 0.0)));
    for (long k = k0; k < k0 + 200000; ++k) {
        const double term = count(static_cast<double>(k + 1)) * std::exp(-decay * k);
        tail += term;
        if (term < 1e-300 || term < 1e-9 * tail) break;
    }
    return tail;
}

FieldVector coset_vector(const OLattice& L, const Eigen::VectorXd& offset) {
    const TotallyRealField& F = L.space.field();
    FieldVector mu = FieldVector::Constant(L.space.dim(), F.element(0));
    for (int i = 0; i < offset.size(); ++i) {
        const Rational c(offset(i)); // exact double-to-rational conversion
        for (int rdx = 0; rdx < L.space.dim(); ++rdx)
            mu(rdx) = mu(rdx) + FieldElement(c, 0, F.D()) * L.zbasis[i](rdx);
    }
    return mu;
}

bool offset_is_zero(const Eigen::VectorXd& offset) {
    return offset.size() == 0 || offset.cwiseAbs().maxCoeff() == 0.0;
}

} // namespace

std::string t_key(const TotallyRealField& F, const FieldMatrix& T) {
    (void)F;
    std::string key;
    for (int i = 0; i < T.rows(); ++i)
        for (int j = i; j < T.cols(); ++j) {
            if (!key.empty()) key += ";";
            key += T(i, j).a.get_str() + "|" + T(i, j).b.get_str();
        }
    return key;
}

QExpansion theta_coefficients(const OLattice& L, double qmax) {
    if (L.space.e() != 0)
        throw std::invalid_argument("theta_coefficients: lattice must be totally definite");
    if (qmax < 0.0) throw std::invalid_argument("theta_coefficients: negative radius");
    QExpansion out;
    out.radius = qmax;
    FieldMatrix T(1, 1);
    for (const auto& ev : enumerate_below(L, {}, qmax + 1e-9)) {
        T(0, 0) = L.space.quad(lattice_vector(L, ev.coords));
        out.coefficients[t_key(L.space.field(), T)] += 1.0;
    }
    return out;
}

ThetaScalarResult theta_scalar(const OLattice& L, const std::vector<std::complex<double>>& tau,
                               double epsilon, const Eigen::VectorXd& coset_offset) {
    const TotallyRealField& F = L.space.field();
    if (L.space.e() != 0)
        throw std::invalid_argument("theta_scalar: lattice must be totally definite");
    if (static_cast<int>(tau.size()) != F.degree())
        throw std::invalid_argument("theta_scalar: need one tau per place");
    if (epsilon <= 0.0) throw std::invalid_argument("theta_scalar: epsilon must be positive");
    double ymin = 1e300;
    for (const auto& t : tau) ymin = std::min(ymin, t.imag());
    if (ymin < 0.1) throw std::invalid_argument("theta_scalar: Im tau must be >= 0.1");

    const Eigen::MatrixXd M = total_majorant(L, {});
    const Eigen::VectorXd bd = box_diag(M);
    const double lam = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M).eigenvalues().minCoeff();
    auto count = [&](double z) { return box_count(z, bd); };
    const double decay = 2.0 * kPi * ymin;

    // With a nonzero coset the shifted norm can undershoot the lattice-point
    // shell by the offset's own majorant value; widen the proven cap instead of
    // re-deriving a shifted bound.
    double off_slack = 0.0;
    Eigen::VectorXd off;
    if (!offset_is_zero(coset_offset)) {
        if (coset_offset.size() != L.zrank())
            throw std::invalid_argument("theta_scalar: offset size mismatch");
        off = coset_offset;
        off_slack = 2.0 * std::sqrt(off.dot(M * off)) * std::sqrt(1.0 / lam) + off.dot(M * off);
    }

    double B = std::max(2.0, (std::log(1.0 / epsilon) + 1.0) / decay);
    double tail = shell_tail(B, count, decay);
    while (tail > epsilon) {
        B *= 1.5;
        if (B > 1e9) throw BudgetExceeded("theta_scalar: tail bound not reachable");
        tail = shell_tail(B, count, decay);
    }

    ThetaScalarResult res;
    res.radius = B;
    res.tail_bound = tail;
    std::complex<double> sum = 0.0;
    if (off.size() == 0) {
        for (const auto& ev : enumerate_below(L, {}, B)) {
            const FieldElement q = L.space.quad(lattice_vector(L, ev.coords));
            std::complex<double> ph = 0.0;
            for (int p = 0; p < F.degree(); ++p) ph += F.embed(q, p) * tau[p];
            sum += std::exp(2.0 * kPi * kI * ph);
            ++res.term_count;
        }
    } else {
        const FieldVector mu = coset_vector(L, off);
        for (const auto& ev : enumerate_below(L, {}, B + off_slack)) {
            FieldVector y = lattice_vector(L, ev.coords);
            for (int rdx = 0; rdx < y.size(); ++rdx) y(rdx) = y(rdx) + mu(rdx);
            const FieldElement q = L.space.quad(y);
            std::complex<double> ph = 0.0;
            for (int p = 0; p < F.degree(); ++p) ph += F.embed(q, p) * tau[p];
            sum += std::exp(2.0 * kPi * kI * ph);
            ++res.term_count;
        }
    }
    res.value = sum;
    return res;
}

KMThetaResult km_theta(const GeneratingSeriesSpec& spec, const std::vector<SymplecticElement>& gs,
                       const std::vector<Eigen::MatrixXd>& v_scale) {
    const OLattice& L = spec.lattice;
    const QuadraticSpace& V = L.space;
    const TotallyRealField& F = V.field();
    const int d = F.degree();
    const int r = spec.r;
    const int w = V.dim();
    if (static_cast<int>(gs.size()) != d)
        throw std::invalid_argument("km_theta: need one symplectic element per place");
    if (static_cast<int>(spec.frames.size()) != V.e())
        throw std::invalid_argument("km_theta: frame count mismatch");
    if (spec.epsilon <= 0.0) throw std::invalid_argument("km_theta: epsilon must be positive");

    std::vector<Eigen::MatrixXd> scale = v_scale;
    double cmin = 0.5, kfac = 1.0;
    for (int p = 0; p < d; ++p) {
        if (gs[p].genus() != r) throw std::invalid_argument("km_theta: genus mismatch");
        const IwasawaResult iw = iwasawa(gs[p]);
        const Eigen::MatrixXd W = iw.v * iw.v.transpose();
        cmin = std::min(cmin, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(W).eigenvalues().minCoeff());
        double detv = 1.0;
        for (int i = 0; i < r; ++i) detv *= iw.v(i, i);
        kfac *= std::pow(detv, 0.5 * w);
        if (scale.size() == static_cast<size_t>(p)) scale.push_back(iw.v.transpose());
    }
    if (static_cast<int>(scale.size()) != d && v_scale.empty())
        throw std::logic_error("km_theta: scale assembly failed");
    if (!v_scale.empty() && static_cast<int>(v_scale.size()) != d)
        throw std::invalid_argument("km_theta: v_scale length mismatch");
    // omega2 consumes one scale matrix per indefinite place only.
    std::vector<Eigen::MatrixXd> omega_scale(scale.begin(), scale.begin() + V.e());

    const Eigen::MatrixXd M = total_majorant(L, spec.taus);
    const Eigen::VectorXd bd = box_diag(M);
    const double decay = 2.0 * kPi * cmin;
    const double poly = 2.0 * r * d + 1.0;
    auto count = [&](double z) {
        return box_count(z, bd) * std::pow(1.0 + 2.0 * z, poly);
    };

    double B = std::max(2.0, (std::log(1.0 / spec.epsilon) + poly + 1.0) / decay);
    double tail = r * std::max(1.0, kfac) * std::pow(count(B), r - 1) * shell_tail(B, count, decay);
    while (tail > spec.epsilon) {
        B *= 1.5;
        if (B > 1e9) throw BudgetExceeded("km_theta: tail bound not reachable");
        tail = r * std::max(1.0, kfac) * std::pow(count(B), r - 1) * shell_tail(B, count, decay);
    }

    const bool shifted = !offset_is_zero(spec.coset_offset);
    const FieldVector mu = shifted ? coset_vector(L, spec.coset_offset) : FieldVector();
    const auto pts = enumerate_below(L, spec.taus, B);

    KMThetaResult res;
    res.radius = B;
    res.tail_bound = tail;
    VectorTuple tuple(r);
    std::function<void(int)> descend = [&](int slot) {
        if (slot == r) {
            const FieldMatrix T = V.intersection_matrix(tuple);
            const std::complex<double> Wv = whittaker_hilbert(F, T, gs, w);
            if (Wv != std::complex<double>(0.0, 0.0)) {
                res.value.accumulate(omega2(V, tuple, spec.frames, omega_scale), Wv);
                ++res.term_count;
            }
            return;
        }
        for (const auto& ev : pts) {
            FieldVector y = lattice_vector(L, ev.coords);
            if (shifted)
                for (int rdx = 0; rdx < y.size(); ++rdx) y(rdx) = y(rdx) + mu(rdx);
            tuple[slot] = std::move(y);
            descend(slot + 1);
        }
    };
    descend(0);
    return res;
}

CoefficientResult coefficient_of_T(const GeneratingSeriesSpec& spec, const FieldMatrix& T,
                                   double user_bound, const std::vector<Eigen::MatrixXd>& v_scale) {
    const QuadraticSpace& V = spec.lattice.space;
    const TotallyRealField& F = V.field();
    if (!offset_is_zero(spec.coset_offset))
        throw std::invalid_argument("coefficient_of_T: coset offsets unsupported here");
    if (T.rows() != spec.r || T.cols() != spec.r)
        throw std::invalid_argument("coefficient_of_T: T size mismatch");

    CoefficientResult res;
    for (int p = 0; p < F.degree(); ++p) {
        Eigen::MatrixXd Tp(spec.r, spec.r);
        for (int i = 0; i < spec.r; ++i)
            for (int j = 0; j < spec.r; ++j) Tp(i, j) = F.embed(T(i, j), p);
        if (Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(Tp).eigenvalues().minCoeff() < -1e-12)
            return res; // psd gate: zero, and trivially complete
    }

    std::vector<Eigen::MatrixXd> omega_scale;
    if (!v_scale.empty()) {
        if (static_cast<int>(v_scale.size()) < V.e())
            throw std::invalid_argument("coefficient_of_T: v_scale length mismatch");
        omega_scale.assign(v_scale.begin(), v_scale.begin() + V.e());
    }
    FiberResult fib = fibers_with_T(spec.lattice, T, spec.taus, user_bound);
    res.complete = fib.complete;
    for (const auto& ys : fib.tuples)
        res.value.accumulate(omega2(V, ys, spec.frames, omega_scale), 1.0);
    return res;
}

std::vector<FieldMatrix> t_keys_below(const OLattice& L, const PolyPeriodPoint& taus, int r,
                                      double bound) {
    if (r < 1 || r > 3) throw std::invalid_argument("t_keys_below: r out of range");
    const QuadraticSpace& V = L.space;
    const auto pts = enumerate_below(L, taus, bound);
    std::map<std::string, FieldMatrix> keys;
    VectorTuple tuple(r);
    std::function<void(int)> descend = [&](int slot) {
        if (slot == r) {
            FieldMatrix T = V.intersection_matrix(tuple);
            keys.emplace(t_key(V.field(), T), std::move(T));
            return;
        }
        for (const auto& ev : pts) {
            tuple[slot] = lattice_vector(L, ev.coords);
            descend(slot + 1);
        }
    };
    descend(0);
    std::vector<FieldMatrix> out;
    for (auto& [k, T] : keys) out.push_back(std::move(T));
    return out;
}

double modularity_check_translation(const GeneratingSeriesSpec& spec,
                                    const std::vector<SymplecticElement>& gs,
                                    const FieldElement& mu) {
    const TotallyRealField& F = spec.lattice.space.field();
    std::vector<SymplecticElement> shifted;
    for (int p = 0; p < F.degree(); ++p) {
        const Eigen::MatrixXd u0 =
            F.embed(mu, p) * Eigen::MatrixXd::Identity(spec.r, spec.r);
        shifted.push_back(sp_mul(sp_n(u0), gs[p]));
    }
    const KMThetaResult base = km_theta(spec, gs);
    const KMThetaResult moved = km_theta(spec, shifted);
    return base.value.max_abs_diff(moved.value);
}

double modularity_check_inversion(const OLattice& L, const std::vector<std::complex<double>>& taus,
                                  double epsilon) {
    const TotallyRealField& F = L.space.field();
    if (F.degree() != 1)
        throw std::invalid_argument("modularity_check_inversion: rational base field only");
    if (taus.empty()) throw std::invalid_argument("modularity_check_inversion: no sample points");

    const int m = L.zrank();
    const FieldMatrix G = trace_gram(L);
    Eigen::MatrixXd Gd(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) Gd(i, j) = G(i, j).a.get_d();
    const double detG = Gd.determinant();
    if (detG <= 0.0) throw std::invalid_argument("modularity_check_inversion: degenerate gram");
    const OLattice dual = dual_lattice(L);

    // One enumeration per lattice at the worst sample height, then cheap phase
    // sums per tau; re-running the full theta pipeline for every sample point
    // would redo identical enumerations 2|taus| times.
    auto q_cache = [&](const OLattice& lat, double ymin) {
        const Eigen::MatrixXd M = total_majorant(lat, {});
        const Eigen::VectorXd bd = box_diag(M);
        auto count = [&](double z) { return box_count(z, bd); };
        const double decay = 2.0 * kPi * ymin;
        double B = std::max(2.0, (std::log(1.0 / epsilon) + 1.0) / decay);
        double tail = shell_tail(B, count, decay);
        while (tail > epsilon) {
            B *= 1.5;
            if (B > 1e9) throw BudgetExceeded("modularity_check_inversion: tail bound not reachable");
            tail = shell_tail(B, count, decay);
        }
        // Definite, degree one: qmaj is the embedded form value itself.
        std::vector<double> qs;
        for (const auto& ev : enumerate_below(lat, {}, B)) qs.push_back(ev.qmaj);
        return qs;
    };
    auto theta_from = [](const std::vector<double>& qs, std::complex<double> tau) {
        std::complex<double> s = 0.0;
        for (double q : qs) s += std::exp(2.0 * kPi * kI * q * tau);
        return s;
    };

    double ymin_l = std::numeric_limits<double>::infinity();
    double ymin_r = std::numeric_limits<double>::infinity();
    for (const auto& tau : taus) {
        ymin_l = std::min(ymin_l, (-1.0 / tau).imag());
        ymin_r = std::min(ymin_r, tau.imag());
    }
    if (ymin_l < 0.1 || ymin_r < 0.1)
        throw std::invalid_argument("modularity_check_inversion: Im tau must be >= 0.1 on both sides");
    const std::vector<double> qs_l = q_cache(L, ymin_l);
    const std::vector<double> qs_r = q_cache(dual, ymin_r);

    double worst = 0.0;
    for (const auto& tau : taus) {
        const std::complex<double> lhs = theta_from(qs_l, -1.0 / tau);
        const std::complex<double> rhs =
            std::pow(tau / kI, 0.5 * m) / std::sqrt(detG) * theta_from(qs_r, tau);
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(rhs), 1e-300));
    }
    return worst;
}

} // namespace kmt
