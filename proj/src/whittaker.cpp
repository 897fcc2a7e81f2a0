#include "kmt/whittaker.hpp"

#include <cmath>
#include <stdexcept>

namespace kmt {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

Eigen::MatrixXd symplectic_J(int r) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * r, 2 * r);
    J.topRightCorner(r, r) = Eigen::MatrixXd::Identity(r, r);
    J.bottomLeftCorner(r, r) = -Eigen::MatrixXd::Identity(r, r);
    return J;
}

} // namespace

Eigen::MatrixXd SymplecticElement::A() const {
    const int r = genus();
    return matrix.topLeftCorner(r, r);
}
Eigen::MatrixXd SymplecticElement::B() const {
    const int r = genus();
    return matrix.topRightCorner(r, r);
}
Eigen::MatrixXd SymplecticElement::C() const {
    const int r = genus();
    return matrix.bottomLeftCorner(r, r);
}
Eigen::MatrixXd SymplecticElement::D() const {
    const int r = genus();
    return matrix.bottomRightCorner(r, r);
}

bool is_symplectic(const Eigen::MatrixXd& g, double tol) {
    if (g.rows() != g.cols() || g.rows() % 2 != 0 || g.rows() == 0) return false;
    const int r = static_cast<int>(g.rows()) / 2;
    const Eigen::MatrixXd J = symplectic_J(r);
    return (g.transpose() * J * g - J).cwiseAbs().maxCoeff() <= tol;
}

SymplecticElement sp_identity(int r) {
    return {Eigen::MatrixXd::Identity(2 * r, 2 * r), 0};
}

SymplecticElement sp_n(const Eigen::MatrixXd& u) {
    if (u.rows() != u.cols() || (u - u.transpose()).cwiseAbs().maxCoeff() > 1e-12)
        throw std::invalid_argument("sp_n: u must be symmetric");
    const int r = static_cast<int>(u.rows());
    SymplecticElement g = sp_identity(r);
    g.matrix.topRightCorner(r, r) = u;
    return g;
}

SymplecticElement sp_m(const Eigen::MatrixXd& v) {
    const int r = static_cast<int>(v.rows());
    if (v.cols() != r) throw std::invalid_argument("sp_m: v must be square");
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(v);
    if (std::abs(lu.determinant()) < 1e-14) throw std::invalid_argument("sp_m: v singular");
    SymplecticElement g = sp_identity(r);
    g.matrix.topLeftCorner(r, r) = v;
    g.matrix.bottomRightCorner(r, r) = lu.inverse().transpose();
    return g;
}

SymplecticElement sp_mul(const SymplecticElement& a, const SymplecticElement& b) {
    return {a.matrix * b.matrix, (a.branch + b.branch) & 1};
}

SiegelPoint siegel_point(const SymplecticElement& g) {
    const int r = g.genus();
    const std::complex<double> i(0.0, 1.0);
    const Eigen::MatrixXcd num = i * g.A().cast<std::complex<double>>() + g.B().cast<std::complex<double>>();
    const Eigen::MatrixXcd den = i * g.C().cast<std::complex<double>>() + g.D().cast<std::complex<double>>();
    SiegelPoint p;
    p.tau = num * den.inverse();
    p.tau = 0.5 * (p.tau + p.tau.transpose().eval()); // symmetrize away roundoff
    (void)r;
    return p;
}

IwasawaResult iwasawa(const SymplecticElement& g) {
    if (!is_symplectic(g.matrix)) throw std::invalid_argument("iwasawa: input not symplectic");
    const int r = g.genus();
    const SiegelPoint p = siegel_point(g);

    IwasawaResult res;
    res.u = p.tau.real();
    const Eigen::MatrixXd W = p.tau.imag();

    // Upper-triangular v with positive diagonal and v v^T = W: reverse the
    // coordinate order, take the lower Cholesky factor, reverse back.
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(r, r);
    for (int i = 0; i < r; ++i) P(i, r - 1 - i) = 1.0;
    Eigen::LLT<Eigen::MatrixXd> llt(P * W * P);
    if (llt.info() != Eigen::Success)
        throw std::invalid_argument("iwasawa: imaginary part not positive definite");
    res.v = P * Eigen::MatrixXd(llt.matrixL()) * P;

    SymplecticElement nm = sp_mul(sp_n(res.u), sp_m(res.v));
    res.k.matrix = nm.matrix.inverse() * g.matrix;
    res.k.branch = g.branch;

    if ((nm.matrix * res.k.matrix - g.matrix).cwiseAbs().maxCoeff() > 1e-10)
        throw std::runtime_error("iwasawa: reconstruction failed");
    const Eigen::MatrixXcd AiB =
        res.k.A().cast<std::complex<double>>() +
        std::complex<double>(0, 1) * res.k.B().cast<std::complex<double>>();
    if ((AiB.adjoint() * AiB - Eigen::MatrixXcd::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-8)
        throw std::runtime_error("iwasawa: compact part not unitary");
    return res;
}

std::complex<double> det_half(const SymplecticElement& k) {
    const Eigen::MatrixXcd AiB =
        k.A().cast<std::complex<double>>() +
        std::complex<double>(0, 1) * k.B().cast<std::complex<double>>();
    const std::complex<double> d = AiB.determinant();
    return k.branch ? -d : d;
}

std::complex<double> whittaker_W(const Eigen::MatrixXd& beta, const SymplecticElement& g,
                                 int weight_dim) {
    const int r = g.genus();
    if (beta.rows() != r || beta.cols() != r ||
        (beta - beta.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("whittaker_W: beta must be symmetric r x r");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(beta);
    if (es.eigenvalues().minCoeff() < -1e-12) return 0.0;

    const IwasawaResult iw = iwasawa(g);
    const Eigen::MatrixXcd tau =
        iw.u.cast<std::complex<double>>() +
        std::complex<double>(0, 1) * (iw.v * iw.v.transpose()).cast<std::complex<double>>();
    const std::complex<double> phase =
        std::exp(std::complex<double>(0, 2.0 * kPi) * (beta.cast<std::complex<double>>() * tau).trace());
    double detv = 1.0;
    for (int i = 0; i < r; ++i) detv *= iw.v(i, i);
    const std::complex<double> kchar = std::pow(det_half(iw.k), weight_dim);
    return std::pow(detv, 0.5 * weight_dim) * phase * kchar;
}

std::complex<double> whittaker_hilbert(const TotallyRealField& F, const FieldMatrix& beta,
                                       const std::vector<SymplecticElement>& gs, int weight_dim) {
    if (static_cast<int>(gs.size()) != F.degree())
        throw std::invalid_argument("whittaker_hilbert: need one element per place");
    const int r = static_cast<int>(beta.rows());
    std::complex<double> prod = 1.0;
    for (int p = 0; p < F.degree(); ++p) {
        Eigen::MatrixXd b(r, r);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < r; ++j) b(i, j) = F.embed(beta(i, j), p);
        const std::complex<double> w = whittaker_W(b, gs[p], weight_dim);
        if (w == std::complex<double>(0.0, 0.0)) return 0.0;
        prod *= w;
    }
    return prod;
}

double gaussian_standard(const QuadraticSpace& V, const VectorTuple& xs) {
    if (V.e() != 0) throw std::invalid_argument("gaussian_standard: space must be totally definite");
    double tr = 0.0;
    for (const auto& x : xs) {
        const FieldElement q2 = V.inner(x, x); // (x,x) = 2 q(x)
        for (int p = 0; p < V.field().degree(); ++p) tr += V.field().embed(q2, p);
    }
    return std::exp(-kPi * tr);
}

long FrFTGrid::size() const {
    long s = 1;
    for (int a = 0; a < dim; ++a) s *= points_per_axis;
    return s;
}

double FrFTGrid::step() const { return 2.0 * extent / (points_per_axis - 1); }

double FrFTGrid::coord(int index) const { return -extent + index * step(); }

std::vector<std::complex<double>> fractional_fourier_oracle(
    const std::vector<std::complex<double>>& samples, const FrFTGrid& grid, double theta,
    int n_pos) {
    if (grid.dim < 1 || grid.dim > 3)
        throw std::invalid_argument("fractional_fourier_oracle: dim must be 1..3");
    if (grid.points_per_axis < 8 || grid.extent <= 0.0)
        throw std::invalid_argument("fractional_fourier_oracle: bad grid");
    if (static_cast<long>(samples.size()) != grid.size())
        throw std::invalid_argument("fractional_fourier_oracle: sample count mismatch");
    if (n_pos < 0 || n_pos > grid.dim)
        throw std::invalid_argument("fractional_fourier_oracle: bad coordinate split");

    const int N = grid.points_per_axis;
    const double dx = grid.step();

    auto kernel = [&](double ang) {
        Eigen::MatrixXcd K(N, N);
        if (std::abs(std::sin(ang)) < 1e-12) {
            // theta = 0 mod pi: identity (or parity flip, not needed here)
            K.setIdentity();
            return K;
        }
        const double ct = std::cos(ang) / std::sin(ang);
        const double cs = 1.0 / std::sin(ang);
        const std::complex<double> amp = std::sqrt(std::complex<double>(1.0, -ct)) * dx;
        for (int a = 0; a < N; ++a) {
            const double xi = grid.coord(a);
            for (int b = 0; b < N; ++b) {
                const double x = grid.coord(b);
                const double ph = kPi * ct * (xi * xi + x * x) - 2.0 * kPi * cs * xi * x;
                K(a, b) = amp * std::exp(std::complex<double>(0.0, ph));
            }
        }
        return K;
    };

    std::vector<std::complex<double>> out = samples;
    // Row-major layout: axis 0 is the slowest index.
    long stride_after = 1;
    std::vector<long> strides(grid.dim);
    for (int a = grid.dim - 1; a >= 0; --a) {
        strides[a] = stride_after;
        stride_after *= N;
    }
    for (int axis = 0; axis < grid.dim; ++axis) {
        const Eigen::MatrixXcd K = kernel(axis < n_pos ? theta : -theta);
        const long stride = strides[axis];
        const long total = grid.size();
        std::vector<std::complex<double>> line(N), tline(N);
        for (long base = 0; base < total; ++base) {
            if ((base / stride) % N != 0) continue; // visit each line once
            for (int i = 0; i < N; ++i) line[i] = out[base + i * stride];
            for (int i = 0; i < N; ++i) {
                std::complex<double> s = 0.0;
                for (int j = 0; j < N; ++j) s += K(i, j) * line[j];
                tline[i] = s;
            }
            for (int i = 0; i < N; ++i) out[base + i * stride] = tline[i];
        }
    }

    double ein = 0.0, eout = 0.0;
    for (const auto& s : samples) ein += std::norm(s);
    for (const auto& s : out) eout += std::norm(s);
    if (ein > 0.0 && std::abs(std::sqrt(eout) - std::sqrt(ein)) > 0.01 * std::sqrt(ein))
        throw std::domain_error("fractional_fourier_oracle: grid too coarse (energy loss)");
    return out;
}

} // namespace kmt
