#include "kmt/greens.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace kmt {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kEulerGamma = 0.57721566490153286;
constexpr double kSingularTol = 1e-12;

double fit_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const size_t n = xs.size();
    if (n < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) < 1e-300) return 0.0;
    return (n * sxy - sx * sy) / det;
}

} // namespace

double exp_integral_f(double t) {
    if (!(t > 0.0)) throw std::domain_error("exp_integral_f: t must be positive");
    if (t <= 1.5) {
        // E1(t) = -log t - gamma + sum_{k>=1} (-1)^{k+1} t^k / (k k!)
        double sum = 0.0, term = 1.0;
        for (int k = 1; k < 64; ++k) {
            term *= -t / k;
            const double add = -term / k;
            sum += add;
            if (std::abs(add) < 1e-18 * (std::abs(sum) + 1.0)) break;
        }
        return -std::log(t) - kEulerGamma + sum;
    }
    // Even-contracted continued fraction (modified Lentz):
    // E1(t) = e^{-t} / (t + 1 - 1^2/(t + 3 - 2^2/(t + 5 - ...)))
    const double tiny = 1e-300;
    double b = t + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double f = d;
    for (int k = 1; k < 200; ++k) {
        const double a = -static_cast<double>(k) * k;
        b += 2.0;
        d = b + a * d;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = c * d;
        f *= delta;
        if (std::abs(delta - 1.0) < 1e-15) break;
    }
    return std::exp(-t) * f;
}

double green_eta0(const QuadraticSpace& V, const PeriodPoint& tau,
                  const Eigen::VectorXd& x_embedded) {
    const double R = majorant_R(V, tau, x_embedded);
    if (R <= kSingularTol) throw std::domain_error("green_eta0: point on the singular locus");
    return exp_integral_f(2.0 * kPi * R);
}

std::vector<StarWord> star_expansion(int N) {
    if (N < 1) throw std::invalid_argument("star_expansion: N must be >= 1");
    std::vector<StarWord> words;
    for (int j = 0; j < N; ++j) {
        StarWord w;
        for (int s = 0; s < j; ++s) w.push_back({StarSymbolKind::Phi, s});
        w.push_back({StarSymbolKind::F, j});
        for (int s = j + 1; s < N; ++s) w.push_back({StarSymbolKind::Delta, s});
        words.push_back(std::move(w));
    }
    return words;
}

std::vector<StarWord> star_expansion_recursive(int N) {
    if (N < 1) throw std::invalid_argument("star_expansion: N must be >= 1");
    std::function<std::vector<StarWord>(int)> expand = [&](int lo) {
        if (lo == N - 1) return std::vector<StarWord>{{{StarSymbolKind::F, lo}}};
        std::vector<StarWord> words;
        StarWord head{{StarSymbolKind::F, lo}};
        for (int s = lo + 1; s < N; ++s) head.push_back({StarSymbolKind::Delta, s});
        words.push_back(std::move(head));
        for (auto& rest : expand(lo + 1)) {
            StarWord w{{StarSymbolKind::Phi, lo}};
            w.insert(w.end(), rest.begin(), rest.end());
            words.push_back(std::move(w));
        }
        return words;
    };
    return expand(0);
}

std::vector<Eta2Term> eta2_value(const QuadraticSpace& V, const VectorTuple& xs,
                                 const PolyPeriodPoint& taus,
                                 const std::vector<KMFrame>& frames, bool throw_on_singular) {
    const TotallyRealField& F = V.field();
    const int e = V.e();
    const int k = static_cast<int>(xs.size());
    if (e < 1) throw std::invalid_argument("eta2_value: need at least one indefinite place");
    if (k < 1) throw std::invalid_argument("eta2_value: empty tuple");
    if (static_cast<int>(taus.size()) < e || static_cast<int>(frames.size()) != e)
        throw std::invalid_argument("eta2_value: need tau and frame per indefinite place");

    const int N = e * k;
    std::vector<double> slot_R(N);
    std::vector<ExteriorFormValue> slot_phi(N);
    for (int p = 0; p < e; ++p)
        for (int j = 0; j < k; ++j) {
            const Eigen::VectorXd emb = embed_vector(F, xs[j], p);
            slot_R[p * k + j] = majorant_R(V, taus[p], emb);
            slot_phi[p * k + j] = evaluate_at(frames[p], emb);
        }

    std::vector<Eta2Term> out;
    for (const StarWord& word : star_expansion(N)) {
        Eta2Term term;
        for (const StarSymbol& sym : word) {
            if (sym.kind == StarSymbolKind::F) term.f_slot = sym.slot;
            if (sym.kind == StarSymbolKind::Delta) {
                term.delta_slots.push_back(sym.slot);
                term.delta_on_locus.push_back(slot_R[sym.slot] <= kSingularTol);
            }
        }
        if (slot_R[term.f_slot] <= kSingularTol) {
            if (throw_on_singular)
                throw std::domain_error("eta2_value: tau on the singular locus of an f factor");
            term.f_singular = true;
            term.f_value = std::numeric_limits<double>::quiet_NaN();
        } else {
            term.f_value = exp_integral_f(2.0 * kPi * slot_R[term.f_slot]);
        }
        term.phi_part.assign(e, ExteriorFormValue::one());
        for (int s = 0; s < term.f_slot; ++s)
            term.phi_part[s / k] = wedge(term.phi_part[s / k], slot_phi[s]);
        out.push_back(std::move(term));
    }
    return out;
}

ConvergenceReport eta3_partial_sums(const OLattice& L, const VectorTuple& x,
                                    const PolyPeriodPoint& taus,
                                    const std::vector<KMFrame>& frames,
                                    const std::vector<double>& radii) {
    if (radii.empty()) throw std::invalid_argument("eta3_partial_sums: need radii");
    for (size_t i = 1; i < radii.size(); ++i)
        if (radii[i] <= radii[i - 1])
            throw std::invalid_argument("eta3_partial_sums: radii must increase");

    const QuadraticSpace& V = L.space;
    const TotallyRealField& F = V.field();
    const int e = V.e();
    const int k = static_cast<int>(x.size());
    const int n = V.dim() - 2;
    if (e < 1) throw std::invalid_argument("eta3_partial_sums: need an indefinite place");

    const FieldMatrix T = V.intersection_matrix(x);
    double c0 = 0.0; // max over slots of the trace q-value, fixed on the fiber
    for (int j = 0; j < k; ++j) {
        double tr = 0.0;
        for (int i = 0; i < F.degree(); ++i) tr += 0.5 * F.embed(T(j, j), i);
        c0 = std::max(c0, tr);
    }
    const double rho_max = radii.back();
    FiberResult fib = fibers_with_T(L, T, taus, c0 + 2.0 * rho_max + 0.1);

    ConvergenceReport rep;
    rep.radii = radii;
    rep.fiber_complete = fib.complete;

    // Smooth word: phi at every slot except the last, f at the last slot.
    struct Entry {
        double z;
        double value;
    };
    std::vector<Entry> entries;
    for (const auto& ys : fib.tuples) {
        double z = 0.0;
        std::vector<std::vector<Eigen::VectorXd>> emb(e);
        bool skip = false;
        for (int p = 0; p < e && !skip; ++p) {
            emb[p].resize(k);
            for (int j = 0; j < k; ++j) {
                emb[p][j] = embed_vector(F, ys[j], p);
                z += majorant_R(V, taus[p], emb[p][j]);
            }
        }
        const double R_last = majorant_R(V, taus[e - 1], emb[e - 1][k - 1]);
        if (R_last <= kSingularTol) {
            ++rep.skipped_singular;
            continue;
        }
        double value = exp_integral_f(2.0 * kPi * R_last);
        for (int p = 0; p < e; ++p) {
            const int last = (p == e - 1) ? k - 1 : k;
            std::vector<Eigen::VectorXd> fc;
            for (int j = 0; j < last; ++j) fc.push_back(frame_coords(frames[p], emb[p][j]));
            value *= km_phi_m(fc, n).l1();
        }
        entries.push_back({z, std::abs(value)});
        ++rep.term_count;
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.z < b.z; });

    size_t pos = 0;
    double running = 0.0;
    for (double rho : radii) {
        while (pos < entries.size() && entries[pos].z <= rho) running += entries[pos++].value;
        rep.partial_sums.push_back(running);
    }

    auto model = [n](double rho) { return std::exp(-2.0 * kPi * rho) * std::pow(1.0 + rho, 0.5 * (n + 2)); };
    double C = 0.0;
    std::vector<double> fit_x, fit_y;
    for (size_t l = 1; l < radii.size(); ++l) {
        const double inc = rep.partial_sums[l] - rep.partial_sums[l - 1];
        if (inc > 0.0) {
            fit_x.push_back(radii[l]);
            fit_y.push_back(std::log(inc));
            if (C == 0.0 && 2.0 * kPi * radii[l] >= 10.0) C = inc / model(radii[l]);
        }
    }
    rep.fitted_exponent = fit_x.size() >= 2 ? -fit_slope(fit_x, fit_y) : 0.0;
    for (double rho : radii) rep.tail_estimates.push_back(C * model(rho));
    return rep;
}

CountReport count_bounded_R(const OLattice& L, const PolyPeriodPoint& taus,
                            const std::vector<double>& N_list, double q_ref) {
    CountReport rep;
    rep.Ns = N_list;
    rep.q_ref = q_ref;
    double nmax = 0.0;
    for (double N : N_list) {
        if (N < 0.0) throw std::invalid_argument("count_bounded_R: negative N");
        nmax = std::max(nmax, N);
    }
    const auto pts = enumerate_below(L, taus, q_ref + 2.0 * nmax);
    std::vector<double> fit_x, fit_y;
    for (double N : N_list) {
        const double cap = q_ref + 2.0 * N;
        const long long cnt = std::count_if(pts.begin(), pts.end(),
                                            [cap](const EnumeratedVector& v) { return v.qmaj <= cap; });
        rep.counts.push_back(cnt);
        if (N > 0.0 && cnt > 0) {
            fit_x.push_back(std::log(N));
            fit_y.push_back(std::log(static_cast<double>(cnt)));
        }
    }
    rep.fitted_exponent = fit_slope(fit_x, fit_y);
    return rep;
}

double ddc_check(const QuadraticSpace& V, const Eigen::VectorXd& x_embedded, int place,
                 const Chart& chart, const Eigen::VectorXcd& w0, int grid, double h,
                 double spacing) {
    if (V.dim() != 3) throw std::invalid_argument("ddc_check: requires n = 1");
    if (chart.place != place) throw std::invalid_argument("ddc_check: chart place mismatch");
    if (w0.size() != 1) throw std::invalid_argument("ddc_check: chart must have one free coordinate");
    if (grid < 1 || h <= 0.0) throw std::invalid_argument("ddc_check: bad grid parameters");

    auto eta = [&](std::complex<double> w) {
        Eigen::VectorXcd wv(1);
        wv(0) = w;
        return green_eta0(V, chart_point(V, chart, wv), x_embedded);
    };

    double max_abs = 0.0, max_diff = 0.0;
    const double half = 0.5 * (grid - 1) * spacing;
    for (int a = 0; a < grid; ++a)
        for (int b = 0; b < grid; ++b) {
            const std::complex<double> w = w0(0) + std::complex<double>(a * spacing - half,
                                                                       b * spacing - half);
            Eigen::VectorXcd wv(1);
            wv(0) = w;
            const PeriodPoint tau = chart_point(V, chart, wv);
            if (majorant_R(V, tau, x_embedded) < 0.5)
                throw std::domain_error("ddc_check: grid point too close to the singular locus");

            const double lap = (eta(w + std::complex<double>(h, 0)) + eta(w - std::complex<double>(h, 0)) +
                                eta(w + std::complex<double>(0, h)) + eta(w - std::complex<double>(0, h)) -
                                4.0 * eta(w)) /
                               (h * h);
            const double lhs = lap / (4.0 * kPi);

            const KMFrame fr = make_km_frame(V, tau);
            const Eigen::MatrixXd P =
                chart_pullback_2form(evaluate_at(fr, x_embedded), chart_tangents(V, chart, wv, h), fr.n);
            const double rhs = P(0, 1);

            max_abs = std::max(max_abs, std::abs(rhs));
            max_diff = std::max(max_diff, std::abs(lhs - rhs));
        }
    return max_diff / std::max(max_abs, 1e-300);
}

} // namespace kmt
