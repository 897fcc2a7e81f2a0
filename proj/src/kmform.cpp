#include "kmt/kmform.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace kmt {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

int merge_inversions(unsigned a, unsigned b) {
    int inv = 0;
    while (b) {
        const int bit = std::countr_zero(b);
        inv += std::popcount(a >> (bit + 1));
        b &= b - 1;
    }
    return inv;
}

double pair_embedded(const Eigen::MatrixXd& S, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
    return x.dot(S * y);
}

// Shared Gram-Schmidt kernel: orthonormalize `seeds` columns against the
// normalized plane pair of tau and previously accepted columns.
Eigen::MatrixXd complete_frame(const QuadraticSpace& V, const PeriodPoint& tau,
                               const Eigen::MatrixXd& seeds, int want) {
    const Eigen::MatrixXd S = V.gram_embedded(tau.place);
    const double na = pair_embedded(S, tau.alpha, tau.alpha);
    const double nb = pair_embedded(S, tau.beta, tau.beta);
    const Eigen::VectorXd v1 = tau.alpha / std::sqrt(-na);
    const Eigen::VectorXd v2 = tau.beta / std::sqrt(-nb);
    const int d = V.dim();

    Eigen::MatrixXd frame(d, want + 2);
    int got = 0;
    for (int s = 0; s < seeds.cols() && got < want; ++s) {
        Eigen::VectorXd r = seeds.col(s);
        r += pair_embedded(S, r, v1) * v1;
        r += pair_embedded(S, r, v2) * v2;
        for (int i = 0; i < got; ++i)
            r -= pair_embedded(S, r, frame.col(i)) * frame.col(i);
        const double rr = pair_embedded(S, r, r);
        if (rr > 1e-10 * std::max(1.0, seeds.col(s).squaredNorm()))
            frame.col(got++) = r / std::sqrt(rr);
    }
    if (got != want) throw std::runtime_error("km frame: positive completion failed");
    frame.col(want) = v1;
    frame.col(want + 1) = v2;
    return frame;
}

KMFrame finish_frame(const QuadraticSpace& V, const PeriodPoint& z0, Eigen::MatrixXd frame) {
    KMFrame fr;
    fr.place = z0.place;
    fr.n = V.dim() - 2;
    fr.z0 = z0;
    fr.frame = std::move(frame);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(fr.frame);
    if (std::abs(lu.determinant()) < 1e-10)
        throw std::runtime_error("km frame: ill-conditioned frame");
    fr.to_frame = lu.inverse();
    return fr;
}

} // namespace

KMFrame make_km_frame(const QuadraticSpace& V, const PeriodPoint& z0) {
    return finish_frame(V, z0, adapted_frame(V, z0));
}

KMFrame make_km_frame_with_positive_span(const QuadraticSpace& V, const PeriodPoint& z0,
                                         const Eigen::MatrixXd& U, const Eigen::MatrixXd& seeds) {
    const Eigen::MatrixXd S = V.gram_embedded(z0.place);
    for (int c = 0; c < U.cols(); ++c) {
        const double drift = std::abs(pair_embedded(S, U.col(c), z0.alpha)) +
                             std::abs(pair_embedded(S, U.col(c), z0.beta));
        if (drift > 1e-10 * std::max(1.0, U.col(c).squaredNorm()))
            throw std::invalid_argument("km frame: U is not orthogonal to the plane");
    }
    Eigen::MatrixXd all(V.dim(), U.cols() + seeds.cols());
    all << U, seeds;
    return finish_frame(V, z0, complete_frame(V, z0, all, V.dim() - 2));
}

Eigen::VectorXd frame_coords(const KMFrame& fr, const Eigen::VectorXd& x) {
    return fr.to_frame * x;
}

ExteriorFormValue ExteriorFormValue::one() {
    ExteriorFormValue v;
    v.terms_[{0u, 0u}] = 1.0;
    return v;
}

void ExteriorFormValue::add_term(unsigned s1, unsigned s2, double c) {
    if (c == 0.0) return;
    terms_[{s1, s2}] += c;
}

double ExteriorFormValue::coefficient(unsigned s1, unsigned s2) const {
    auto it = terms_.find({s1, s2});
    return it == terms_.end() ? 0.0 : it->second;
}

ExteriorFormValue& ExteriorFormValue::operator+=(const ExteriorFormValue& o) {
    for (const auto& [k, c] : o.terms_) terms_[k] += c;
    return *this;
}

ExteriorFormValue ExteriorFormValue::scaled(double c) const {
    ExteriorFormValue out;
    for (const auto& [k, v] : terms_) out.terms_[k] = v * c;
    return out;
}

double ExteriorFormValue::linf() const {
    double m = 0.0;
    for (const auto& [k, v] : terms_) m = std::max(m, std::abs(v));
    return m;
}

double ExteriorFormValue::l1() const {
    double s = 0.0;
    for (const auto& [k, v] : terms_) s += std::abs(v);
    return s;
}

ExteriorFormValue wedge(const ExteriorFormValue& a, const ExteriorFormValue& b) {
    ExteriorFormValue out;
    for (const auto& [ka, ca] : a.terms_) {
        for (const auto& [kb, cb] : b.terms_) {
            if ((ka.first & kb.first) || (ka.second & kb.second)) continue;
            const int parity = std::popcount(ka.second) * std::popcount(kb.first) +
                               merge_inversions(ka.first, kb.first) +
                               merge_inversions(ka.second, kb.second);
            const double sign = (parity & 1) ? -1.0 : 1.0;
            out.add_term(ka.first | kb.first, ka.second | kb.second, sign * ca * cb);
        }
    }
    return out;
}

ExteriorFormValue operator+(ExteriorFormValue a, const ExteriorFormValue& b) {
    a += b;
    return a;
}

void PlacesFormSum::accumulate(const PlacesFormValue& form, std::complex<double> weight) {
    // Expand the tensor product over places into flat keyed terms.
    std::vector<std::pair<Key, std::complex<double>>> acc{{Key{}, weight}};
    for (const auto& place_val : form) {
        std::vector<std::pair<Key, std::complex<double>>> next;
        for (const auto& [key, c] : acc) {
            for (const auto& [k, v] : place_val.terms()) {
                Key nk = key;
                nk.push_back(k);
                next.emplace_back(std::move(nk), c * v);
            }
        }
        acc = std::move(next);
    }
    for (auto& [k, c] : acc) terms[k] += c;
}

double PlacesFormSum::max_abs_diff(const PlacesFormSum& o) const {
    double m = 0.0;
    for (const auto& [k, c] : terms) {
        auto it = o.terms.find(k);
        m = std::max(m, std::abs(c - (it == o.terms.end() ? 0.0 : it->second)));
    }
    for (const auto& [k, c] : o.terms)
        if (!terms.count(k)) m = std::max(m, std::abs(c));
    return m;
}

double PlacesFormSum::l1() const {
    double s = 0.0;
    for (const auto& [k, c] : terms) s += std::abs(c);
    return s;
}

PlacesFormSum PlacesFormSum::scaled(std::complex<double> c) const {
    PlacesFormSum out;
    for (const auto& [k, v] : terms) out.terms[k] = v * c;
    return out;
}

ExteriorFormValue km_phi1(const Eigen::VectorXd& y, int n) {
    if (y.size() != n + 2) throw std::invalid_argument("km_phi1: coordinate size mismatch");
    double R = 0.0;
    for (int a = n; a < n + 2; ++a) R += 0.5 * y(a) * y(a);
    const double g = std::exp(-kTwoPi * R);
    ExteriorFormValue out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double c = y(i) * y(j) - (i == j ? 1.0 / kTwoPi : 0.0);
            out.add_term(1u << i, 1u << j, g * c);
        }
    return out;
}

ExteriorFormValue km_phi_m(const std::vector<Eigen::VectorXd>& ys, int n) {
    ExteriorFormValue out = ExteriorFormValue::one();
    for (const auto& y : ys) out = wedge(out, km_phi1(y, n));
    return out;
}

ExteriorFormValue km_phi_circ(const std::vector<Eigen::VectorXd>& ys, int n, CircWeight weight) {
    double expo = 0.0;
    for (const auto& y : ys) {
        if (weight == CircWeight::Majorant) {
            expo += 0.5 * y.squaredNorm();
        } else {
            for (int i = 0; i < n; ++i) expo += 0.5 * y(i) * y(i);
        }
    }
    return km_phi_m(ys, n).scaled(std::exp(-kTwoPi * expo));
}

ExteriorFormValue km_zero_form(int r, int n) {
    if (r < 1) throw std::invalid_argument("km_zero_form: r must be >= 1");
    ExteriorFormValue base;
    for (int i = 0; i < n; ++i) base.add_term(1u << i, 1u << i, -1.0 / kTwoPi);
    ExteriorFormValue out = ExteriorFormValue::one();
    for (int k = 0; k < r; ++k) out = wedge(out, base);
    return (r & 1) ? out.scaled(-1.0) : out;
}

ExteriorFormValue evaluate_at(const KMFrame& fr, const Eigen::VectorXd& x) {
    return km_phi1(frame_coords(fr, x), fr.n);
}

PlacesFormValue omega2(const QuadraticSpace& V, const VectorTuple& xs,
                       const std::vector<KMFrame>& frames,
                       const std::vector<Eigen::MatrixXd>& scale) {
    const TotallyRealField& F = V.field();
    if (static_cast<int>(frames.size()) != V.e())
        throw std::invalid_argument("omega2: need one frame per indefinite place");
    if (!scale.empty() && scale.size() != frames.size())
        throw std::invalid_argument("omega2: scale list length mismatch");
    const int k = static_cast<int>(xs.size());
    PlacesFormValue out;
    for (int i = 0; i < V.e(); ++i) {
        if (frames[i].place != i) throw std::invalid_argument("omega2: frame place mismatch");
        std::vector<Eigen::VectorXd> emb(k);
        for (int j = 0; j < k; ++j) emb[j] = embed_vector(F, xs[j], i);
        if (!scale.empty()) {
            const Eigen::MatrixXd& v = scale[i];
            if (v.rows() != k || v.cols() != k)
                throw std::invalid_argument("omega2: scale matrix must be k x k");
            std::vector<Eigen::VectorXd> mixed(k, Eigen::VectorXd::Zero(V.dim()));
            for (int m = 0; m < k; ++m)
                for (int j = 0; j < k; ++j) mixed[m] += emb[j] * v(j, m);
            emb = std::move(mixed);
        }
        std::vector<Eigen::VectorXd> ys(k);
        for (int j = 0; j < k; ++j) ys[j] = frame_coords(frames[i], emb[j]);
        out.push_back(km_phi_m(ys, frames[i].n));
    }
    return out;
}

Omega3Result omega3_partial(const OLattice& L, const VectorTuple& x, const PolyPeriodPoint& taus,
                            const std::vector<KMFrame>& frames, const std::vector<double>& radii) {
    if (radii.empty()) throw std::invalid_argument("omega3_partial: need radii");
    for (size_t i = 1; i < radii.size(); ++i)
        if (radii[i] <= radii[i - 1])
            throw std::invalid_argument("omega3_partial: radii must increase");

    const QuadraticSpace& V = L.space;
    const TotallyRealField& F = V.field();
    const FieldMatrix T = V.intersection_matrix(x);
    FiberResult fib = fibers_with_T(L, T, taus, radii.back());

    std::vector<Eigen::MatrixXd> qmat;
    for (int i = 0; i < F.degree(); ++i)
        qmat.push_back(i < V.e() ? majorant_form(V, taus[i])
                                 : Eigen::MatrixXd(0.5 * V.gram_embedded(i)));
    auto tuple_radius = [&](const VectorTuple& ys) {
        double z = 0.0;
        for (const auto& y : ys)
            for (int i = 0; i < F.degree(); ++i) {
                const Eigen::VectorXd ye = embed_vector(F, y, i);
                z += ye.dot(qmat[i] * ye);
            }
        return z;
    };

    std::vector<std::pair<double, const VectorTuple*>> ordered;
    for (const auto& ys : fib.tuples) ordered.emplace_back(tuple_radius(ys), &ys);
    std::sort(ordered.begin(), ordered.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    Omega3Result res;
    res.radii = radii;
    res.fiber_complete = fib.complete;
    PlacesFormSum prev;
    size_t pos = 0;
    for (double rad : radii) {
        while (pos < ordered.size() && ordered[pos].first <= rad) {
            res.value.accumulate(omega2(V, *ordered[pos].second, frames), 1.0);
            ++res.term_count;
            ++pos;
        }
        res.cauchy_linf.push_back(res.value.max_abs_diff(prev));
        prev = res.value;
    }
    return res;
}

double restriction_splitting_check(const QuadraticSpace& V, const VectorTuple& U,
                                   const VectorTuple& xs, const PeriodPoint& tau_U,
                                   CircWeight weight) {
    const TotallyRealField& F = V.field();
    const int k = static_cast<int>(U.size());
    const int n = V.dim() - 2;
    if (!V.is_totally_positive_subspace(U) || field_rank([&] {
            FieldMatrix M(V.dim(), k);
            for (int c = 0; c < k; ++c)
                for (int rr = 0; rr < V.dim(); ++rr) M(rr, c) = U[c](rr);
            return M;
        }()) != k)
        throw std::invalid_argument("restriction_splitting_check: U must be totally positive, independent");

    // Membership of each tuple entry in span(U), exact.
    {
        FieldMatrix M(V.dim(), k + 1);
        for (int c = 0; c < k; ++c)
            for (int rr = 0; rr < V.dim(); ++rr) M(rr, c) = U[c](rr);
        for (const auto& x : xs) {
            for (int rr = 0; rr < V.dim(); ++rr) M(rr, k) = x(rr);
            if (field_rank(M) != k)
                throw std::invalid_argument("restriction_splitting_check: tuple not inside U");
        }
    }

    const int place = tau_U.place;
    Eigen::MatrixXd Uemb(V.dim(), k);
    for (int c = 0; c < k; ++c) Uemb.col(c) = embed_vector(F, U[c], place);

    const VectorTuple Wbasis = V.orthogonal_complement(U);
    const int wdim = static_cast<int>(Wbasis.size());
    FieldMatrix gramW(wdim, wdim);
    for (int i = 0; i < wdim; ++i)
        for (int j = 0; j < wdim; ++j) gramW(i, j) = V.inner(Wbasis[i], Wbasis[j]);
    const QuadraticSpace W(F, gramW, V.e());

    Eigen::MatrixXd Wemb(V.dim(), wdim);
    for (int c = 0; c < wdim; ++c) Wemb.col(c) = embed_vector(F, Wbasis[c], place);

    // tau in complement coordinates.
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Wemb);
    const Eigen::VectorXd ca = qr.solve(tau_U.alpha);
    const Eigen::VectorXd cb = qr.solve(tau_U.beta);
    if ((Wemb * ca - tau_U.alpha).norm() > 1e-8 || (Wemb * cb - tau_U.beta).norm() > 1e-8)
        throw std::invalid_argument("restriction_splitting_check: tau plane not inside U-perp");
    const PeriodPoint tau_W = make_period_point(W, place, ca, cb);

    const KMFrame frV = make_km_frame_with_positive_span(V, tau_U, Uemb, Wemb);
    const KMFrame frW = make_km_frame_with_positive_span(W, tau_W, Eigen::MatrixXd(wdim, 0),
                                                         Eigen::MatrixXd::Identity(wdim, wdim));

    std::vector<Eigen::VectorXd> ys;
    double gauss_expo = 0.0;
    for (const auto& x : xs) {
        ys.push_back(frame_coords(frV, embed_vector(F, x, place)));
        gauss_expo += V.quad_embedded(place, embed_vector(F, x, place));
    }
    const ExteriorFormValue lhs = km_phi_circ(ys, n, weight);

    const std::vector<Eigen::VectorXd> zeros(xs.size(), Eigen::VectorXd::Zero(wdim));
    const ExteriorFormValue rhs =
        km_phi_m(zeros, frW.n).scaled(std::exp(-kTwoPi * gauss_expo));

    // Compare on components supported entirely on the complement directions.
    const unsigned lowmask = (1u << k) - 1u;
    double dev = 0.0;
    for (const auto& [key, c] : rhs.terms()) {
        const unsigned s1 = key.first << k, s2 = key.second << k;
        dev = std::max(dev, std::abs(lhs.coefficient(s1, s2) - c));
    }
    for (const auto& [key, c] : lhs.terms()) {
        if ((key.first & lowmask) || (key.second & lowmask)) continue;
        dev = std::max(dev, std::abs(c - rhs.coefficient(key.first >> k, key.second >> k)));
    }
    return dev;
}

std::vector<Eigen::MatrixXd> chart_tangents(const QuadraticSpace& V, const Chart& chart,
                                            const Eigen::VectorXcd& w, double h) {
    const Eigen::MatrixXd S = V.gram_embedded(chart.place);
    const KMFrame fr = make_km_frame(V, chart_point(V, chart, w));
    const int n = fr.n;

    auto normalized_pair = [&](const Eigen::VectorXcd& wp) {
        const PeriodPoint t = chart_point(V, chart, wp);
        const double na = pair_embedded(S, t.alpha, t.alpha);
        const double nb = pair_embedded(S, t.beta, t.beta);
        return std::make_pair(Eigen::VectorXd(t.alpha / std::sqrt(-na)),
                              Eigen::VectorXd(t.beta / std::sqrt(-nb)));
    };

    std::vector<Eigen::MatrixXd> out;
    const int nfree = static_cast<int>(w.size());
    for (int j = 0; j < nfree; ++j) {
        for (int part = 0; part < 2; ++part) {
            const std::complex<double> step = part == 0 ? std::complex<double>(h, 0)
                                                        : std::complex<double>(0, h);
            Eigen::VectorXcd wp = w, wm = w;
            wp(j) += step;
            wm(j) -= step;
            const auto [p1, p2] = normalized_pair(wp);
            const auto [m1, m2] = normalized_pair(wm);
            const Eigen::VectorXd dv1 = (p1 - m1) / (2.0 * h);
            const Eigen::VectorXd dv2 = (p2 - m2) / (2.0 * h);
            Eigen::MatrixXd B(n, 2);
            for (int i = 0; i < n; ++i) {
                B(i, 0) = pair_embedded(S, dv1, fr.frame.col(i));
                B(i, 1) = pair_embedded(S, dv2, fr.frame.col(i));
            }
            out.push_back(std::move(B));
        }
    }
    return out;
}

Eigen::MatrixXd chart_pullback_2form(const ExteriorFormValue& val,
                                     const std::vector<Eigen::MatrixXd>& tangents, int n) {
    const int m = static_cast<int>(tangents.size());
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
    for (const auto& [key, c] : val.terms()) {
        if (std::popcount(key.first) != 1 || std::popcount(key.second) != 1)
            throw std::invalid_argument("chart_pullback_2form: value must be degree (1,1)");
        const int i = std::countr_zero(key.first);
        const int j = std::countr_zero(key.second);
        if (i >= n || j >= n) continue;
        for (int cdir = 0; cdir < m; ++cdir)
            for (int ddir = cdir + 1; ddir < m; ++ddir) {
                const double v = c * (tangents[cdir](i, 0) * tangents[ddir](j, 1) -
                                      tangents[ddir](i, 0) * tangents[cdir](j, 1));
                P(cdir, ddir) += v;
                P(ddir, cdir) -= v;
            }
    }
    return P;
}

double closedness_check(const QuadraticSpace& V, const Chart& chart, const Eigen::VectorXcd& w,
                        const Eigen::VectorXd& x_embedded, double h) {
    const int nfree = static_cast<int>(w.size());
    const int m = 2 * nfree;
    if (m < 3) return 0.0; // top degree: a 2-form on a 2-real-dim chart is closed

    auto pullback_at = [&](const Eigen::VectorXcd& wp) {
        const KMFrame fr = make_km_frame(V, chart_point(V, chart, wp));
        const ExteriorFormValue val = evaluate_at(fr, x_embedded);
        return chart_pullback_2form(val, chart_tangents(V, chart, wp, h), fr.n);
    };

    std::vector<Eigen::MatrixXd> plus(m), minus(m);
    for (int c = 0; c < m; ++c) {
        Eigen::VectorXcd wp = w, wm = w;
        const std::complex<double> step = (c % 2 == 0) ? std::complex<double>(h, 0)
                                                       : std::complex<double>(0, h);
        wp(c / 2) += step;
        wm(c / 2) -= step;
        plus[c] = pullback_at(wp);
        minus[c] = pullback_at(wm);
    }

    double worst = 0.0;
    for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b)
            for (int c = b + 1; c < m; ++c) {
                const double d = (plus[a](b, c) - minus[a](b, c)) / (2 * h) -
                                 (plus[b](a, c) - minus[b](a, c)) / (2 * h) +
                                 (plus[c](a, b) - minus[c](a, b)) / (2 * h);
                worst = std::max(worst, std::abs(d));
            }
    return worst;
}

} // namespace kmt
