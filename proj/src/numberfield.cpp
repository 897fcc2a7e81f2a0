#include "kmt/numberfield.hpp"

#include <cmath>

namespace kmt {

int sign_with_root(const Rational& a, const Rational& b, long D) {
    if (b == 0) return sgn(a);
    if (a == 0) return sgn(b);
    if (sgn(a) > 0 && sgn(b) > 0) return 1;
    if (sgn(a) < 0 && sgn(b) < 0) return -1;
    // Mixed signs: compare a^2 with b^2 D; the sign of the larger magnitude wins.
    Rational lhs = a * a;
    Rational rhs = b * b * rational_of(D);
    int cmpr = cmp(lhs, rhs);
    if (cmpr == 0) return 0; // cannot happen for squarefree D > 1, kept for safety
    return (cmpr > 0) ? sgn(a) : sgn(b);
}

namespace {

bool squarefree(long D) {
    for (long p = 2; p * p <= D; ++p) {
        if (D % (p * p) == 0) return false;
    }
    return true;
}

} // namespace

TotallyRealField TotallyRealField::rationals() { return TotallyRealField(1, 0); }

TotallyRealField TotallyRealField::real_quadratic(long D) {
    if (D < 2) throw std::domain_error("real_quadratic: need D >= 2");
    if (!squarefree(D)) throw std::domain_error("real_quadratic: D must be squarefree");
    return TotallyRealField(2, D);
}

long TotallyRealField::discriminant() const {
    if (degree_ == 1) return 1;
    return (D_ % 4 == 1) ? D_ : 4 * D_;
}

bool TotallyRealField::accepts(const FieldElement& x) const {
    if (x.D == 0) return true;
    return degree_ == 2 && x.D == D_;
}

void TotallyRealField::require(const FieldElement& x) const {
    if (!accepts(x)) throw std::domain_error("FieldElement does not belong to this field");
}

double TotallyRealField::embed(const FieldElement& x, int i) const {
    require(x);
    if (i < 0 || i >= degree_) throw std::out_of_range("embed: bad embedding index");
    if (degree_ == 1) return to_double(x.a);
    double s = (i == 0) ? 1.0 : -1.0;
    return to_double(x.a) + s * to_double(x.b) * std::sqrt(static_cast<double>(D_));
}

std::vector<double> TotallyRealField::embeddings(const FieldElement& x) const {
    std::vector<double> out(degree_);
    for (int i = 0; i < degree_; ++i) out[i] = embed(x, i);
    return out;
}

int TotallyRealField::sign_at(const FieldElement& x, int i) const {
    require(x);
    if (i < 0 || i >= degree_) throw std::out_of_range("sign_at: bad embedding index");
    if (degree_ == 1) return sgn(x.a);
    Rational b = (i == 0) ? x.b : Rational(-x.b);
    return sign_with_root(x.a, b, D_);
}

Rational TotallyRealField::trace(const FieldElement& x) const {
    require(x);
    if (degree_ == 1) return x.a;
    return Rational(2 * x.a);
}

Rational TotallyRealField::norm(const FieldElement& x) const {
    require(x);
    if (degree_ == 1) return x.a;
    return Rational(x.a * x.a - x.b * x.b * rational_of(D_));
}

bool TotallyRealField::is_totally_positive(const FieldElement& x) const {
    for (int i = 0; i < degree_; ++i)
        if (sign_at(x, i) <= 0) return false;
    return true;
}

bool TotallyRealField::is_totally_nonnegative(const FieldElement& x) const {
    for (int i = 0; i < degree_; ++i)
        if (sign_at(x, i) < 0) return false;
    return true;
}

std::vector<FieldElement> TotallyRealField::integer_basis() const {
    if (degree_ == 1) return {FieldElement(1)};
    if (D_ % 4 == 1)
        return {FieldElement(1), FieldElement(rational_of(1, 2), rational_of(1, 2), D_)};
    return {FieldElement(1), FieldElement(Rational(0), Rational(1), D_)};
}

FieldElement TotallyRealField::codifferent_generator() const {
    if (degree_ == 1) return FieldElement(1);
    // 1/sqrt(disc): sqrt(D)/(D * s) with disc = s^2 D, s = 1 or 2.
    long s = (D_ % 4 == 1) ? 1 : 2;
    return FieldElement(Rational(0), rational_of(1, s * D_), D_);
}

FieldElement TotallyRealField::element(const Rational& a, const Rational& b) const {
    if (degree_ == 1 && b != 0)
        throw std::domain_error("element: rational field has no sqrt part");
    return FieldElement(a, b, degree_ == 1 ? 0 : D_);
}

FieldVector field_vector(std::initializer_list<long> entries) {
    FieldVector v(static_cast<Eigen::Index>(entries.size()));
    Eigen::Index k = 0;
    for (long e : entries) v(k++) = FieldElement(e);
    return v;
}

FieldVector field_vector_rational(std::initializer_list<Rational> entries) {
    FieldVector v(static_cast<Eigen::Index>(entries.size()));
    Eigen::Index k = 0;
    for (const Rational& e : entries) v(k++) = FieldElement(e);
    return v;
}

Eigen::VectorXd embed_vector(const TotallyRealField& F, const FieldVector& v, int i) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) out(k) = F.embed(v(k), i);
    return out;
}

Eigen::MatrixXd embed_matrix(const TotallyRealField& F, const FieldMatrix& m, int i) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) out(r, c) = F.embed(m(r, c), i);
    return out;
}

} // namespace kmt
