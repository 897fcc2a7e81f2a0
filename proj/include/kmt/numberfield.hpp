#ifndef KMT_NUMBERFIELD_HPP
#define KMT_NUMBERFIELD_HPP

#include "kmt/rational.hpp"

#include <array>
#include <vector>

namespace kmt {

/// Element a + b*sqrt(D) of a real quadratic field, or a plain rational
/// when D == 0 (then b must vanish). Elements are closed values: the D tag
/// travels with them, and mixed-field arithmetic throws unless one operand
/// is rational (D == 0), which promotes to the other operand's field.
struct FieldElement {
    Rational a{0};
    Rational b{0};
    long D{0};

    FieldElement() = default;
    FieldElement(const Rational& ra) : a(ra) {}
    FieldElement(long n) : a(rational_of(n)) {}
    FieldElement(const Rational& ra, const Rational& rb, long d) : a(ra), b(rb), D(d) {
        normalize_tag();
    }

    void normalize_tag() {
        if (b == 0) D = 0;
    }

    bool is_rational() const { return b == 0; }
    bool is_zero() const { return a == 0 && b == 0; }

    /// Galois conjugate a - b*sqrt(D). Identity on rationals.
    FieldElement conj() const { return FieldElement(a, Rational(-b), D); }

    friend long merged_tag(const FieldElement& x, const FieldElement& y) {
        if (x.D == y.D) return x.D;
        if (x.D == 0) return y.D;
        if (y.D == 0) return x.D;
        throw std::domain_error("FieldElement: mixed fields");
    }

    friend FieldElement operator+(const FieldElement& x, const FieldElement& y) {
        long d = merged_tag(x, y);
        return FieldElement(Rational(x.a + y.a), Rational(x.b + y.b), d);
    }
    friend FieldElement operator-(const FieldElement& x, const FieldElement& y) {
        long d = merged_tag(x, y);
        return FieldElement(Rational(x.a - y.a), Rational(x.b - y.b), d);
    }
    friend FieldElement operator-(const FieldElement& x) {
        return FieldElement(Rational(-x.a), Rational(-x.b), x.D);
    }
    friend FieldElement operator*(const FieldElement& x, const FieldElement& y) {
        long d = merged_tag(x, y);
        Rational ra = x.a * y.a + x.b * y.b * rational_of(d);
        Rational rb = x.a * y.b + x.b * y.a;
        return FieldElement(ra, rb, d);
    }
    friend FieldElement operator/(const FieldElement& x, const FieldElement& y) {
        if (y.is_zero()) throw std::domain_error("FieldElement: division by zero");
        long d = merged_tag(x, y);
        // 1/(a+b sqrt D) = (a-b sqrt D)/(a^2 - b^2 D); denominator is the norm,
        // nonzero because sqrt(D) is irrational for the admitted D.
        Rational nrm = y.a * y.a - y.b * y.b * rational_of(d);
        FieldElement num = x * y.conj();
        return FieldElement(Rational(num.a / nrm), Rational(num.b / nrm), d);
    }
    FieldElement& operator+=(const FieldElement& y) { return *this = *this + y; }
    FieldElement& operator-=(const FieldElement& y) { return *this = *this - y; }
    FieldElement& operator*=(const FieldElement& y) { return *this = *this * y; }

    friend bool operator==(const FieldElement& x, const FieldElement& y) {
        return x.a == y.a && x.b == y.b && merged_tag(x, y) >= 0;
    }
    friend bool operator!=(const FieldElement& x, const FieldElement& y) { return !(x == y); }
};

/// Exact sign of a + b*sqrt(D) as a real number (sqrt(D) > 0 branch).
int sign_with_root(const Rational& a, const Rational& b, long D);

/// Totally real base field: the rationals (degree 1) or Q(sqrt D) with D > 1
/// squarefree (degree 2). Embeddings are ordered so that the first one sends
/// sqrt(D) to +sqrt(D) and the second to -sqrt(D).
class TotallyRealField {
  public:
    static TotallyRealField rationals();
    static TotallyRealField real_quadratic(long D);

    int degree() const { return degree_; }
    long D() const { return D_; }
    /// Field discriminant: 1, D (D = 1 mod 4) or 4D.
    long discriminant() const;

    bool accepts(const FieldElement& x) const;
    void require(const FieldElement& x) const;

    /// sigma_i(x) as a double, i in [0, degree).
    double embed(const FieldElement& x, int i) const;
    std::vector<double> embeddings(const FieldElement& x) const;
    /// Exact sign of sigma_i(x).
    int sign_at(const FieldElement& x, int i) const;

    Rational trace(const FieldElement& x) const;
    Rational norm(const FieldElement& x) const;

    /// All embeddings strictly positive (exact decision). Zero is not totally positive.
    bool is_totally_positive(const FieldElement& x) const;
    bool is_totally_nonnegative(const FieldElement& x) const;

    /// Z-basis of the ring of integers: {1}, {1, (1+sqrt D)/2} or {1, sqrt D}.
    std::vector<FieldElement> integer_basis() const;

    /// Generator 1/sqrt(disc) of the codifferent (trace dual of the integers).
    FieldElement codifferent_generator() const;

    FieldElement element(const Rational& a, const Rational& b = Rational(0)) const;

    bool operator==(const TotallyRealField& o) const {
        return degree_ == o.degree_ && D_ == o.D_;
    }

  private:
    TotallyRealField(int degree, long D) : degree_(degree), D_(D) {}
    int degree_;
    long D_;
};

} // namespace kmt

namespace Eigen {

template <>
struct NumTraits<kmt::FieldElement> : GenericNumTraits<kmt::FieldElement> {
    typedef kmt::FieldElement Real;
    typedef kmt::FieldElement NonInteger;
    typedef kmt::FieldElement Nested;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 12,
        AddCost = 300,
        MulCost = 400
    };
    static inline Real epsilon() { return Real(); }
    static inline Real dummy_precision() { return Real(); }
    static inline int digits10() { return 0; }
};

} // namespace Eigen

namespace kmt {

using FieldVector = Eigen::Matrix<FieldElement, Eigen::Dynamic, 1>;
using FieldMatrix = Eigen::Matrix<FieldElement, Eigen::Dynamic, Eigen::Dynamic>;

FieldVector field_vector(std::initializer_list<long> entries);
FieldVector field_vector_rational(std::initializer_list<Rational> entries);

/// Embed a vector of field elements at embedding i.
Eigen::VectorXd embed_vector(const TotallyRealField& F, const FieldVector& v, int i);
Eigen::MatrixXd embed_matrix(const TotallyRealField& F, const FieldMatrix& m, int i);

} // namespace kmt

#endif
