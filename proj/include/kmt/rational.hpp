#ifndef KMT_RATIONAL_HPP
#define KMT_RATIONAL_HPP

#include <gmpxx.h>
#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace kmt {

// Exact rational scalar. GMP keeps numerators/denominators arbitrary size,
// which matters in the elimination routines (entries grow quickly).
using Rational = mpq_class;

inline Rational rational_of(long num, long den = 1) {
    if (den == 0) throw std::domain_error("rational_of: zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// Parse "p/q" or "p" (optional sign, base 10).
inline Rational rational_from_string(const std::string& s) {
    if (s.empty()) throw std::domain_error("rational_from_string: empty string");
    Rational r;
    if (r.set_str(s, 10) != 0)
        throw std::domain_error("rational_from_string: bad literal '" + s + "'");
    r.canonicalize();
    if (r.get_den() == 0) throw std::domain_error("rational_from_string: zero denominator");
    return r;
}

inline std::string rational_to_string(const Rational& r) {
    return r.get_str(10);
}

inline double to_double(const Rational& r) { return r.get_d(); }

inline int sign_of(const Rational& r) { return sgn(r); }

} // namespace kmt

namespace Eigen {

// Minimal custom-scalar traits so Matrix<mpq_class, ...> works for storage,
// sums and products. Exact elimination is done by hand elsewhere; nothing
// here relies on epsilon-based rank decisions.
template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
    typedef mpq_class Real;
    typedef mpq_class NonInteger;
    typedef mpq_class Nested;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 6,
        AddCost = 150,
        MulCost = 100
    };
    static inline Real epsilon() { return 0; }
    static inline Real dummy_precision() { return 0; }
    static inline int digits10() { return 0; }
};

} // namespace Eigen

#endif
