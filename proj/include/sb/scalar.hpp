#ifndef SB_SCALAR_HPP
#define SB_SCALAR_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <variant>

#include <gmpxx.h>

namespace sb {

enum class Backend { Exact, Float };

struct BackendMismatch : std::invalid_argument {
    explicit BackendMismatch(const std::string& what)
        : std::invalid_argument("backend mismatch: " + what) {}
};

struct DivisionByZero : std::domain_error {
    explicit DivisionByZero(const std::string& what)
        : std::domain_error("division by zero: " + what) {}
};

struct PoleError : std::domain_error {
    explicit PoleError(const std::string& what)
        : std::domain_error("pole: " + what) {}
};

/// Field element with two backends behind one arithmetic contract:
/// exact rationals (GMP, always canonical) and complex double.
/// Mixing backends in one operation throws BackendMismatch; there is
/// no silent promotion.
class Scalar {
public:
    using Rational = mpq_class;
    using Complex = std::complex<double>;

    Scalar() : value_(Rational(0)) {}
    Scalar(const Rational& q) : value_(q) { canon(); }
    Scalar(const Complex& z) : value_(z) {}
    explicit Scalar(long n) : value_(Rational(n)) {}

    static Scalar rational(long num, long den);
    /// Parses "p", "p/q", or a decimal-free integer string.
    static Scalar parse_rational(const std::string& text);
    static Scalar complex(double re, double im) { return Scalar(Complex(re, im)); }
    static Scalar zero(Backend b);
    static Scalar one(Backend b);

    Backend backend() const {
        return std::holds_alternative<Rational>(value_) ? Backend::Exact : Backend::Float;
    }
    bool is_exact() const { return backend() == Backend::Exact; }

    const Rational& rat() const;
    const Complex& cplx() const;

    bool is_zero() const;
    /// Absolute value as double (exact magnitude for rationals, modulus for complex).
    double abs() const;

    Scalar operator-() const;
    Scalar& operator+=(const Scalar& o);
    Scalar& operator-=(const Scalar& o);
    Scalar& operator*=(const Scalar& o);
    Scalar& operator/=(const Scalar& o);

    friend Scalar operator+(Scalar a, const Scalar& b) { return a += b; }
    friend Scalar operator-(Scalar a, const Scalar& b) { return a -= b; }
    friend Scalar operator*(Scalar a, const Scalar& b) { return a *= b; }
    friend Scalar operator/(Scalar a, const Scalar& b) { return a /= b; }

    bool operator==(const Scalar& o) const;
    bool operator!=(const Scalar& o) const { return !(*this == o); }

    Scalar inv() const;
    std::string str() const;

private:
    void canon();
    void check_same(const Scalar& o, const char* op) const;

    std::variant<Rational, Complex> value_;
};

/// (-1)^exponent as a plain int, so it can be applied on either backend.
inline int parity_sign(long exponent) {
    return ((exponent % 2 + 2) % 2 == 0) ? 1 : -1;
}

inline Scalar apply_sign(Scalar s, int sign) {
    return sign < 0 ? -s : s;
}

}  // namespace sb

#endif
